#include "subvoc/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>

#include "subvoc/error.hpp"
#include "subvoc/threading.hpp"
#include "subvoc/unigram.hpp"
#include "subvoc/wordpiece.hpp"

namespace subvoc {

std::vector<std::pair<int32_t, double>> pd_curve(const CorpusSample& sample,
                                                 const Vocabulary& raw_vocab,
                                                 std::span<const int32_t> sizes,
                                                 const ExpansionConfig& config) {
    if (sample.sentences.empty()) throw DataError("cannot score an empty sample");
    if (sizes.empty()) throw UsageError("pd_curve needs at least one size");
    for (size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < raw_vocab.size()) {
            throw UsageError("size " + std::to_string(sizes[i]) +
                             " is below the raw vocabulary size " + std::to_string(raw_vocab.size()));
        }
        if (i > 0 && sizes[i] <= sizes[i - 1]) {
            throw UsageError("sizes must be strictly increasing");
        }
    }

    const CorpusOptions split_only{.norm = {.lowercase = false, .split_punctuation = false,
                                            .unicode_nfc = false}};
    const int32_t unk = raw_vocab.unk_id();
    const int32_t base_size = raw_vocab.size();

    std::vector<std::string> ordered;
    const bool needs_mining = sizes.back() > base_size;
    if (needs_mining) {
        const TokenCounts token_counts = count_tokens(sample.sentences, split_only, config.threads);
        if (token_counts.counts.empty()) throw DataError("sample contains no word tokens");
        const CandidateTable candidates = mine_candidates(
            token_counts, raw_vocab, config.max_subword_len, config.min_count, config.threads);
        ordered = select_increment(candidates, std::numeric_limits<size_t>::max());
    }

    std::vector<std::pair<int32_t, double>> curve;
    curve.reserve(sizes.size());
    for (const int32_t size : sizes) {
        const size_t increment =
            std::min(static_cast<size_t>(size - base_size), ordered.size());
        std::vector<std::string> entries(raw_vocab.entries().begin(), raw_vocab.entries().end());
        entries.insert(entries.end(), ordered.begin(), ordered.begin() + increment);
        const Vocabulary vocab = Vocabulary::from_entries(std::move(entries), base_size);
        const WordPieceTokenizer tokenizer(vocab);
        const SubwordCounts counts =
            tokenize_corpus(std::span<const std::string>(sample.sentences), tokenizer, split_only,
                            config.threads);
        const CorpusScore score =
            score_subword_counts(counts, unk, config.normalization, config.include_unk);
        curve.emplace_back(vocab.size(), score.value);
    }
    return curve;
}

void write_pd_curve(std::ostream& out, std::span<const std::pair<int32_t, double>> curve,
                    uint64_t sentence_count, ScoreNormalization normalization) {
    out << "# vocab_size\tvalue\tnormalization\tsentence_count\n";
    for (const auto& [size, value] : curve) {
        CorpusScore score;
        score.value = value;
        score.sentence_count = sentence_count;
        score.normalization = normalization;
        write_score_record(out, size, score);
    }
}

LengthRecord sequence_length_report(LineReader& corpus, const std::string& name,
                                    const Vocabulary& vocab_a, const Vocabulary& vocab_b,
                                    const CorpusOptions& options, int threads) {
    const WordPieceTokenizer tokenizer_a(vocab_a);
    const WordPieceTokenizer tokenizer_b(vocab_b);

    struct Acc {
        uint64_t pieces_a = 0;
        uint64_t pieces_b = 0;
        uint64_t sentences = 0;
    };
    std::vector<Acc> partials(static_cast<size_t>(std::max(threads, 1)));
    process_line_blocks(corpus, threads, 2048, [&](int worker, const LineBlock& block) {
        auto& acc = partials[static_cast<size_t>(worker)];
        std::vector<int32_t> ids;
        for (const std::string& line : block.lines) {
            const std::vector<std::string> words = normalize_and_split(line, options.norm);
            if (words.empty()) continue;
            if (options.min_words > 0 && words.size() < options.min_words) continue;
            acc.sentences += 1;
            for (const std::string& word : words) {
                ids.clear();
                tokenizer_a.word_ids(word, ids);
                acc.pieces_a += ids.size();
                ids.clear();
                tokenizer_b.word_ids(word, ids);
                acc.pieces_b += ids.size();
            }
        }
    });

    Acc total;
    for (const Acc& acc : partials) {
        total.pieces_a += acc.pieces_a;
        total.pieces_b += acc.pieces_b;
        total.sentences += acc.sentences;
    }
    if (total.sentences == 0) throw DataError("corpus \"" + name + "\" has no non-empty sentences");

    LengthRecord record;
    record.name = name;
    record.sentences = total.sentences;
    record.avg_len_vocab_a = static_cast<double>(total.pieces_a) / static_cast<double>(total.sentences);
    record.avg_len_vocab_b = static_cast<double>(total.pieces_b) / static_cast<double>(total.sentences);
    record.reduction = (record.avg_len_vocab_a - record.avg_len_vocab_b) / record.avg_len_vocab_a;
    return record;
}

void write_length_records(std::ostream& out, std::span<const LengthRecord> records) {
    out << "# name\tavg_len_vocab_a\tavg_len_vocab_b\treduction\tsentences\n";
    char buffer[64];
    for (const LengthRecord& record : records) {
        out << record.name << '\t';
        std::snprintf(buffer, sizeof(buffer), "%.12g", record.avg_len_vocab_a);
        out << buffer << '\t';
        std::snprintf(buffer, sizeof(buffer), "%.12g", record.avg_len_vocab_b);
        out << buffer << '\t';
        std::snprintf(buffer, sizeof(buffer), "%.12g", record.reduction);
        out << buffer << '\t' << record.sentences << '\n';
    }
}

void print_length_table(std::ostream& out, std::span<const LengthRecord> records) {
    size_t name_width = 7;
    for (const LengthRecord& record : records) name_width = std::max(name_width, record.name.size());
    char line[256];
    std::snprintf(line, sizeof(line), "%-*s  %10s  %10s  %10s\n", static_cast<int>(name_width),
                  "dataset", "vocab_a", "vocab_b", "reduction");
    out << line;
    for (const LengthRecord& record : records) {
        std::snprintf(line, sizeof(line), "%-*s  %10.2f  %10.2f  %9.1f%%\n",
                      static_cast<int>(name_width), record.name.c_str(), record.avg_len_vocab_a,
                      record.avg_len_vocab_b, record.reduction * 100.0);
        out << line;
    }
}

}  // namespace subvoc
