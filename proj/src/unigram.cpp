#include "subvoc/unigram.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "subvoc/error.hpp"

namespace subvoc {

UnigramModel UnigramModel::from_counts(const std::unordered_map<std::string, uint64_t>& counts,
                                       uint64_t total) {
    if (total == 0) throw DataError("cannot build a unigram model from an empty corpus");
    UnigramModel model;
    model.total_ = total;
    model.entries_.reserve(counts.size());
    uint64_t sum = 0;
    for (const auto& [piece, count] : counts) {
        if (count == 0) throw DataError("zero count for piece \"" + piece + "\"");
        const double probability = static_cast<double>(count) / static_cast<double>(total);
        model.entries_.emplace(piece, Entry{count, probability, std::log(probability)});
        sum += count;
    }
    if (sum != total) {
        throw DataError("unigram counts sum to " + std::to_string(sum) + ", expected " +
                        std::to_string(total));
    }
    return model;
}

UnigramModel UnigramModel::from_subword_counts(const SubwordCounts& counts, const Vocabulary& vocab,
                                               bool include_unk) {
    auto map = counts.to_map(vocab);
    uint64_t total = counts.total;
    if (!include_unk) {
        if (const auto it = map.find(std::string(Vocabulary::kUnkToken)); it != map.end()) {
            total -= it->second;
            map.erase(it);
        }
    }
    return from_counts(map, total);
}

const UnigramModel::Entry& UnigramModel::lookup(std::string_view piece) const {
    const auto it = entries_.find(piece);
    if (it == entries_.end()) {
        throw DataError("piece \"" + std::string(piece) +
                        "\" is absent from the unigram model (model/tokenization mismatch)");
    }
    return it->second;
}

bool UnigramModel::contains(std::string_view piece) const {
    return entries_.find(piece) != entries_.end();
}

double UnigramModel::probability(std::string_view piece) const { return lookup(piece).probability; }

double UnigramModel::log_probability(std::string_view piece) const {
    return lookup(piece).log_probability;
}

std::vector<std::string_view> UnigramModel::sorted_pieces() const {
    std::vector<std::string_view> pieces;
    pieces.reserve(entries_.size());
    for (const auto& [piece, entry] : entries_) pieces.push_back(piece);
    std::sort(pieces.begin(), pieces.end());
    return pieces;
}

double sentence_log_probability(std::span<const std::string> pieces, const UnigramModel& model) {
    double sum = 0.0;
    for (const std::string& piece : pieces) {
        sum += model.log_probability(piece);
    }
    return sum;
}

std::string_view normalization_name(ScoreNormalization normalization) {
    return normalization == ScoreNormalization::mean_per_sentence ? "mean_per_sentence" : "raw_sum";
}

void CorpusScorer::add_sentence(std::span<const std::string> pieces) {
    add_sentence_log_probability(sentence_log_probability(pieces, *model_));
}

void CorpusScorer::add_sentence_log_probability(double log_probability) {
    sum_ += log_probability;
    ++sentences_;
}

CorpusScore CorpusScorer::finish(ScoreNormalization normalization) const {
    CorpusScore score;
    score.normalization = normalization;
    score.sentence_count = sentences_;
    if (normalization == ScoreNormalization::mean_per_sentence) {
        if (sentences_ == 0) throw DataError("mean occurrence probability of an empty corpus");
        score.value = sum_ / static_cast<double>(sentences_);
    } else {
        score.value = sum_;
    }
    return score;
}

CorpusScore corpus_occurrence_probability(std::span<const std::vector<std::string>> tokenized_corpus,
                                          const UnigramModel& model,
                                          ScoreNormalization normalization) {
    CorpusScorer scorer(model);
    for (const auto& sentence : tokenized_corpus) {
        scorer.add_sentence(sentence);
    }
    return scorer.finish(normalization);
}

CorpusScore score_subword_counts(const SubwordCounts& counts, int32_t unk_id,
                                 ScoreNormalization normalization, bool include_unk) {
    uint64_t total = counts.total;
    if (!include_unk && unk_id >= 0 && static_cast<size_t>(unk_id) < counts.by_id.size()) {
        total -= counts.by_id[static_cast<size_t>(unk_id)];
    }
    if (total == 0) throw DataError("cannot score an empty tokenized corpus");

    // sum over sentences of log P == sum over piece types of count * log p.
    const double log_total = std::log(static_cast<double>(total));
    double sum = 0.0;
    for (size_t id = 0; id < counts.by_id.size(); ++id) {
        if (!include_unk && static_cast<int32_t>(id) == unk_id) continue;
        const uint64_t count = counts.by_id[id];
        if (count == 0) continue;
        sum += static_cast<double>(count) * (std::log(static_cast<double>(count)) - log_total);
    }

    CorpusScore score;
    score.normalization = normalization;
    score.sentence_count = counts.sentences;
    if (normalization == ScoreNormalization::mean_per_sentence) {
        if (counts.sentences == 0) throw DataError("mean occurrence probability of an empty corpus");
        score.value = sum / static_cast<double>(counts.sentences);
    } else {
        score.value = sum;
    }
    return score;
}

void write_score_record(std::ostream& out, int32_t vocab_size, const CorpusScore& score) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", score.value);
    out << vocab_size << '\t' << buffer << '\t' << normalization_name(score.normalization) << '\t'
        << score.sentence_count << '\n';
}

}  // namespace subvoc
