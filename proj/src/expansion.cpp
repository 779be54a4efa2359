#include "subvoc/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "subvoc/error.hpp"
#include "subvoc/threading.hpp"
#include "subvoc/wordpiece.hpp"

namespace subvoc {

std::string_view stop_reason_name(StopReason reason) {
    switch (reason) {
        case StopReason::threshold: return "threshold";
        case StopReason::cap: return "cap";
        case StopReason::candidates_exhausted: return "candidates_exhausted";
    }
    return "unknown";
}

std::string_view final_rule_name(FinalRule rule) {
    return rule == FinalRule::current_step ? "current_step" : "previous_step";
}

namespace {

void mine_token(std::unordered_map<std::string, uint64_t>& acc, const std::string& token,
                uint64_t count, const Vocabulary& raw_vocab, int32_t max_subword_len) {
    const DecodedText decoded = decode_utf8(token);
    const size_t n = decoded.codepoints.size();
    std::string candidate;
    for (size_t i = 0; i < n; ++i) {
        const size_t max_len = std::min(n - i, static_cast<size_t>(max_subword_len));
        for (size_t len = 1; len <= max_len; ++len) {
            const size_t from = decoded.byte_offsets[i];
            const size_t to = decoded.byte_offsets[i + len];
            candidate.clear();
            if (i > 0) candidate = Vocabulary::kContinuationPrefix;
            candidate.append(token, from, to - from);
            if (raw_vocab.contains(candidate)) continue;
            acc[candidate] += count;
        }
    }
}

// Content length in codepoints, continuation prefix excluded.
size_t content_length(std::string_view candidate) {
    if (Vocabulary::is_continuation(candidate)) {
        candidate.remove_prefix(Vocabulary::kContinuationPrefix.size());
    }
    return utf8_length(candidate);
}

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

double relative_rise(double current, double previous) {
    const double magnitude = std::abs(previous);
    if (magnitude == 0.0) {
        return current == previous ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return std::abs(current - previous) / magnitude;
}

}  // namespace

CandidateTable mine_candidates(const TokenCounts& token_counts, const Vocabulary& raw_vocab,
                               int32_t max_subword_len, uint64_t min_count, int threads) {
    if (token_counts.counts.empty()) {
        throw DataError("cannot mine subword candidates from an empty token count table");
    }
    if (max_subword_len < 1) throw UsageError("max_subword_len must be at least 1");

    std::vector<std::pair<const std::string*, uint64_t>> tokens;
    tokens.reserve(token_counts.counts.size());
    for (const auto& [token, count] : token_counts.counts) tokens.emplace_back(&token, count);

    std::vector<std::unordered_map<std::string, uint64_t>> partials(
        static_cast<size_t>(std::max(threads, 1)));
    parallel_ranges(tokens.size(), threads, [&](size_t begin, size_t end, int worker) {
        auto& acc = partials[static_cast<size_t>(worker)];
        for (size_t i = begin; i < end; ++i) {
            mine_token(acc, *tokens[i].first, tokens[i].second, raw_vocab, max_subword_len);
        }
    });

    CandidateTable table;
    table.max_subword_len = max_subword_len;
    table.counts = std::move(partials.front());
    for (size_t w = 1; w < partials.size(); ++w) {
        for (auto& [candidate, count] : partials[w]) table.counts[candidate] += count;
    }
    if (min_count > 1) {
        for (auto it = table.counts.begin(); it != table.counts.end();) {
            it = it->second < min_count ? table.counts.erase(it) : std::next(it);
        }
    }
    return table;
}

std::vector<std::string> select_increment(const CandidateTable& candidates, size_t k) {
    struct Row {
        std::string_view candidate;
        uint64_t count;
        size_t content_len;
    };
    std::vector<Row> rows;
    rows.reserve(candidates.counts.size());
    for (const auto& [candidate, count] : candidates.counts) {
        rows.push_back({candidate, count, content_length(candidate)});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.count != b.count) return a.count > b.count;
        if (a.content_len != b.content_len) return a.content_len > b.content_len;
        return a.candidate < b.candidate;
    });
    if (k < rows.size()) rows.resize(k);
    std::vector<std::string> selected;
    selected.reserve(rows.size());
    for (const Row& row : rows) selected.emplace_back(row.candidate);
    return selected;
}

ExpansionResult expand_vocabulary(const CorpusSample& sample, const Vocabulary& raw_vocab,
                                  const ExpansionConfig& config) {
    if (sample.sentences.empty()) throw DataError("cannot expand a vocabulary from an empty sample");
    if (config.delta <= 0.0) throw UsageError("delta must be positive");
    if (config.step <= 0) throw UsageError("step must be positive");
    raw_vocab.unk_id();  // [UNK] required

    // Sample sentences are pre-normalized; re-splitting is whitespace only.
    const CorpusOptions split_only{.norm = {.lowercase = false, .split_punctuation = false,
                                            .unicode_nfc = false}};

    const TokenCounts token_counts = count_tokens(sample.sentences, split_only, config.threads);
    if (token_counts.counts.empty()) throw DataError("sample contains no word tokens");

    const CandidateTable candidates = mine_candidates(
        token_counts, raw_vocab, config.max_subword_len, config.min_count, config.threads);
    const std::vector<std::string> ordered =
        select_increment(candidates, std::numeric_limits<size_t>::max());

    const int32_t base_size = raw_vocab.size();
    const int32_t unk = raw_vocab.unk_id();

    auto score_vocab = [&](const Vocabulary& vocab, bool check_degenerate) {
        const WordPieceTokenizer tokenizer(vocab);
        const SubwordCounts counts =
            tokenize_corpus(std::span<const std::string>(sample.sentences), tokenizer, split_only,
                            config.threads);
        if (check_degenerate && counts.total > 0 &&
            counts.by_id[static_cast<size_t>(unk)] == counts.total) {
            throw DataError(
                "degenerate corpus: every sentence tokenizes to [UNK] under the raw vocabulary");
        }
        return score_subword_counts(counts, unk, config.normalization, config.include_unk).value;
    };

    auto vocab_at = [&](size_t increment) {
        std::vector<std::string> entries(raw_vocab.entries().begin(), raw_vocab.entries().end());
        entries.insert(entries.end(), ordered.begin(), ordered.begin() + increment);
        return Vocabulary::from_entries(std::move(entries), base_size);
    };

    ExpansionResult result;
    ExpansionTrace& trace = result.trace;

    const double baseline = score_vocab(raw_vocab, true);
    trace.steps.push_back({base_size, baseline, 0.0});

    if (ordered.empty()) {
        trace.final_size = base_size;
        trace.stop_reason = StopReason::candidates_exhausted;
        result.vocabulary = vocab_at(0);
        return result;
    }

    double previous_score = baseline;
    size_t previous_increment = 0;
    while (true) {
        const int32_t previous_size = base_size + static_cast<int32_t>(previous_increment);
        const int32_t target = std::min(previous_size + config.step, config.max_size);
        const size_t increment =
            std::min(static_cast<size_t>(std::max(target - base_size, 0)), ordered.size());
        const int32_t size = base_size + static_cast<int32_t>(increment);
        const bool exhausted = increment == ordered.size();
        const bool capped = size >= config.max_size;
        if (increment <= previous_increment) {
            // Nothing left to add at the previous step already.
            trace.final_size = previous_size;
            trace.stop_reason = capped ? StopReason::cap : StopReason::candidates_exhausted;
            result.vocabulary = vocab_at(previous_increment);
            return result;
        }

        Vocabulary vocab = vocab_at(increment);
        const double score = score_vocab(vocab, false);
        const double rise = relative_rise(score, previous_score);
        trace.steps.push_back({size, score, rise});

        if (rise <= config.delta) {
            trace.stop_reason = StopReason::threshold;
            if (config.final_rule == FinalRule::current_step) {
                trace.final_size = size;
                result.vocabulary = std::move(vocab);
            } else {
                trace.final_size = previous_size;
                result.vocabulary = vocab_at(previous_increment);
            }
            return result;
        }
        if (capped || exhausted) {
            // No further iteration possible; the stop is forced, so both
            // final rules return the last vocabulary built.
            trace.final_size = size;
            trace.stop_reason = capped ? StopReason::cap : StopReason::candidates_exhausted;
            result.vocabulary = std::move(vocab);
            return result;
        }
        previous_score = score;
        previous_increment = increment;
    }
}

std::pair<int32_t, ExpansionTrace> stopping_decision(
    std::span<const std::pair<int32_t, double>> scores, double delta, FinalRule rule) {
    if (scores.size() < 2) {
        throw DataError("stopping_decision requires at least two (size, score) points");
    }
    for (size_t i = 1; i < scores.size(); ++i) {
        if (scores[i].first <= scores[i - 1].first) {
            throw DataError("stopping_decision requires strictly increasing sizes");
        }
    }

    ExpansionTrace trace;
    trace.steps.push_back({scores[0].first, scores[0].second, 0.0});
    for (size_t i = 1; i < scores.size(); ++i) {
        const double rise = relative_rise(scores[i].second, scores[i - 1].second);
        trace.steps.push_back({scores[i].first, scores[i].second, rise});
        if (rise <= delta) {
            trace.stop_reason = StopReason::threshold;
            trace.final_size =
                rule == FinalRule::current_step ? scores[i].first : scores[i - 1].first;
            return {trace.final_size, std::move(trace)};
        }
    }
    trace.stop_reason = StopReason::candidates_exhausted;
    trace.final_size = scores.back().first;
    return {trace.final_size, std::move(trace)};
}

void write_trace(std::ostream& out, const ExpansionTrace& trace,
                 const std::map<std::string, std::string>& metadata) {
    for (const auto& [key, value] : metadata) {
        out << "# " << key << '\t' << value << '\n';
    }
    out << "# step\tsize\tscore\trelative_rise\n";
    for (size_t i = 0; i < trace.steps.size(); ++i) {
        const ExpansionStep& step = trace.steps[i];
        out << i << '\t' << step.size << '\t' << format_double(step.score) << '\t'
            << format_double(step.relative_rise) << '\n';
    }
    out << "# final_size\t" << trace.final_size << '\n';
    out << "# stop_reason\t" << stop_reason_name(trace.stop_reason) << '\n';
}

}  // namespace subvoc
