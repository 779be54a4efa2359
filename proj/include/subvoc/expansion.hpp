#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "subvoc/corpus.hpp"
#include "subvoc/unigram.hpp"
#include "subvoc/vocabulary.hpp"

namespace subvoc {

// Weighted counts of candidate subwords mined from word tokens. Candidates
// are strictly incremental: entries of the raw vocabulary never appear.
struct CandidateTable {
    std::unordered_map<std::string, uint64_t> counts;
    int32_t max_subword_len = 0;
};

enum class FinalRule {
    current_step,   // return the vocabulary of the iteration that triggered the stop
    previous_step,  // return the vocabulary of the iteration before it
};

struct ExpansionConfig {
    double delta = 0.01;            // stop when the relative rise falls to or below this
    int32_t step = 10000;           // vocabulary size increment per iteration
    int32_t max_subword_len = 20;   // candidate length cap, in codepoints
    uint64_t min_count = 1;         // candidates below this weighted count are dropped
    FinalRule final_rule = FinalRule::current_step;
    int32_t max_size = 200000;      // safety cap on the expanded vocabulary size
    bool include_unk = true;        // keep [UNK] occurrences in the unigram statistics
    ScoreNormalization normalization = ScoreNormalization::mean_per_sentence;
    int threads = 1;
};

enum class StopReason {
    threshold,
    cap,
    candidates_exhausted,
};

std::string_view stop_reason_name(StopReason reason);
std::string_view final_rule_name(FinalRule rule);

struct ExpansionStep {
    int32_t size = 0;            // vocabulary size at this step
    double score = 0.0;          // corpus occurrence probability under it
    double relative_rise = 0.0;  // |P_i - P_{i-1}| / |P_{i-1}|; 0 for the baseline row
};

struct ExpansionTrace {
    std::vector<ExpansionStep> steps;  // steps[0] is the raw-vocabulary baseline
    int32_t final_size = 0;
    StopReason stop_reason = StopReason::threshold;
};

// All substrings (up to max_subword_len codepoints) of every word token,
// weighted by the token's count; word-initial substrings keep their form,
// word-internal ones carry the continuation prefix. Entries of raw_vocab
// and candidates below min_count are removed.
CandidateTable mine_candidates(const TokenCounts& token_counts, const Vocabulary& raw_vocab,
                               int32_t max_subword_len, uint64_t min_count, int threads = 1);

// Top-k candidates ordered by count descending, then content length
// (continuation prefix excluded) descending, then the full string
// ascending. k beyond the table size returns everything.
std::vector<std::string> select_increment(const CandidateTable& candidates, size_t k);

struct ExpansionResult {
    Vocabulary vocabulary;
    ExpansionTrace trace;
};

// The auto-sizing loop: mine candidates once, then grow the vocabulary by
// `step` entries per iteration, rescoring the sample each time, until the
// relative rise of the occurrence probability falls to delta, the
// candidates run out, or max_size is reached. The returned vocabulary
// preserves raw_vocab as its exact prefix with base_size = |raw_vocab|.
//
// Sample sentences are already normalized, so splitting here is plain
// whitespace splitting.
ExpansionResult expand_vocabulary(const CorpusSample& sample, const Vocabulary& raw_vocab,
                                  const ExpansionConfig& config);

// Pure replay of the stopping rule over precomputed (size, score) pairs.
// Requires at least two scores with strictly increasing sizes.
std::pair<int32_t, ExpansionTrace> stopping_decision(
    std::span<const std::pair<int32_t, double>> scores, double delta, FinalRule rule);

// Trace as "# key<TAB>value" metadata plus one "i size score rise" row per
// step; consumable by plotting tools.
void write_trace(std::ostream& out, const ExpansionTrace& trace,
                 const std::map<std::string, std::string>& metadata = {});

}  // namespace subvoc
