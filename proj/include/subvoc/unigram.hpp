#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "subvoc/wordpiece.hpp"

namespace subvoc {

// Frequency-derived subword unigram model: p(piece) = count / total, with
// natural-log probabilities. Pieces never observed are absent, not smoothed.
class UnigramModel {
public:
    // Requires total > 0 (empty-corpus error otherwise), every count > 0,
    // and counts summing to total.
    static UnigramModel from_counts(const std::unordered_map<std::string, uint64_t>& counts,
                                    uint64_t total);
    static UnigramModel from_subword_counts(const SubwordCounts& counts, const Vocabulary& vocab,
                                            bool include_unk = true);

    bool contains(std::string_view piece) const;
    // Throw DataError naming the piece when absent (model/tokenization mismatch).
    double probability(std::string_view piece) const;
    double log_probability(std::string_view piece) const;

    uint64_t total_count() const { return total_; }
    size_t size() const { return entries_.size(); }

    // Pieces in lexicographic order, for deterministic reports.
    std::vector<std::string_view> sorted_pieces() const;

private:
    struct Entry {
        uint64_t count;
        double probability;
        double log_probability;
    };
    struct StringHash {
        using is_transparent = void;
        size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
    };
    struct StringEq {
        using is_transparent = void;
        bool operator()(std::string_view a, std::string_view b) const { return a == b; }
    };

    const Entry& lookup(std::string_view piece) const;

    std::unordered_map<std::string, Entry, StringHash, StringEq> entries_;
    uint64_t total_ = 0;
};

// Sum of natural-log probabilities of the pieces; empty sequence -> 0.
double sentence_log_probability(std::span<const std::string> pieces, const UnigramModel& model);

enum class ScoreNormalization {
    mean_per_sentence,  // (1/|D|) * sum of per-sentence log-probabilities
    raw_sum,            // plain sum over sentences
};

std::string_view normalization_name(ScoreNormalization normalization);

// Corpus-level occurrence probability. value <= 0 always; 0 only when every
// occurring subword has probability 1.
struct CorpusScore {
    double value = 0.0;
    uint64_t sentence_count = 0;
    ScoreNormalization normalization = ScoreNormalization::mean_per_sentence;
};

// Streaming accumulator over per-sentence piece sequences, summed in corpus
// order.
class CorpusScorer {
public:
    explicit CorpusScorer(const UnigramModel& model) : model_(&model) {}

    void add_sentence(std::span<const std::string> pieces);
    void add_sentence_log_probability(double log_probability);
    // Mean normalization over an empty corpus raises DataError.
    CorpusScore finish(ScoreNormalization normalization) const;

private:
    const UnigramModel* model_;
    double sum_ = 0.0;
    uint64_t sentences_ = 0;
};

CorpusScore corpus_occurrence_probability(std::span<const std::vector<std::string>> tokenized_corpus,
                                          const UnigramModel& model,
                                          ScoreNormalization normalization);

// Self-scored corpus: builds p(piece) = count/total from `counts` and
// evaluates the corpus that produced them. Summation runs over ids in
// ascending order, so the value is independent of worker count and equals
// the per-sentence route up to rounding. include_unk=false drops [UNK]
// occurrences from both the model and the score.
CorpusScore score_subword_counts(const SubwordCounts& counts, int32_t unk_id,
                                 ScoreNormalization normalization, bool include_unk = true);

// One "{vocab_size, value, normalization, sentence_count}" record per line.
void write_score_record(std::ostream& out, int32_t vocab_size, const CorpusScore& score);

}  // namespace subvoc
