#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "subvoc/corpus.hpp"
#include "subvoc/expansion.hpp"
#include "subvoc/line_reader.hpp"
#include "subvoc/vocabulary.hpp"

namespace subvoc {

// Occurrence probability of the sample at each requested vocabulary size.
// Sizes must be strictly increasing and at least |raw_vocab|; the entry at
// |raw_vocab| scores the raw vocabulary unmodified. Returned sizes are the
// sizes actually achieved (smaller than requested only when candidates run
// out).
std::vector<std::pair<int32_t, double>> pd_curve(const CorpusSample& sample,
                                                 const Vocabulary& raw_vocab,
                                                 std::span<const int32_t> sizes,
                                                 const ExpansionConfig& config);

void write_pd_curve(std::ostream& out, std::span<const std::pair<int32_t, double>> curve,
                    uint64_t sentence_count, ScoreNormalization normalization);

// Average subword-sequence length per sentence under two vocabularies.
// Lengths count pieces, [UNK] included, with no added special tokens.
struct LengthRecord {
    std::string name;
    double avg_len_vocab_a = 0.0;
    double avg_len_vocab_b = 0.0;
    double reduction = 0.0;  // (a - b) / a
    uint64_t sentences = 0;
};

LengthRecord sequence_length_report(LineReader& corpus, const std::string& name,
                                    const Vocabulary& vocab_a, const Vocabulary& vocab_b,
                                    const CorpusOptions& options, int threads = 1);

void write_length_records(std::ostream& out, std::span<const LengthRecord> records);
// Column-aligned human-readable table.
void print_length_table(std::ostream& out, std::span<const LengthRecord> records);

}  // namespace subvoc
