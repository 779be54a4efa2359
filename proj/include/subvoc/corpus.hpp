#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "subvoc/line_reader.hpp"
#include "subvoc/normalize.hpp"

namespace subvoc {

struct CorpusOptions {
    NormalizationConfig norm;
    // Lines with fewer word tokens are skipped entirely (0 = keep all).
    uint64_t min_words = 0;
};

// Whitespace-level word token multiset.
struct TokenCounts {
    std::unordered_map<std::string, uint64_t> counts;
    uint64_t total_tokens = 0;
    uint64_t total_sentences = 0;  // non-empty lines after filtering

    void add(const std::string& token, uint64_t n = 1);
    void merge(TokenCounts&& other);
};

// Counts word tokens across all lines. Shard-merge invariant: splitting the
// stream into blocks, counting each and merging key-wise yields the
// single-pass result for any thread count.
TokenCounts count_tokens(LineReader& corpus, const CorpusOptions& options, int threads = 1);
TokenCounts count_tokens(std::span<const std::string> lines, const CorpusOptions& options,
                         int threads = 1);

// "token<TAB>count" per line, count descending then token ascending.
void write_token_counts(std::ostream& out, const TokenCounts& counts);
TokenCounts read_token_counts(LineReader& in);

// Reproducible uniform sample of normalized non-empty sentences.
struct CorpusSample {
    std::vector<std::string> sentences;  // normalized, tokens joined by single spaces
    uint64_t seed = 0;
    uint64_t source_size = 0;  // eligible lines seen
};

// Seeded reservoir sampling; returns min(n, eligible lines) sentences in
// corpus order. Single-pass, single-threaded, pure in (corpus content, n, seed).
CorpusSample sample_sentences(LineReader& corpus, uint64_t n, uint64_t seed,
                              const CorpusOptions& options);

}  // namespace subvoc
