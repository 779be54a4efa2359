#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "subvoc/corpus.hpp"
#include "subvoc/line_reader.hpp"
#include "subvoc/normalize.hpp"
#include "subvoc/vocabulary.hpp"

namespace subvoc {

// One word's subword segmentation.
struct Tokenization {
    std::vector<std::string> pieces;
    std::vector<int32_t> ids;
    bool is_unk = false;
};

namespace detail {

// Byte trie with longest-prefix lookup. Matching whole vocabulary entries
// byte-wise is codepoint-safe because both entries and words are valid
// UTF-8.
class ByteTrie {
public:
    void insert(std::string_view key, int32_t value);
    // Longest key that is a prefix of `text`; returns value or -1.
    int32_t longest_prefix(std::string_view text, size_t& match_len) const;

private:
    struct Node {
        int32_t value = -1;
        std::vector<std::pair<unsigned char, int32_t>> children;  // sorted by byte
    };
    std::vector<Node> nodes_{Node{}};
};

}  // namespace detail

// Greedy longest-match-first WordPiece segmenter, no backtracking: at each
// position take the longest vocabulary entry (continuation-prefix form past
// the first position); any position with no match, or a word longer than
// max_word_chars codepoints, maps the whole word to [UNK].
//
// Per-word cost is linear in word length times the longest entry length.
class WordPieceTokenizer {
public:
    // Holds a reference; the vocabulary must outlive the tokenizer.
    explicit WordPieceTokenizer(const Vocabulary& vocab, int32_t max_word_chars = 100);
    explicit WordPieceTokenizer(Vocabulary&& vocab, int32_t max_word_chars = 100) = delete;

    // `word` must be non-empty valid UTF-8 with no whitespace.
    Tokenization tokenize_word(std::string_view word) const;

    // Id-only fast path; appends to `out`. Returns false when the word maps
    // to [UNK] (out then carries the single [UNK] id).
    bool word_ids(std::string_view word, std::vector<int32_t>& out) const;

    // Segments text that continues a word: every piece, including the
    // first, is matched in continuation form. Used to initialize
    // embeddings of "##"-prefixed entries. Appends piece ids; false when
    // unmatchable (nothing appended).
    bool continuation_ids(std::string_view content, std::vector<int32_t>& out) const;

    const Vocabulary& vocab() const { return *vocab_; }
    int32_t max_word_chars() const { return max_word_chars_; }
    int32_t unk_id() const { return unk_id_; }

private:
    const Vocabulary* vocab_;
    detail::ByteTrie initial_;       // every entry, verbatim
    detail::ByteTrie continuation_;  // "##x..." entries keyed by the bytes after "##"
    int32_t unk_id_;
    int32_t max_word_chars_;
};

// Applies normalize_and_split then per-word tokenization; flattening the
// result yields the sentence's subword sequence.
std::vector<Tokenization> tokenize_sentence(std::string_view sentence,
                                            const WordPieceTokenizer& tokenizer,
                                            const NormalizationConfig& config);

// Subword occurrence totals over a corpus, [UNK] included.
struct SubwordCounts {
    std::vector<uint64_t> by_id;  // indexed by vocabulary id
    uint64_t total = 0;
    uint64_t sentences = 0;

    void merge(const SubwordCounts& other);
    // Non-zero entries as piece -> count.
    std::unordered_map<std::string, uint64_t> to_map(const Vocabulary& vocab) const;
};

using SentenceSink = std::function<void(std::span<const int32_t> piece_ids)>;

// Counts subword occurrences across the corpus. Shard-merge invariant as in
// count_tokens. When `per_sentence` is provided the pass is sequential and
// the sink sees each sentence's flattened piece ids in corpus order.
SubwordCounts tokenize_corpus(LineReader& corpus, const WordPieceTokenizer& tokenizer,
                              const CorpusOptions& options, int threads = 1,
                              const SentenceSink& per_sentence = nullptr);
SubwordCounts tokenize_corpus(std::span<const std::string> lines,
                              const WordPieceTokenizer& tokenizer, const CorpusOptions& options,
                              int threads = 1, const SentenceSink& per_sentence = nullptr);

}  // namespace subvoc
