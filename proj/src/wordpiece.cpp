#include "subvoc/wordpiece.hpp"

#include <algorithm>

#include "subvoc/error.hpp"
#include "subvoc/threading.hpp"

namespace subvoc {

namespace detail {

void ByteTrie::insert(std::string_view key, int32_t value) {
    int32_t node = 0;
    for (const char ch : key) {
        const auto byte = static_cast<unsigned char>(ch);
        auto& children = nodes_[static_cast<size_t>(node)].children;
        const auto it = std::lower_bound(
            children.begin(), children.end(), byte,
            [](const auto& child, unsigned char b) { return child.first < b; });
        if (it != children.end() && it->first == byte) {
            node = it->second;
        } else {
            const auto next = static_cast<int32_t>(nodes_.size());
            children.insert(it, {byte, next});
            nodes_.emplace_back();
            node = next;
        }
    }
    nodes_[static_cast<size_t>(node)].value = value;
}

int32_t ByteTrie::longest_prefix(std::string_view text, size_t& match_len) const {
    int32_t best = -1;
    size_t best_len = 0;
    int32_t node = 0;
    for (size_t i = 0; i < text.size(); ++i) {
        const auto byte = static_cast<unsigned char>(text[i]);
        const auto& children = nodes_[static_cast<size_t>(node)].children;
        const auto it = std::lower_bound(
            children.begin(), children.end(), byte,
            [](const auto& child, unsigned char b) { return child.first < b; });
        if (it == children.end() || it->first != byte) break;
        node = it->second;
        if (nodes_[static_cast<size_t>(node)].value >= 0) {
            best = nodes_[static_cast<size_t>(node)].value;
            best_len = i + 1;
        }
    }
    match_len = best_len;
    return best;
}

}  // namespace detail

WordPieceTokenizer::WordPieceTokenizer(const Vocabulary& vocab, int32_t max_word_chars)
    : vocab_(&vocab), unk_id_(vocab.unk_id()), max_word_chars_(max_word_chars) {
    const auto prefix = Vocabulary::kContinuationPrefix;
    for (int32_t id = 0; id < vocab.size(); ++id) {
        const std::string_view entry = vocab.entry(id);
        initial_.insert(entry, id);
        if (entry.size() > prefix.size() && entry.substr(0, prefix.size()) == prefix) {
            continuation_.insert(entry.substr(prefix.size()), id);
        }
    }
}

bool WordPieceTokenizer::word_ids(std::string_view word, std::vector<int32_t>& out) const {
    if (word.empty() || word.find_first_of(" \t") != std::string_view::npos) {
        throw UsageError("tokenize_word requires a non-empty word without whitespace");
    }
    if (utf8_length(word) > static_cast<size_t>(max_word_chars_)) {
        out.push_back(unk_id_);
        return false;
    }
    const size_t mark = out.size();
    size_t pos = 0;
    bool first = true;
    while (pos < word.size()) {
        size_t len = 0;
        const int32_t id = (first ? initial_ : continuation_).longest_prefix(word.substr(pos), len);
        if (id < 0) {
            out.resize(mark);
            out.push_back(unk_id_);
            return false;
        }
        out.push_back(id);
        pos += len;
        first = false;
    }
    return true;
}

bool WordPieceTokenizer::continuation_ids(std::string_view content, std::vector<int32_t>& out) const {
    if (content.empty()) return false;
    const size_t mark = out.size();
    size_t pos = 0;
    while (pos < content.size()) {
        size_t len = 0;
        const int32_t id = continuation_.longest_prefix(content.substr(pos), len);
        if (id < 0) {
            out.resize(mark);
            return false;
        }
        out.push_back(id);
        pos += len;
    }
    return true;
}

Tokenization WordPieceTokenizer::tokenize_word(std::string_view word) const {
    Tokenization result;
    result.is_unk = !word_ids(word, result.ids);
    result.pieces.reserve(result.ids.size());
    for (const int32_t id : result.ids) {
        result.pieces.emplace_back(vocab_->entry(id));
    }
    return result;
}

std::vector<Tokenization> tokenize_sentence(std::string_view sentence,
                                            const WordPieceTokenizer& tokenizer,
                                            const NormalizationConfig& config) {
    std::vector<Tokenization> result;
    for (const std::string& word : normalize_and_split(sentence, config)) {
        result.push_back(tokenizer.tokenize_word(word));
    }
    return result;
}

void SubwordCounts::merge(const SubwordCounts& other) {
    if (by_id.size() < other.by_id.size()) by_id.resize(other.by_id.size(), 0);
    for (size_t i = 0; i < other.by_id.size(); ++i) by_id[i] += other.by_id[i];
    total += other.total;
    sentences += other.sentences;
}

std::unordered_map<std::string, uint64_t> SubwordCounts::to_map(const Vocabulary& vocab) const {
    std::unordered_map<std::string, uint64_t> map;
    for (size_t id = 0; id < by_id.size(); ++id) {
        if (by_id[id] > 0) map.emplace(vocab.entry(static_cast<int32_t>(id)), by_id[id]);
    }
    return map;
}

namespace {

struct TokenizeAcc {
    SubwordCounts counts;
    std::vector<int32_t> sentence_ids;  // reused buffer
};

void tokenize_block(TokenizeAcc& acc, std::span<const std::string> lines,
                    const WordPieceTokenizer& tokenizer, const CorpusOptions& options,
                    const SentenceSink& per_sentence) {
    auto& by_id = acc.counts.by_id;
    if (by_id.empty()) by_id.assign(static_cast<size_t>(tokenizer.vocab().size()), 0);
    for (const std::string& line : lines) {
        const std::vector<std::string> words = normalize_and_split(line, options.norm);
        if (words.empty()) continue;
        if (options.min_words > 0 && words.size() < options.min_words) continue;
        acc.sentence_ids.clear();
        for (const std::string& word : words) {
            tokenizer.word_ids(word, acc.sentence_ids);
        }
        for (const int32_t id : acc.sentence_ids) {
            ++by_id[static_cast<size_t>(id)];
        }
        acc.counts.total += acc.sentence_ids.size();
        acc.counts.sentences += 1;
        if (per_sentence) per_sentence(acc.sentence_ids);
    }
}

}  // namespace

SubwordCounts tokenize_corpus(LineReader& corpus, const WordPieceTokenizer& tokenizer,
                              const CorpusOptions& options, int threads,
                              const SentenceSink& per_sentence) {
    if (per_sentence) threads = 1;  // sink sees sentences in corpus order
    std::vector<TokenizeAcc> partials(static_cast<size_t>(std::max(threads, 1)));
    process_line_blocks(corpus, threads, 2048, [&](int worker, const LineBlock& block) {
        tokenize_block(partials[static_cast<size_t>(worker)], block.lines, tokenizer, options,
                       per_sentence);
    });
    SubwordCounts result;
    result.by_id.assign(static_cast<size_t>(tokenizer.vocab().size()), 0);
    for (const auto& partial : partials) result.merge(partial.counts);
    return result;
}

SubwordCounts tokenize_corpus(std::span<const std::string> lines,
                              const WordPieceTokenizer& tokenizer, const CorpusOptions& options,
                              int threads, const SentenceSink& per_sentence) {
    if (per_sentence) threads = 1;
    std::vector<TokenizeAcc> partials(static_cast<size_t>(std::max(threads, 1)));
    parallel_ranges(lines.size(), threads, [&](size_t begin, size_t end, int worker) {
        tokenize_block(partials[static_cast<size_t>(worker)], lines.subspan(begin, end - begin),
                       tokenizer, options, per_sentence);
    });
    SubwordCounts result;
    result.by_id.assign(static_cast<size_t>(tokenizer.vocab().size()), 0);
    for (const auto& partial : partials) result.merge(partial.counts);
    return result;
}

}  // namespace subvoc
