#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace subvoc {

// Ordered WordPiece vocabulary; the position of an entry is its token id.
// Entries [0, base_size) are the original general-domain vocabulary in
// original order, which keeps embedding rows aligned across expansion.
// Immutable after construction and safe to share across threads.
class Vocabulary {
public:
    static constexpr std::string_view kContinuationPrefix = "##";
    static constexpr std::string_view kUnkToken = "[UNK]";
    static constexpr std::string_view kMaskToken = "[MASK]";

    Vocabulary() = default;

    // Entries must be unique and non-empty. base_size < 0 means |entries|.
    static Vocabulary from_entries(std::vector<std::string> entries, int64_t base_size = -1);

    // One token per line, line index = id (BERT vocab.txt convention).
    // Rejects duplicates (naming both lines), empty lines, and files
    // missing [UNK].
    static Vocabulary load(const std::string& path, int64_t base_size = -1);

    void write(std::ostream& out) const;
    void save(const std::string& path) const;

    int32_t size() const { return static_cast<int32_t>(entries_.size()); }
    int32_t base_size() const { return base_size_; }
    std::string_view entry(int32_t id) const { return entries_[static_cast<size_t>(id)]; }
    std::span<const std::string> entries() const { return entries_; }

    std::optional<int32_t> find(std::string_view token) const;
    bool contains(std::string_view token) const { return find(token).has_value(); }

    // Throws DataError when the vocabulary has no [UNK].
    int32_t unk_id() const;
    std::optional<int32_t> mask_id() const { return find(kMaskToken); }

    // Bracketed tokens ("[UNK]", "[MASK]", "[CLS]", ...) are treated as
    // special: never masked and excludable from unigram statistics.
    static bool is_special_token(std::string_view token);
    bool is_special(int32_t id) const { return is_special_token(entry(id)); }

    static bool is_continuation(std::string_view token) {
        return token.size() > 2 && token.substr(0, 2) == kContinuationPrefix;
    }

private:
    struct StringHash {
        using is_transparent = void;
        size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
    };
    struct StringEq {
        using is_transparent = void;
        bool operator()(std::string_view a, std::string_view b) const { return a == b; }
    };

    std::vector<std::string> entries_;
    std::unordered_map<std::string, int32_t, StringHash, StringEq> index_;
    int32_t base_size_ = 0;
};

}  // namespace subvoc
