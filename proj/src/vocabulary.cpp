#include "subvoc/vocabulary.hpp"

#include <fstream>
#include <ostream>

#include "subvoc/error.hpp"
#include "subvoc/line_reader.hpp"

namespace subvoc {

Vocabulary Vocabulary::from_entries(std::vector<std::string> entries, int64_t base_size) {
    Vocabulary vocab;
    vocab.entries_ = std::move(entries);
    vocab.index_.reserve(vocab.entries_.size());
    for (size_t i = 0; i < vocab.entries_.size(); ++i) {
        const std::string& token = vocab.entries_[i];
        if (token.empty()) {
            throw DataError("empty vocabulary entry at id " + std::to_string(i));
        }
        auto [it, inserted] = vocab.index_.emplace(token, static_cast<int32_t>(i));
        if (!inserted) {
            throw DataError("duplicate vocabulary entry \"" + token + "\" (ids " +
                            std::to_string(it->second) + " and " + std::to_string(i) + ")");
        }
    }
    const auto n = static_cast<int64_t>(vocab.entries_.size());
    if (base_size < 0) base_size = n;
    if (base_size > n) {
        throw DataError("base_size " + std::to_string(base_size) + " exceeds vocabulary size " +
                        std::to_string(n));
    }
    vocab.base_size_ = static_cast<int32_t>(base_size);
    return vocab;
}

Vocabulary Vocabulary::load(const std::string& path, int64_t base_size) {
    auto reader = open_lines(path);
    std::vector<std::string> entries;
    std::unordered_map<std::string, uint64_t> seen;
    std::string line;
    while (reader->next(line)) {
        if (line.empty()) {
            throw FormatError(path + ": empty token at line " + std::to_string(reader->line_number()));
        }
        auto [it, inserted] = seen.emplace(line, reader->line_number());
        if (!inserted) {
            throw FormatError(path + ": duplicate token \"" + line + "\" at lines " +
                              std::to_string(it->second) + " and " +
                              std::to_string(reader->line_number()));
        }
        entries.push_back(line);
    }
    if (seen.find(std::string(kUnkToken)) == seen.end()) {
        throw FormatError(path + ": vocabulary is missing " + std::string(kUnkToken));
    }
    return from_entries(std::move(entries), base_size);
}

void Vocabulary::write(std::ostream& out) const {
    for (const std::string& token : entries_) {
        out << token << '\n';
    }
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    write(out);
    out.flush();
    if (!out) throw IoError("write failed on " + path);
}

std::optional<int32_t> Vocabulary::find(std::string_view token) const {
    const auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int32_t Vocabulary::unk_id() const {
    if (auto id = find(kUnkToken)) return *id;
    throw DataError("vocabulary has no " + std::string(kUnkToken) + " token");
}

bool Vocabulary::is_special_token(std::string_view token) {
    return token.size() >= 3 && token.front() == '[' && token.back() == ']';
}

}  // namespace subvoc
