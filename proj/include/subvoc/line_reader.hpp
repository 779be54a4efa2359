#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace subvoc {

// Sequential line source. next() strips the trailing newline (and a
// trailing carriage return). I/O failures raise IoError carrying the source
// name and the line number reached.
class LineReader {
public:
    virtual ~LineReader() = default;

    virtual bool next(std::string& line) = 0;

    // 1-based number of the last line delivered; 0 before the first.
    uint64_t line_number() const { return line_number_; }
    const std::string& source() const { return source_; }

protected:
    uint64_t line_number_ = 0;
    std::string source_ = "<memory>";
};

// Opens a file as a line stream. Names ending in ".gz" are decompressed on
// the fly; "-" reads standard input.
std::unique_ptr<LineReader> open_lines(const std::string& path);

// Concatenates several sources into one stream.
std::unique_ptr<LineReader> chain_lines(std::vector<std::unique_ptr<LineReader>> readers);

// In-memory reader over embedded newline-separated text (tests, samples).
class StringLineReader final : public LineReader {
public:
    explicit StringLineReader(std::string text) : text_(std::move(text)) {}

    bool next(std::string& line) override;

private:
    std::string text_;
    size_t pos_ = 0;
};

}  // namespace subvoc
