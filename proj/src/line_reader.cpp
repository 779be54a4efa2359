#include "subvoc/line_reader.hpp"

#include <zlib.h>

#include <fstream>
#include <iostream>

#include "subvoc/error.hpp"

namespace subvoc {

namespace {

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

class IstreamLineReader final : public LineReader {
public:
    IstreamLineReader(std::istream& in, std::string name) : in_(in) { source_ = std::move(name); }

    bool next(std::string& line) override {
        if (!std::getline(in_, line)) {
            if (in_.bad()) {
                throw IoError("read failed on " + source_ + " after line " + std::to_string(line_number_));
            }
            return false;
        }
        strip_cr(line);
        ++line_number_;
        return true;
    }

private:
    std::istream& in_;
};

class FileLineReader final : public LineReader {
public:
    explicit FileLineReader(const std::string& path) : file_(path, std::ios::binary) {
        source_ = path;
        if (!file_) throw IoError("cannot open " + path);
    }

    bool next(std::string& line) override {
        if (!std::getline(file_, line)) {
            if (file_.bad()) {
                throw IoError("read failed on " + source_ + " after line " + std::to_string(line_number_));
            }
            return false;
        }
        strip_cr(line);
        ++line_number_;
        return true;
    }

private:
    std::ifstream file_;
};

class GzipLineReader final : public LineReader {
public:
    explicit GzipLineReader(const std::string& path) {
        source_ = path;
        file_ = gzopen(path.c_str(), "rb");
        if (file_ == nullptr) throw IoError("cannot open " + path);
        buffer_.resize(1 << 16);
    }

    ~GzipLineReader() override {
        if (file_ != nullptr) gzclose(file_);
    }

    bool next(std::string& line) override {
        line.clear();
        while (true) {
            while (pos_ < fill_) {
                const char c = buffer_[pos_++];
                if (c == '\n') {
                    strip_cr(line);
                    ++line_number_;
                    return true;
                }
                line.push_back(c);
            }
            const int got = gzread(file_, buffer_.data(), static_cast<unsigned>(buffer_.size()));
            if (got < 0) {
                int errnum = 0;
                const char* msg = gzerror(file_, &errnum);
                throw IoError("gzip read failed on " + source_ + " after line " +
                              std::to_string(line_number_) + ": " + (msg != nullptr ? msg : "unknown"));
            }
            if (got == 0) {
                // Truncated gzip streams end without Z_STREAM_END; surface that.
                int errnum = 0;
                gzerror(file_, &errnum);
                if (errnum == Z_BUF_ERROR || errnum == Z_DATA_ERROR) {
                    throw IoError("truncated gzip stream in " + source_ + " after line " +
                                  std::to_string(line_number_));
                }
                if (line.empty()) return false;
                strip_cr(line);
                ++line_number_;
                return true;
            }
            pos_ = 0;
            fill_ = static_cast<size_t>(got);
        }
    }

private:
    gzFile file_ = nullptr;
    std::vector<char> buffer_;
    size_t pos_ = 0;
    size_t fill_ = 0;
};

class ChainLineReader final : public LineReader {
public:
    explicit ChainLineReader(std::vector<std::unique_ptr<LineReader>> readers)
        : readers_(std::move(readers)) {
        source_ = readers_.empty() ? "<empty>" : readers_.front()->source();
    }

    bool next(std::string& line) override {
        while (index_ < readers_.size()) {
            if (readers_[index_]->next(line)) {
                source_ = readers_[index_]->source();
                ++line_number_;
                return true;
            }
            ++index_;
        }
        return false;
    }

private:
    std::vector<std::unique_ptr<LineReader>> readers_;
    size_t index_ = 0;
};

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::unique_ptr<LineReader> open_lines(const std::string& path) {
    if (path == "-") return std::make_unique<IstreamLineReader>(std::cin, "<stdin>");
    if (ends_with(path, ".gz")) return std::make_unique<GzipLineReader>(path);
    return std::make_unique<FileLineReader>(path);
}

std::unique_ptr<LineReader> chain_lines(std::vector<std::unique_ptr<LineReader>> readers) {
    return std::make_unique<ChainLineReader>(std::move(readers));
}

bool StringLineReader::next(std::string& line) {
    if (pos_ >= text_.size()) return false;
    const size_t nl = text_.find('\n', pos_);
    if (nl == std::string::npos) {
        line.assign(text_, pos_, text_.size() - pos_);
        pos_ = text_.size();
    } else {
        line.assign(text_, pos_, nl - pos_);
        pos_ = nl + 1;
    }
    strip_cr(line);
    ++line_number_;
    return true;
}

}  // namespace subvoc
