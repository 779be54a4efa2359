#include "subvoc/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>

#include "subvoc/error.hpp"
#include "subvoc/threading.hpp"
#include "subvoc/wordpiece.hpp"

namespace subvoc {

namespace {

// The binary format is little-endian; float payloads are memcpy'd.
static_assert(std::endian::native == std::endian::little);

constexpr char kMagic[4] = {'A', 'D', 'L', 'M'};
constexpr unsigned char kVersion = 1;

void put_u32_le(std::string& out, uint32_t value) {
    out.push_back(static_cast<char>(value & 0xFF));
    out.push_back(static_cast<char>((value >> 8) & 0xFF));
    out.push_back(static_cast<char>((value >> 16) & 0xFF));
    out.push_back(static_cast<char>((value >> 24) & 0xFF));
}

uint32_t get_u32_le(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

EmbeddingMatrix read_binary(const std::string& path, const std::string& bytes) {
    if (bytes.size() < 13) {
        throw FormatError(path + ": truncated header (" + std::to_string(bytes.size()) +
                          " bytes, need 13)");
    }
    if (static_cast<unsigned char>(bytes[4]) != kVersion) {
        throw FormatError(path + ": unsupported version byte at offset 4");
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const uint32_t rows = get_u32_le(p + 5);
    const uint32_t cols = get_u32_le(p + 9);
    const size_t expected = 13 + static_cast<size_t>(rows) * cols * 4;
    if (bytes.size() != expected) {
        throw FormatError(path + ": payload is " + std::to_string(bytes.size()) + " bytes, header " +
                          std::to_string(rows) + "x" + std::to_string(cols) + " implies " +
                          std::to_string(expected));
    }
    EmbeddingMatrix matrix(rows, cols);
    for (uint32_t r = 0; r < rows; ++r) {
        auto row = matrix.row(r);
        std::memcpy(row.data(), bytes.data() + 13 + static_cast<size_t>(r) * cols * 4,
                    static_cast<size_t>(cols) * 4);
        for (uint32_t c = 0; c < cols; ++c) {
            if (!std::isfinite(row[c])) {
                throw FormatError(path + ": non-finite value at row " + std::to_string(r) +
                                  " column " + std::to_string(c));
            }
        }
    }
    return matrix;
}

EmbeddingMatrix read_text(const std::string& path, const std::string& bytes) {
    StringLineReader reader(bytes);
    std::string line;
    if (!reader.next(line)) throw FormatError(path + ": empty file");
    uint64_t rows = 0;
    uint64_t cols = 0;
    if (std::sscanf(line.c_str(), "%lu %lu", &rows, &cols) != 2) {
        throw FormatError(path + ": header must be \"V d\", got \"" + line + "\"");
    }
    if (rows > 0xFFFFFFFFULL || cols > 0xFFFFFFFFULL) {
        throw FormatError(path + ": dimensions out of range");
    }
    EmbeddingMatrix matrix(static_cast<uint32_t>(rows), static_cast<uint32_t>(cols));
    for (uint64_t r = 0; r < rows; ++r) {
        if (!reader.next(line)) {
            throw FormatError(path + ": header promises " + std::to_string(rows) +
                              " rows but data ends after row " + std::to_string(r));
        }
        auto row = matrix.row(static_cast<uint32_t>(r));
        const char* cursor = line.c_str();
        for (uint64_t c = 0; c < cols; ++c) {
            char* end = nullptr;
            const double value = std::strtod(cursor, &end);
            if (end == cursor) {
                throw FormatError(path + ": non-numeric field at row " + std::to_string(r) +
                                  " column " + std::to_string(c));
            }
            if (!std::isfinite(value)) {
                throw FormatError(path + ": non-finite value at row " + std::to_string(r) +
                                  " column " + std::to_string(c));
            }
            row[c] = static_cast<float>(value);
            cursor = end;
        }
        while (*cursor == ' ' || *cursor == '\t') ++cursor;
        if (*cursor != '\0') {
            throw FormatError(path + ": trailing data at row " + std::to_string(r));
        }
    }
    if (reader.next(line) && !line.empty()) {
        throw FormatError(path + ": extra rows past the " + std::to_string(rows) + " promised");
    }
    return matrix;
}

}  // namespace

EmbeddingMatrix read_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed on " + path);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) {
        return read_binary(path, bytes);
    }
    return read_text(path, bytes);
}

void write_embeddings(const EmbeddingMatrix& matrix, const std::string& path,
                      EmbeddingFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    if (format == EmbeddingFormat::binary) {
        std::string header(kMagic, 4);
        header.push_back(static_cast<char>(kVersion));
        put_u32_le(header, matrix.rows());
        put_u32_le(header, matrix.cols());
        out.write(header.data(), static_cast<std::streamsize>(header.size()));
        // float32 little-endian row-major; host is little-endian.
        out.write(reinterpret_cast<const char*>(matrix.data().data()),
                  static_cast<std::streamsize>(matrix.data().size() * 4));
    } else {
        out << matrix.rows() << ' ' << matrix.cols() << '\n';
        char buffer[48];
        for (uint32_t r = 0; r < matrix.rows(); ++r) {
            const auto row = matrix.row(r);
            for (uint32_t c = 0; c < matrix.cols(); ++c) {
                // %.9g round-trips float32 exactly.
                std::snprintf(buffer, sizeof(buffer), "%.9g", static_cast<double>(row[c]));
                if (c > 0) out << ' ';
                out << buffer;
            }
            out << '\n';
        }
    }
    out.flush();
    if (!out) throw IoError("write failed on " + path);
}

EmbeddingMatrix expand_embeddings(const EmbeddingMatrix& base, const Vocabulary& base_vocab,
                                  const Vocabulary& expanded_vocab, int threads) {
    if (base.rows() != static_cast<uint32_t>(base_vocab.size())) {
        throw DataError("embedding matrix has " + std::to_string(base.rows()) +
                        " rows but the base vocabulary has " + std::to_string(base_vocab.size()) +
                        " entries");
    }
    if (expanded_vocab.size() < base_vocab.size()) {
        throw DataError("expanded vocabulary is smaller than the base vocabulary");
    }
    for (int32_t id = 0; id < base_vocab.size(); ++id) {
        if (expanded_vocab.entry(id) != base_vocab.entry(id)) {
            throw DataError("expanded vocabulary diverges from the base vocabulary at id " +
                            std::to_string(id) + " (\"" + std::string(expanded_vocab.entry(id)) +
                            "\" vs \"" + std::string(base_vocab.entry(id)) + "\")");
        }
    }

    const uint32_t cols = base.cols();
    const auto base_rows = static_cast<uint32_t>(base_vocab.size());
    EmbeddingMatrix out(static_cast<uint32_t>(expanded_vocab.size()), cols);
    std::copy(base.data().begin(), base.data().end(), out.row(0).data());

    const WordPieceTokenizer tokenizer(base_vocab);
    const auto unk = static_cast<uint32_t>(base_vocab.unk_id());
    const size_t new_tokens = static_cast<size_t>(expanded_vocab.size()) - base_rows;

    parallel_ranges(new_tokens, threads, [&](size_t begin, size_t end, int /*worker*/) {
        std::vector<int32_t> pieces;
        std::vector<double> sum(cols);
        for (size_t k = begin; k < end; ++k) {
            const auto id = static_cast<uint32_t>(base_rows + k);
            const std::string_view token = expanded_vocab.entry(static_cast<int32_t>(id));
            pieces.clear();
            bool matched = false;
            if (Vocabulary::is_continuation(token)) {
                matched = tokenizer.continuation_ids(
                    token.substr(Vocabulary::kContinuationPrefix.size()), pieces);
            } else {
                matched = tokenizer.word_ids(token, pieces) && !pieces.empty();
            }
            auto row = out.row(id);
            if (!matched) {
                const auto src = base.row(unk);
                std::copy(src.begin(), src.end(), row.begin());
                continue;
            }
            std::fill(sum.begin(), sum.end(), 0.0);
            for (const int32_t piece : pieces) {
                const auto src = base.row(static_cast<uint32_t>(piece));
                for (uint32_t c = 0; c < cols; ++c) sum[c] += static_cast<double>(src[c]);
            }
            const auto n = static_cast<double>(pieces.size());
            for (uint32_t c = 0; c < cols; ++c) row[c] = static_cast<float>(sum[c] / n);
        }
    });
    return out;
}

namespace {

DriftGroupStats group_stats(std::span<const double> distances, double threshold) {
    DriftGroupStats stats;
    stats.count = distances.size();
    if (distances.empty()) return stats;
    double sum = 0.0;
    uint64_t above = 0;
    for (const double d : distances) {
        sum += d;
        stats.max = std::max(stats.max, d);
        if (d > threshold) ++above;
    }
    stats.mean = sum / static_cast<double>(distances.size());
    stats.fraction_above = static_cast<double>(above) / static_cast<double>(distances.size());
    return stats;
}

}  // namespace

DriftReport embedding_drift(const EmbeddingMatrix& before, const EmbeddingMatrix& after,
                            const Vocabulary& vocab, double threshold) {
    if (!before.same_shape(after)) {
        throw DataError("drift requires equal shapes, got " + std::to_string(before.rows()) + "x" +
                        std::to_string(before.cols()) + " vs " + std::to_string(after.rows()) + "x" +
                        std::to_string(after.cols()));
    }
    if (before.rows() != static_cast<uint32_t>(vocab.size())) {
        throw DataError("matrix has " + std::to_string(before.rows()) +
                        " rows but the vocabulary has " + std::to_string(vocab.size()) + " entries");
    }
    DriftReport report;
    report.threshold = threshold;
    report.distances.resize(before.rows());
    for (uint32_t r = 0; r < before.rows(); ++r) {
        const auto a = before.row(r);
        const auto b = after.row(r);
        double sq = 0.0;
        for (uint32_t c = 0; c < before.cols(); ++c) {
            const double diff = static_cast<double>(a[c]) - static_cast<double>(b[c]);
            sq += diff * diff;
        }
        report.distances[r] = std::sqrt(sq);
    }
    const auto base = static_cast<size_t>(std::min<int32_t>(vocab.base_size(), vocab.size()));
    const std::span<const double> all(report.distances);
    report.all = group_stats(all, threshold);
    report.original = group_stats(all.subspan(0, base), threshold);
    report.expanded = group_stats(all.subspan(base), threshold);
    return report;
}

void write_drift_report(std::ostream& out, const DriftReport& report, const Vocabulary& vocab) {
    char buffer[64];
    const auto emit_group = [&](const char* name, const DriftGroupStats& stats) {
        out << "# " << name << "\tcount\t" << stats.count;
        std::snprintf(buffer, sizeof(buffer), "%.12g", stats.mean);
        out << "\tmean\t" << buffer;
        std::snprintf(buffer, sizeof(buffer), "%.12g", stats.max);
        out << "\tmax\t" << buffer;
        std::snprintf(buffer, sizeof(buffer), "%.12g", stats.fraction_above);
        out << "\tfraction_above\t" << buffer << '\n';
    };
    std::snprintf(buffer, sizeof(buffer), "%.12g", report.threshold);
    out << "# threshold\t" << buffer << '\n';
    emit_group("all", report.all);
    emit_group("original", report.original);
    emit_group("expanded", report.expanded);
    for (size_t id = 0; id < report.distances.size(); ++id) {
        std::snprintf(buffer, sizeof(buffer), "%.12g", report.distances[id]);
        out << vocab.entry(static_cast<int32_t>(id)) << '\t' << buffer << '\n';
    }
}

}  // namespace subvoc
