#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "subvoc/vocabulary.hpp"

namespace subvoc {

// Dense V x d matrix of float32 rows aligned one-to-one with vocabulary
// ids. All values are finite.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    EmbeddingMatrix(uint32_t rows, uint32_t cols)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0F) {}

    uint32_t rows() const { return rows_; }
    uint32_t cols() const { return cols_; }

    std::span<const float> row(uint32_t i) const {
        return {data_.data() + static_cast<size_t>(i) * cols_, cols_};
    }
    std::span<float> row(uint32_t i) {
        return {data_.data() + static_cast<size_t>(i) * cols_, cols_};
    }
    const std::vector<float>& data() const { return data_; }

    bool same_shape(const EmbeddingMatrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    uint32_t rows_ = 0;
    uint32_t cols_ = 0;
    std::vector<float> data_;
};

enum class EmbeddingFormat {
    text,    // first line "V d", then V lines of d decimal reals
    binary,  // magic "ADLM", version 1, V and d as u32 LE, row-major f32 LE
};

// Format auto-detected from the leading magic bytes. Dimension or value
// errors carry the offending location.
EmbeddingMatrix read_embeddings(const std::string& path);
void write_embeddings(const EmbeddingMatrix& matrix, const std::string& path,
                      EmbeddingFormat format);

// Expanded-vocabulary initialization: rows [0, base) are copied unchanged;
// each new token's row is the arithmetic mean (accumulated in double) of
// the rows of its segmentation under base_vocab. Continuation-form tokens
// ("##...") are segmented in continuation mode. Unmatchable tokens copy the
// [UNK] row.
EmbeddingMatrix expand_embeddings(const EmbeddingMatrix& base, const Vocabulary& base_vocab,
                                  const Vocabulary& expanded_vocab, int threads = 1);

struct DriftGroupStats {
    uint64_t count = 0;
    double mean = 0.0;
    double max = 0.0;
    double fraction_above = 0.0;
};

// Per-token L2 distance between two equally shaped matrices, with summary
// statistics for all rows and for the original (id < base_size) vs expanded
// (id >= base_size) groups.
struct DriftReport {
    std::vector<double> distances;  // one per vocabulary id
    double threshold = 0.0;
    DriftGroupStats all;
    DriftGroupStats original;
    DriftGroupStats expanded;
};

DriftReport embedding_drift(const EmbeddingMatrix& before, const EmbeddingMatrix& after,
                            const Vocabulary& vocab, double threshold);

void write_drift_report(std::ostream& out, const DriftReport& report, const Vocabulary& vocab);

}  // namespace subvoc
