#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "subvoc/vocabulary.hpp"

namespace subvoc {

enum class MaskMode {
    pure_mask,      // every selected position becomes [MASK]
    bert_80_10_10,  // 80% [MASK], 10% random token, 10% kept
};

// One masked training sequence. labels carry the original id at masked
// positions and kIgnoreLabel elsewhere; applying labels back onto input_ids
// at mask_positions reconstructs the original sequence.
struct MaskedInstance {
    static constexpr int32_t kIgnoreLabel = -100;

    std::vector<int32_t> input_ids;
    std::vector<int32_t> labels;
    std::vector<int32_t> mask_positions;  // sorted ascending
};

// Selects round(rate * maskable) non-special positions uniformly without
// replacement using the seed, then applies the mode. Special tokens are
// never masked; a sequence of only special tokens yields zero masks.
// Identical (ids, rate, seed, mode) always produce identical output; use
// derive_seed(global_seed, sequence_index) for parallel generation.
MaskedInstance mask_tokens(std::span<const int32_t> ids, const Vocabulary& vocab, double rate,
                           uint64_t seed, MaskMode mode = MaskMode::pure_mask);

// "ids<TAB>labels<TAB>positions", each field space-separated.
void write_masked_instance(std::ostream& out, const MaskedInstance& instance);

}  // namespace subvoc
