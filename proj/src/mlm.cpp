#include "subvoc/mlm.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "subvoc/error.hpp"
#include "subvoc/rng.hpp"

namespace subvoc {

MaskedInstance mask_tokens(std::span<const int32_t> ids, const Vocabulary& vocab, double rate,
                           uint64_t seed, MaskMode mode) {
    if (rate < 0.0 || rate > 1.0) throw UsageError("mask rate must be within [0, 1]");

    MaskedInstance instance;
    instance.input_ids.assign(ids.begin(), ids.end());
    instance.labels.assign(ids.size(), MaskedInstance::kIgnoreLabel);

    std::vector<int32_t> maskable;
    maskable.reserve(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) {
        const int32_t id = ids[i];
        if (id < 0 || id >= vocab.size()) {
            throw DataError("token id " + std::to_string(id) + " is outside the vocabulary");
        }
        if (!vocab.is_special(id)) maskable.push_back(static_cast<int32_t>(i));
    }

    const auto k = static_cast<size_t>(
        std::llround(rate * static_cast<double>(maskable.size())));
    if (k == 0) return instance;

    const int32_t mask_id = [&] {
        if (auto id = vocab.mask_id()) return *id;
        throw DataError("vocabulary has no " + std::string(Vocabulary::kMaskToken) + " token");
    }();

    // Partial Fisher-Yates: the first k slots end up a uniform sample.
    Rng rng(seed);
    for (size_t i = 0; i < k; ++i) {
        const size_t j = i + rng.below(maskable.size() - i);
        std::swap(maskable[i], maskable[j]);
    }
    instance.mask_positions.assign(maskable.begin(), maskable.begin() + static_cast<long>(k));
    std::sort(instance.mask_positions.begin(), instance.mask_positions.end());

    // Replacement pool for the 10%-random branch: any non-special token.
    std::vector<int32_t> pool;
    if (mode == MaskMode::bert_80_10_10) {
        pool.reserve(static_cast<size_t>(vocab.size()));
        for (int32_t id = 0; id < vocab.size(); ++id) {
            if (!vocab.is_special(id)) pool.push_back(id);
        }
    }

    for (const int32_t pos : instance.mask_positions) {
        const auto p = static_cast<size_t>(pos);
        instance.labels[p] = instance.input_ids[p];
        if (mode == MaskMode::pure_mask) {
            instance.input_ids[p] = mask_id;
            continue;
        }
        const uint64_t draw = rng.below(10);
        if (draw < 8) {
            instance.input_ids[p] = mask_id;
        } else if (draw == 8 && !pool.empty()) {
            instance.input_ids[p] = pool[rng.below(pool.size())];
        }
        // draw == 9: keep the original token.
    }
    return instance;
}

void write_masked_instance(std::ostream& out, const MaskedInstance& instance) {
    const auto emit = [&out](std::span<const int32_t> values) {
        for (size_t i = 0; i < values.size(); ++i) {
            if (i > 0) out << ' ';
            out << values[i];
        }
    };
    emit(instance.input_ids);
    out << '\t';
    emit(instance.labels);
    out << '\t';
    emit(instance.mask_positions);
    out << '\n';
}

}  // namespace subvoc
