#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "subvoc/line_reader.hpp"

namespace subvoc {

// Default worker count: SUBVOC_THREADS when set, otherwise 1.
int default_thread_count();

struct LineBlock {
    uint64_t first_line = 0;  // 1-based line number of lines.front()
    std::vector<std::string> lines;
};

// Streams fixed-size line blocks to `threads` workers. Workers receive a
// stable index in [0, threads) for addressing per-worker accumulators.
// Blocks are cut every `block_lines` lines regardless of the worker count,
// so any shard-merge over associative integer accumulators is reproducible
// for every thread count. The first worker exception is rethrown after all
// workers join.
void process_line_blocks(LineReader& reader, int threads, size_t block_lines,
                         const std::function<void(int worker, const LineBlock& block)>& fn);

// Splits [0, total) into one contiguous range per worker.
void parallel_ranges(size_t total, int threads,
                     const std::function<void(size_t begin, size_t end, int worker)>& fn);

}  // namespace subvoc
