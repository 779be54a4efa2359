#include "subvoc/threading.hpp"

#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <exception>
#include <mutex>
#include <thread>

namespace subvoc {

int default_thread_count() {
    if (const char* env = std::getenv("SUBVOC_THREADS"); env != nullptr) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

namespace {

// Bounded producer/consumer queue of line blocks.
class BlockQueue {
public:
    explicit BlockQueue(size_t capacity) : capacity_(capacity) {}

    void push(LineBlock block) {
        std::unique_lock lock(mutex_);
        not_full_.wait(lock, [&] { return queue_.size() < capacity_ || aborted_; });
        if (aborted_) return;
        queue_.push_back(std::move(block));
        not_empty_.notify_one();
    }

    bool pop(LineBlock& block) {
        std::unique_lock lock(mutex_);
        not_empty_.wait(lock, [&] { return !queue_.empty() || closed_ || aborted_; });
        if (aborted_ || queue_.empty()) return false;
        block = std::move(queue_.front());
        queue_.pop_front();
        not_full_.notify_one();
        return true;
    }

    void close() {
        std::lock_guard lock(mutex_);
        closed_ = true;
        not_empty_.notify_all();
    }

    void abort() {
        std::lock_guard lock(mutex_);
        aborted_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

private:
    std::mutex mutex_;
    std::condition_variable not_full_;
    std::condition_variable not_empty_;
    std::deque<LineBlock> queue_;
    size_t capacity_;
    bool closed_ = false;
    bool aborted_ = false;
};

}  // namespace

void process_line_blocks(LineReader& reader, int threads, size_t block_lines,
                         const std::function<void(int, const LineBlock&)>& fn) {
    if (block_lines == 0) block_lines = 1;
    if (threads <= 1) {
        LineBlock block;
        block.first_line = 1;
        std::string line;
        while (reader.next(line)) {
            block.lines.push_back(std::move(line));
            if (block.lines.size() >= block_lines) {
                fn(0, block);
                block.first_line += block.lines.size();
                block.lines.clear();
            }
        }
        if (!block.lines.empty()) fn(0, block);
        return;
    }

    BlockQueue queue(static_cast<size_t>(threads) * 2);
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto record_error = [&] {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        queue.abort();
    };

    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            LineBlock block;
            try {
                while (queue.pop(block)) fn(w, block);
            } catch (...) {
                record_error();
            }
        });
    }

    try {
        LineBlock block;
        block.first_line = 1;
        std::string line;
        while (reader.next(line)) {
            block.lines.push_back(std::move(line));
            if (block.lines.size() >= block_lines) {
                const uint64_t next_first = block.first_line + block.lines.size();
                queue.push(std::move(block));
                block = LineBlock{};
                block.first_line = next_first;
            }
        }
        if (!block.lines.empty()) queue.push(std::move(block));
    } catch (...) {
        record_error();
    }
    queue.close();
    for (auto& worker : workers) worker.join();
    if (first_error) std::rethrow_exception(first_error);
}

void parallel_ranges(size_t total, int threads,
                     const std::function<void(size_t, size_t, int)>& fn) {
    if (total == 0) return;
    if (threads <= 1 || total < 2) {
        fn(0, total, 0);
        return;
    }
    const size_t n = std::min<size_t>(static_cast<size_t>(threads), total);
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> workers;
    workers.reserve(n);
    const size_t chunk = (total + n - 1) / n;
    for (size_t w = 0; w < n; ++w) {
        const size_t begin = w * chunk;
        const size_t end = std::min(total, begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&, begin, end, w] {
            try {
                fn(begin, end, static_cast<int>(w));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& worker : workers) worker.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace subvoc
