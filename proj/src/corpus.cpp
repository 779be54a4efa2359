#include "subvoc/corpus.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "subvoc/error.hpp"
#include "subvoc/rng.hpp"
#include "subvoc/threading.hpp"

namespace subvoc {

namespace {

constexpr size_t kBlockLines = 4096;

// Accumulates one block of lines into `acc`.
void count_block(TokenCounts& acc, std::span<const std::string> lines, const CorpusOptions& options) {
    for (const std::string& line : lines) {
        std::vector<std::string> tokens = normalize_and_split(line, options.norm);
        if (tokens.empty()) continue;
        if (options.min_words > 0 && tokens.size() < options.min_words) continue;
        acc.total_sentences += 1;
        acc.total_tokens += tokens.size();
        for (std::string& token : tokens) {
            ++acc.counts[std::move(token)];
        }
    }
}

}  // namespace

void TokenCounts::add(const std::string& token, uint64_t n) {
    counts[token] += n;
    total_tokens += n;
}

void TokenCounts::merge(TokenCounts&& other) {
    if (counts.empty()) {
        counts = std::move(other.counts);
    } else {
        for (auto& [token, count] : other.counts) {
            counts[token] += count;
        }
    }
    total_tokens += other.total_tokens;
    total_sentences += other.total_sentences;
}

TokenCounts count_tokens(LineReader& corpus, const CorpusOptions& options, int threads) {
    std::vector<TokenCounts> partials(static_cast<size_t>(std::max(threads, 1)));
    process_line_blocks(corpus, threads, kBlockLines, [&](int worker, const LineBlock& block) {
        count_block(partials[static_cast<size_t>(worker)], block.lines, options);
    });
    TokenCounts result;
    for (auto& partial : partials) result.merge(std::move(partial));
    return result;
}

TokenCounts count_tokens(std::span<const std::string> lines, const CorpusOptions& options,
                         int threads) {
    std::vector<TokenCounts> partials(static_cast<size_t>(std::max(threads, 1)));
    parallel_ranges(lines.size(), threads, [&](size_t begin, size_t end, int worker) {
        count_block(partials[static_cast<size_t>(worker)], lines.subspan(begin, end - begin), options);
    });
    TokenCounts result;
    for (auto& partial : partials) result.merge(std::move(partial));
    return result;
}

void write_token_counts(std::ostream& out, const TokenCounts& counts) {
    std::vector<std::pair<std::string_view, uint64_t>> rows;
    rows.reserve(counts.counts.size());
    for (const auto& [token, count] : counts.counts) rows.emplace_back(token, count);
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    for (const auto& [token, count] : rows) {
        out << token << '\t' << count << '\n';
    }
}

TokenCounts read_token_counts(LineReader& in) {
    TokenCounts counts;
    std::string line;
    while (in.next(line)) {
        if (line.empty()) continue;
        const size_t tab = line.rfind('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
            throw FormatError("malformed count line " + std::to_string(in.line_number()) + " in " +
                              in.source());
        }
        uint64_t count = 0;
        for (size_t i = tab + 1; i < line.size(); ++i) {
            if (line[i] < '0' || line[i] > '9') {
                throw FormatError("malformed count at line " + std::to_string(in.line_number()) +
                                  " in " + in.source());
            }
            count = count * 10 + static_cast<uint64_t>(line[i] - '0');
        }
        counts.add(line.substr(0, tab), count);
    }
    counts.total_sentences = 0;  // not recoverable from the count file
    return counts;
}

CorpusSample sample_sentences(LineReader& corpus, uint64_t n, uint64_t seed,
                              const CorpusOptions& options) {
    CorpusSample sample;
    sample.seed = seed;

    // Classic reservoir (Algorithm R) over (line index, normalized text);
    // the reservoir is re-sorted by line index at the end so the sample is
    // a subsequence of the corpus.
    std::vector<std::pair<uint64_t, std::string>> reservoir;
    reservoir.reserve(std::min<uint64_t>(n, 1 << 20));
    Rng rng(seed);
    uint64_t eligible = 0;
    std::string line;
    while (corpus.next(line)) {
        std::string joined = normalize_join(line, options.norm);
        if (joined.empty()) continue;
        if (options.min_words > 0) {
            const size_t words =
                1 + static_cast<size_t>(std::count(joined.begin(), joined.end(), ' '));
            if (words < options.min_words) continue;
        }
        const uint64_t index = eligible++;
        if (n == 0) continue;
        if (index < n) {
            reservoir.emplace_back(index, std::move(joined));
        } else {
            const uint64_t j = rng.below(index + 1);
            if (j < n) reservoir[j] = {index, std::move(joined)};
        }
    }
    sample.source_size = eligible;
    std::sort(reservoir.begin(), reservoir.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    sample.sentences.reserve(reservoir.size());
    for (auto& [index, sentence] : reservoir) sample.sentences.push_back(std::move(sentence));
    return sample;
}

}  // namespace subvoc
