// subvoc: domain adaptation toolkit for WordPiece vocabularies.
//
// Subcommands cover the full pipeline: count/sample a domain corpus,
// expand the vocabulary with the occurrence-probability stopping rule,
// initialize embeddings for the new entries, generate masked-LM data, and
// produce the analysis reports. Exit codes: 0 success, 1 usage error,
// 2 data/format/io error. Diagnostics go to stderr, data to files or stdout.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "subvoc/analysis.hpp"
#include "subvoc/corpus.hpp"
#include "subvoc/embedding.hpp"
#include "subvoc/error.hpp"
#include "subvoc/expansion.hpp"
#include "subvoc/line_reader.hpp"
#include "subvoc/mlm.hpp"
#include "subvoc/rng.hpp"
#include "subvoc/threading.hpp"
#include "subvoc/unigram.hpp"
#include "subvoc/vocabulary.hpp"
#include "subvoc/wordpiece.hpp"

namespace {

constexpr const char* kVersion = "subvoc 1.0.0";

using namespace subvoc;

// Data sink that treats "-" as stdout and verifies the final flush.
class Output {
public:
    explicit Output(const std::string& path) : path_(path) {
        if (path == "-") {
            out_ = &std::cout;
            return;
        }
        file_.open(path, std::ios::binary);
        if (!file_) throw IoError("cannot write " + path);
        out_ = &file_;
    }

    std::ostream& stream() { return *out_; }

    void finish() {
        out_->flush();
        if (!*out_) throw IoError("write failed on " + path_);
    }

private:
    std::string path_;
    std::ofstream file_;
    std::ostream* out_ = nullptr;
};

std::unique_ptr<LineReader> open_corpora(const std::vector<std::string>& paths) {
    std::vector<std::unique_ptr<LineReader>> readers;
    readers.reserve(paths.size());
    for (const std::string& path : paths) readers.push_back(open_lines(path));
    return chain_lines(std::move(readers));
}

void add_normalization_flags(CLI::App* cmd, const std::shared_ptr<CorpusOptions>& options) {
    cmd->add_flag(
        "--no-lowercase", [options](int64_t) { options->norm.lowercase = false; },
        "keep the original casing");
    cmd->add_flag(
        "--split-punct", [options](int64_t) { options->norm.split_punctuation = true; },
        "make each punctuation character its own token");
    cmd->add_flag(
        "--no-nfc", [options](int64_t) { options->norm.unicode_nfc = false; },
        "skip canonical composition");
    cmd->add_option("--min-words", options->min_words,
                    "skip lines with fewer word tokens (0 keeps everything)");
}

CLI::Option* add_threads_option(CLI::App* cmd, int& threads) {
    // SUBVOC_THREADS provides the default; the flag overrides it.
    threads = default_thread_count();
    return cmd->add_option("--threads", threads, "worker threads (output is identical for any N)")
        ->check(CLI::Range(1, 256));
}

const std::map<std::string, FinalRule> kFinalRules{
    {"current", FinalRule::current_step},
    {"previous", FinalRule::previous_step},
};
const std::map<std::string, ScoreNormalization> kNormalizations{
    {"mean_per_sentence", ScoreNormalization::mean_per_sentence},
    {"raw_sum", ScoreNormalization::raw_sum},
};
const std::map<std::string, MaskMode> kMaskModes{
    {"pure", MaskMode::pure_mask},
    {"bert", MaskMode::bert_80_10_10},
};
const std::map<std::string, EmbeddingFormat> kFormats{
    {"text", EmbeddingFormat::text},
    {"binary", EmbeddingFormat::binary},
};

void register_count(CLI::App& app) {
    auto* cmd = app.add_subcommand("count", "count whitespace word tokens in corpora");
    struct Opts {
        std::vector<std::string> corpora;
        std::string out = "-";
        CorpusOptions options;
        int threads = 1;
    };
    auto opts = std::make_shared<Opts>();
    cmd->add_option("--corpus", opts->corpora, "input corpus file(s); .gz accepted; - for stdin")
        ->required();
    cmd->add_option("--out", opts->out, "output file (token<TAB>count per line)");
    add_normalization_flags(cmd, {opts, &opts->options});
    add_threads_option(cmd, opts->threads);
    cmd->callback([opts] {
        auto reader = open_corpora(opts->corpora);
        const TokenCounts counts = count_tokens(*reader, opts->options, opts->threads);
        Output out(opts->out);
        write_token_counts(out.stream(), counts);
        out.finish();
        std::cerr << "counted " << counts.total_tokens << " tokens (" << counts.counts.size()
                  << " distinct) in " << counts.total_sentences << " sentences\n";
    });
}

void register_sample(CLI::App& app) {
    auto* cmd = app.add_subcommand("sample", "reproducible uniform sentence sample");
    struct Opts {
        std::vector<std::string> corpora;
        std::string out = "-";
        uint64_t n = 550000;
        uint64_t seed = 1;
        CorpusOptions options;
    };
    auto opts = std::make_shared<Opts>();
    cmd->add_option("--corpus", opts->corpora, "input corpus file(s)")->required();
    cmd->add_option("--n", opts->n, "sample size");
    cmd->add_option("--seed", opts->seed, "sampling seed");
    cmd->add_option("--out", opts->out, "output file, one sentence per line");
    add_normalization_flags(cmd, {opts, &opts->options});
    cmd->callback([opts] {
        auto reader = open_corpora(opts->corpora);
        const CorpusSample sample = sample_sentences(*reader, opts->n, opts->seed, opts->options);
        Output out(opts->out);
        for (const std::string& sentence : sample.sentences) out.stream() << sentence << '\n';
        out.finish();
        std::cerr << "sampled " << sample.sentences.size() << " of " << sample.source_size
                  << " sentences (seed " << sample.seed << ")\n";
    });
}

void register_tokenize(CLI::App& app) {
    auto* cmd = app.add_subcommand("tokenize", "wordpiece-tokenize a corpus");
    struct Opts {
        std::string vocab;
        std::vector<std::string> corpora{"-"};
        std::string out = "-";
        int32_t max_chars = 100;
        CorpusOptions options;
    };
    auto opts = std::make_shared<Opts>();
    cmd->add_option("--vocab", opts->vocab, "vocabulary file, one token per line")->required();
    cmd->add_option("--corpus", opts->corpora, "input file(s); default stdin");
    cmd->add_option("--out", opts->out, "output file, pieces joined by spaces, line-aligned");
    cmd->add_option("--max-chars", opts->max_chars, "per-word character cap before [UNK]");
    add_normalization_flags(cmd, {opts, &opts->options});
    cmd->callback([opts] {
        const Vocabulary vocab = Vocabulary::load(opts->vocab);
        const WordPieceTokenizer tokenizer(vocab, opts->max_chars);
        auto reader = open_corpora(opts->corpora);
        Output out(opts->out);
        std::string line;
        std::vector<int32_t> ids;
        while (reader->next(line)) {
            ids.clear();
            for (const std::string& word : normalize_and_split(line, opts->options.norm)) {
                tokenizer.word_ids(word, ids);
            }
            for (size_t i = 0; i < ids.size(); ++i) {
                if (i > 0) out.stream() << ' ';
                out.stream() << vocab.entry(ids[i]);
            }
            out.stream() << '\n';
        }
        out.finish();
    });
}

void register_expand_vocab(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "expand-vocab", "mine domain subwords and auto-size the incremental vocabulary");
    struct Opts {
        std::vector<std::string> corpora;
        std::string base_vocab;
        std::string out;
        std::string trace;
        uint64_t sample_size = 550000;
        uint64_t seed = 1;
        ExpansionConfig config;
        CorpusOptions options;
        bool exclude_unk = false;
        ScoreNormalization normalization = ScoreNormalization::mean_per_sentence;
    };
    auto opts = std::make_shared<Opts>();
    cmd->add_option("--corpus", opts->corpora, "domain corpus file(s)")->required();
    cmd->add_option("--base-vocab", opts->base_vocab, "original vocabulary file")->required();
    cmd->add_option("--out", opts->out, "expanded vocabulary output file")->required();
    cmd->add_option("--trace", opts->trace, "expansion trace output file");
    cmd->add_option("--delta", opts->config.delta, "relative-rise stopping threshold")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--step", opts->config.step, "vocabulary size step per iteration")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-subword-len", opts->config.max_subword_len,
                    "candidate length cap in characters")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--min-count", opts->config.min_count, "weighted count floor for candidates");
    cmd->add_option("--final-rule", opts->config.final_rule, "vocabulary returned at the stop")
        ->transform(CLI::CheckedTransformer(kFinalRules, CLI::ignore_case));
    cmd->add_option("--max-size", opts->config.max_size, "safety cap on the expanded size")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--sample-size", opts->sample_size, "sentences sampled for scoring");
    cmd->add_option("--seed", opts->seed, "sampling seed");
    cmd->add_option("--normalization", opts->normalization, "corpus score normalization")
        ->transform(CLI::CheckedTransformer(kNormalizations, CLI::ignore_case));
    cmd->add_flag("--exclude-unk", opts->exclude_unk,
                  "drop [UNK] occurrences from the unigram statistics");
    add_normalization_flags(cmd, {opts, &opts->options});
    add_threads_option(cmd, opts->config.threads);
    cmd->callback([opts] {
        const Vocabulary raw_vocab = Vocabulary::load(opts->base_vocab);
        auto reader = open_corpora(opts->corpora);
        const CorpusSample sample =
            sample_sentences(*reader, opts->sample_size, opts->seed, opts->options);
        opts->config.include_unk = !opts->exclude_unk;
        opts->config.normalization = opts->normalization;

        const ExpansionResult result = expand_vocabulary(sample, raw_vocab, opts->config);
        result.vocabulary.save(opts->out);

        if (!opts->trace.empty()) {
            Output trace_out(opts->trace);
            write_trace(trace_out.stream(), result.trace,
                        {{"seed", std::to_string(opts->seed)},
                         {"sample_size", std::to_string(sample.sentences.size())},
                         {"source_size", std::to_string(sample.source_size)},
                         {"base_size", std::to_string(raw_vocab.size())},
                         {"delta", std::to_string(opts->config.delta)},
                         {"step", std::to_string(opts->config.step)},
                         {"min_count", std::to_string(opts->config.min_count)},
                         {"max_subword_len", std::to_string(opts->config.max_subword_len)},
                         {"final_rule", std::string(final_rule_name(opts->config.final_rule))},
                         {"normalization", std::string(normalization_name(opts->config.normalization))}});
            trace_out.finish();
        }
        std::cerr << "expanded " << raw_vocab.size() << " -> " << result.trace.final_size
                  << " entries (" << stop_reason_name(result.trace.stop_reason) << ") over "
                  << sample.sentences.size() << " sampled sentences\n";
    });
}

void register_pd_curve(CLI::App& app) {
    auto* cmd = app.add_subcommand("pd-curve",
                                   "corpus occurrence probability at fixed vocabulary sizes");
    struct Opts {
        std::vector<std::string> corpora;
        std::string base_vocab;
        std::string out = "-";
        std::vector<int32_t> sizes;
        uint64_t sample_size = 550000;
        uint64_t seed = 1;
        ExpansionConfig config;
        CorpusOptions options;
        bool exclude_unk = false;
        ScoreNormalization normalization = ScoreNormalization::mean_per_sentence;
    };
    auto opts = std::make_shared<Opts>();
    cmd->add_option("--corpus", opts->corpora, "domain corpus file(s)")->required();
    cmd->add_option("--base-vocab", opts->base_vocab, "original vocabulary file")->required();
    cmd->add_option("--sizes", opts->sizes, "strictly increasing vocabulary sizes")
        ->required()
        ->delimiter(',');
    cmd->add_option("--out", opts->out, "report output file");
    cmd->add_option("--max-subword-len", opts->config.max_subword_len,
                    "candidate length cap in characters");
    cmd->add_option("--min-count", opts->config.min_count, "weighted count floor for candidates");
    cmd->add_option("--sample-size", opts->sample_size, "sentences sampled for scoring");
    cmd->add_option("--seed", opts->seed, "sampling seed");
    cmd->add_option("--normalization", opts->normalization, "corpus score normalization")
        ->transform(CLI::CheckedTransformer(kNormalizations, CLI::ignore_case));
    cmd->add_flag("--exclude-unk", opts->exclude_unk,
                  "drop [UNK] occurrences from the unigram statistics");
    add_normalization_flags(cmd, {opts, &opts->options});
    add_threads_option(cmd, opts->config.threads);
    cmd->callback([opts] {
        const Vocabulary raw_vocab = Vocabulary::load(opts->base_vocab);
        auto reader = open_corpora(opts->corpora);
        const CorpusSample sample =
            sample_sentences(*reader, opts->sample_size, opts->seed, opts->options);
        opts->config.include_unk = !opts->exclude_unk;
        opts->config.normalization = opts->normalization;

        const auto curve = pd_curve(sample, raw_vocab, opts->sizes, opts->config);
        Output out(opts->out);
        out.stream() << "# seed\t" << opts->seed << "\n# sample_size\t" << sample.sentences.size()
                     << '\n';
        write_pd_curve(out.stream(), curve, sample.sentences.size(), opts->normalization);
        out.finish();
    });
}

void register_expand_embeddings(CLI::App& app) {
    auto* cmd = app.add_subcommand("expand-embeddings",
                                   "initialize rows for new vocabulary entries by averaging "
                                   "their subword embeddings");
    struct Opts {
        std::string base_vocab;
        std::string vocab;
        std::string in;
        std::string out;
        EmbeddingFormat format = EmbeddingFormat::binary;
        int threads = 1;
    };
    auto opts = std::make_shared<Opts>();
    cmd->add_option("--base-vocab", opts->base_vocab, "original vocabulary file")->required();
    cmd->add_option("--vocab", opts->vocab, "expanded vocabulary file")->required();
    cmd->add_option("--in", opts->in, "base embedding matrix (text or binary)")->required();
    cmd->add_option("--out", opts->out, "output matrix file")->required();
    cmd->add_option("--format", opts->format, "output format")
        ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
    add_threads_option(cmd, opts->threads);
    cmd->callback([opts] {
        const Vocabulary base_vocab = Vocabulary::load(opts->base_vocab);
        const Vocabulary expanded = Vocabulary::load(opts->vocab, base_vocab.size());
        const EmbeddingMatrix base = read_embeddings(opts->in);
        const EmbeddingMatrix out = expand_embeddings(base, base_vocab, expanded, opts->threads);
        write_embeddings(out, opts->out, opts->format);
        std::cerr << "expanded embeddings " << base.rows() << "x" << base.cols() << " -> "
                  << out.rows() << "x" << out.cols() << '\n';
    });
}

void register_drift(CLI::App& app) {
    auto* cmd = app.add_subcommand("drift", "per-token L2 distance between embedding matrices");
    struct Opts {
        std::string before;
        std::string after;
        std::string vocab;
        std::string out = "-";
        double threshold = 1.0;
        int64_t base_size = -1;
    };
    auto opts = std::make_shared<Opts>();
    cmd->add_option("--before", opts->before, "matrix before training")->required();
    cmd->add_option("--after", opts->after, "matrix after training")->required();
    cmd->add_option("--vocab", opts->vocab, "vocabulary file aligned with the rows")->required();
    cmd->add_option("--threshold", opts->threshold, "distance threshold for the summary fraction");
    cmd->add_option("--base-size", opts->base_size,
                    "original-vocabulary prefix length for group stats (default: all rows)");
    cmd->add_option("--out", opts->out, "report output file");
    cmd->callback([opts] {
        const Vocabulary vocab = Vocabulary::load(opts->vocab, opts->base_size);
        const EmbeddingMatrix before = read_embeddings(opts->before);
        const EmbeddingMatrix after = read_embeddings(opts->after);
        const DriftReport report = embedding_drift(before, after, vocab, opts->threshold);
        Output out(opts->out);
        write_drift_report(out.stream(), report, vocab);
        out.finish();
    });
}

void register_stats(CLI::App& app) {
    auto* cmd = app.add_subcommand("stats", "corpus statistics reports");
    cmd->require_subcommand(1);
    auto* seq = cmd->add_subcommand("seq-length",
                                    "average tokenized sentence length under two vocabularies");
    struct Opts {
        std::vector<std::string> corpora;
        std::string vocab_a;
        std::string vocab_b;
        std::string out = "-";
        bool pretty = false;
        CorpusOptions options;
        int threads = 1;
    };
    auto opts = std::make_shared<Opts>();
    seq->add_option("--corpus", opts->corpora, "corpus file(s), one record each")->required();
    seq->add_option("--vocab-a", opts->vocab_a, "baseline vocabulary")->required();
    seq->add_option("--vocab-b", opts->vocab_b, "comparison vocabulary")->required();
    seq->add_option("--out", opts->out, "report output file");
    seq->add_flag("--pretty", opts->pretty, "also print an aligned table to stderr");
    add_normalization_flags(seq, {opts, &opts->options});
    add_threads_option(seq, opts->threads);
    seq->callback([opts] {
        const Vocabulary vocab_a = Vocabulary::load(opts->vocab_a);
        const Vocabulary vocab_b = Vocabulary::load(opts->vocab_b);
        std::vector<LengthRecord> records;
        for (const std::string& path : opts->corpora) {
            auto reader = open_lines(path);
            records.push_back(sequence_length_report(*reader, path, vocab_a, vocab_b,
                                                     opts->options, opts->threads));
        }
        Output out(opts->out);
        write_length_records(out.stream(), records);
        out.finish();
        if (opts->pretty) print_length_table(std::cerr, records);
    });
}

void register_mask(CLI::App& app) {
    auto* cmd = app.add_subcommand("mask", "masked-LM training records from text");
    struct Opts {
        std::string vocab;
        std::vector<std::string> inputs;
        std::string out = "-";
        double rate = 0.15;
        uint64_t seed = 1;
        MaskMode mode = MaskMode::pure_mask;
        CorpusOptions options;
    };
    auto opts = std::make_shared<Opts>();
    cmd->add_option("--vocab", opts->vocab, "vocabulary file with [MASK]")->required();
    cmd->add_option("--input", opts->inputs, "text input file(s), one sequence per line")
        ->required();
    cmd->add_option("--rate", opts->rate, "fraction of maskable tokens to select")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--seed", opts->seed, "global seed; per-sequence seeds are derived from it");
    cmd->add_option("--mode", opts->mode, "pure: always [MASK]; bert: 80/10/10")
        ->transform(CLI::CheckedTransformer(kMaskModes, CLI::ignore_case));
    cmd->add_option("--out", opts->out, "records output file");
    add_normalization_flags(cmd, {opts, &opts->options});
    cmd->callback([opts] {
        const Vocabulary vocab = Vocabulary::load(opts->vocab);
        const WordPieceTokenizer tokenizer(vocab);
        auto reader = open_corpora(opts->inputs);
        Output out(opts->out);
        out.stream() << "# seed\t" << opts->seed << "\n# rate\t" << opts->rate << "\n# mode\t"
                     << (opts->mode == MaskMode::pure_mask ? "pure" : "bert")
                     << "\n# input_ids\tlabels\tmask_positions\n";
        std::string line;
        std::vector<int32_t> ids;
        uint64_t sequence = 0;
        while (reader->next(line)) {
            ids.clear();
            for (const std::string& word : normalize_and_split(line, opts->options.norm)) {
                tokenizer.word_ids(word, ids);
            }
            if (ids.empty()) continue;
            const MaskedInstance instance = mask_tokens(
                ids, vocab, opts->rate, derive_seed(opts->seed, sequence), opts->mode);
            write_masked_instance(out.stream(), instance);
            ++sequence;
        }
        out.finish();
        std::cerr << "masked " << sequence << " sequences\n";
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"domain adaptation toolkit for WordPiece vocabularies"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.set_config("--config", "", "INI config file; [subcommand] sections, key=value entries");
    app.failure_message(CLI::FailureMessage::help);

    register_count(app);
    register_sample(app);
    register_tokenize(app);
    register_expand_vocab(app);
    register_pd_curve(app);
    register_expand_embeddings(app);
    register_drift(app);
    register_stats(app);
    register_mask(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const subvoc::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const subvoc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
