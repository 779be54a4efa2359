#include <doctest.h>

#include <cmath>

#include "subvoc/error.hpp"
#include "subvoc/rng.hpp"
#include "subvoc/unigram.hpp"
#include "support/oracles.hpp"

using namespace subvoc;

namespace {

UnigramModel model_ab() {
    return UnigramModel::from_counts({{"a", 2}, {"b", 1}}, 3);
}

}  // namespace

TEST_SUITE_BEGIN("unigram");

TEST_CASE("probabilities are counts over total") {
    const UnigramModel model = model_ab();
    CHECK(model.probability("a") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(model.probability("b") == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(model.log_probability("a") == doctest::Approx(std::log(2.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("single-type corpus has probability one and log zero") {
    const UnigramModel model = UnigramModel::from_counts({{"x", 5}}, 5);
    CHECK(model.probability("x") == 1.0);
    CHECK(model.log_probability("x") == 0.0);
}

TEST_CASE("probabilities sum to one") {
    const UnigramModel model = UnigramModel::from_counts({{"a", 2}, {"b", 1}, {"c", 3}}, 6);
    double sum = 0.0;
    for (const auto piece : model.sorted_pieces()) sum += model.probability(piece);
    CHECK(std::abs(sum - 1.0) <= 1e-9);
}

TEST_CASE("empty corpus and inconsistent totals are errors") {
    CHECK_THROWS_AS(UnigramModel::from_counts({}, 0), DataError);
    CHECK_THROWS_AS(UnigramModel::from_counts({{"a", 1}}, 3), DataError);
    CHECK_THROWS_AS(UnigramModel::from_counts({{"a", 0}, {"b", 2}}, 2), DataError);
}

TEST_CASE("absent piece raises an error naming it") {
    const UnigramModel model = model_ab();
    CHECK_THROWS_WITH_AS(model.log_probability("zz"), doctest::Contains("\"zz\""), DataError);
}

TEST_CASE("sentence log probability") {
    const UnigramModel model = model_ab();
    const std::vector<std::string> pieces{"a", "a", "b"};
    CHECK(sentence_log_probability(pieces, model) == doctest::Approx(-1.909543).epsilon(1e-6));
    CHECK(sentence_log_probability({}, model) == 0.0);

    const UnigramModel unit = UnigramModel::from_counts({{"x", 5}}, 5);
    const std::vector<std::string> x{"x"};
    CHECK(sentence_log_probability(x, unit) == 0.0);
}

TEST_CASE("corpus score: mean and raw sum") {
    const UnigramModel model = model_ab();
    const std::vector<std::vector<std::string>> one{{"a", "a", "b"}};
    const CorpusScore mean =
        corpus_occurrence_probability(one, model, ScoreNormalization::mean_per_sentence);
    CHECK(mean.value == doctest::Approx(-1.909543).epsilon(1e-6));
    CHECK(mean.sentence_count == 1);

    // Two identical sentences: mean unchanged, raw sum doubled.
    const std::vector<std::vector<std::string>> two{{"a", "a", "b"}, {"a", "a", "b"}};
    const UnigramModel model2 = UnigramModel::from_counts({{"a", 4}, {"b", 2}}, 6);
    const CorpusScore mean2 =
        corpus_occurrence_probability(two, model2, ScoreNormalization::mean_per_sentence);
    CHECK(mean2.value == doctest::Approx(mean.value).epsilon(1e-12));
    const CorpusScore sum2 = corpus_occurrence_probability(two, model2, ScoreNormalization::raw_sum);
    CHECK(sum2.value == doctest::Approx(2.0 * mean2.value).epsilon(1e-12));
}

TEST_CASE("mean over an empty corpus is an error, raw sum is zero") {
    const UnigramModel model = model_ab();
    CorpusScorer scorer(model);
    CHECK_THROWS_AS(scorer.finish(ScoreNormalization::mean_per_sentence), DataError);
    CHECK(scorer.finish(ScoreNormalization::raw_sum).value == 0.0);
}

TEST_CASE("mean is invariant under corpus duplication") {
    const std::vector<std::vector<std::string>> base{{"a", "b"}, {"b", "b", "a"}, {"a"}};
    std::vector<std::vector<std::string>> tripled;
    for (int k = 0; k < 3; ++k) tripled.insert(tripled.end(), base.begin(), base.end());

    // Self-counts scale with duplication, so probabilities are unchanged.
    const UnigramModel model = UnigramModel::from_counts({{"a", 3}, {"b", 3}}, 6);
    const UnigramModel model3 = UnigramModel::from_counts({{"a", 9}, {"b", 9}}, 18);
    const double mean =
        corpus_occurrence_probability(base, model, ScoreNormalization::mean_per_sentence).value;
    const double mean3 =
        corpus_occurrence_probability(tripled, model3, ScoreNormalization::mean_per_sentence).value;
    CHECK(mean3 == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("random tiny corpora match the brute-force recomputation") {
    Rng rng(991);
    const char* alphabet[] = {"a", "b", "##c", "dd", "e"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::vector<std::string>> corpus;
        const size_t sentences = 1 + rng.below(5);
        std::unordered_map<std::string, uint64_t> counts;
        uint64_t total = 0;
        for (size_t s = 0; s < sentences; ++s) {
            std::vector<std::string> sentence;
            const size_t len = 1 + rng.below(10);
            for (size_t i = 0; i < len; ++i) {
                sentence.emplace_back(alphabet[rng.below(5)]);
                ++counts[sentence.back()];
                ++total;
            }
            corpus.push_back(std::move(sentence));
        }
        const UnigramModel model = UnigramModel::from_counts(counts, total);
        for (const bool mean : {true, false}) {
            const double expected = oracle::corpus_score(corpus, mean);
            const CorpusScore got = corpus_occurrence_probability(
                corpus, model,
                mean ? ScoreNormalization::mean_per_sentence : ScoreNormalization::raw_sum);
            REQUIRE(std::abs(got.value - expected) <= 1e-12);
            REQUIRE(got.value <= 0.0);
        }
    }
}

TEST_CASE("score_subword_counts equals the per-sentence route") {
    const Vocabulary vocab = Vocabulary::from_entries({"[UNK]", "a", "b", "ab"});
    const WordPieceTokenizer tokenizer(vocab);
    CorpusOptions options;
    const std::string corpus = "a ab b\nb b zq\nab ab a";

    std::vector<std::vector<std::string>> sentences;
    StringLineReader reader(corpus);
    const SubwordCounts counts =
        tokenize_corpus(reader, tokenizer, options, 1, [&](std::span<const int32_t> ids) {
            std::vector<std::string> pieces;
            for (const int32_t id : ids) pieces.emplace_back(vocab.entry(id));
            sentences.push_back(std::move(pieces));
        });

    const UnigramModel model = UnigramModel::from_subword_counts(counts, vocab);
    const CorpusScore streamed =
        corpus_occurrence_probability(sentences, model, ScoreNormalization::mean_per_sentence);
    const CorpusScore fused = score_subword_counts(counts, vocab.unk_id(),
                                                   ScoreNormalization::mean_per_sentence);
    CHECK(fused.value == doctest::Approx(streamed.value).epsilon(1e-12));
    CHECK(fused.sentence_count == streamed.sentence_count);
}

TEST_CASE("excluding [UNK] drops it from model and score") {
    const Vocabulary vocab = Vocabulary::from_entries({"[UNK]", "a"});
    const WordPieceTokenizer tokenizer(vocab);
    StringLineReader reader("a zq a");
    const SubwordCounts counts = tokenize_corpus(reader, tokenizer, {});

    const UnigramModel with_unk = UnigramModel::from_subword_counts(counts, vocab, true);
    CHECK(with_unk.contains("[UNK]"));
    CHECK(with_unk.probability("a") == doctest::Approx(2.0 / 3.0));

    const UnigramModel without = UnigramModel::from_subword_counts(counts, vocab, false);
    CHECK_FALSE(without.contains("[UNK]"));
    CHECK(without.probability("a") == 1.0);

    const CorpusScore score = score_subword_counts(counts, vocab.unk_id(),
                                                   ScoreNormalization::mean_per_sentence, false);
    CHECK(score.value == 0.0);
}

TEST_SUITE_END();
