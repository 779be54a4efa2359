#include <doctest.h>

#include <fstream>

#include "subvoc/error.hpp"
#include "subvoc/vocabulary.hpp"
#include "support/temp_dir.hpp"

using namespace subvoc;

TEST_SUITE_BEGIN("vocabulary");

TEST_CASE("load keeps file order as ids") {
    testutil::TempDir dir;
    const std::string path = dir.write("vocab.txt", "[UNK]\n[MASK]\na\nb\n##c\n");
    const Vocabulary vocab = Vocabulary::load(path);
    CHECK(vocab.size() == 5);
    CHECK(vocab.base_size() == 5);
    CHECK(vocab.entry(0) == "[UNK]");
    CHECK(vocab.entry(4) == "##c");
    CHECK(vocab.find("a") == 2);
    CHECK(vocab.find("missing") == std::nullopt);
    CHECK(vocab.unk_id() == 0);
    CHECK(vocab.mask_id() == 1);
}

TEST_CASE("duplicate tokens are rejected with both line numbers") {
    testutil::TempDir dir;
    const std::string path = dir.write("vocab.txt", "[UNK]\na\nb\na\n");
    CHECK_THROWS_WITH_AS(Vocabulary::load(path), doctest::Contains("lines 2 and 4"), FormatError);
    CHECK_THROWS_WITH_AS(Vocabulary::load(path), doctest::Contains("\"a\""), FormatError);
}

TEST_CASE("missing [UNK] is rejected") {
    testutil::TempDir dir;
    const std::string path = dir.write("vocab.txt", "a\nb\n");
    CHECK_THROWS_WITH_AS(Vocabulary::load(path), doctest::Contains("[UNK]"), FormatError);
}

TEST_CASE("empty lines are rejected") {
    testutil::TempDir dir;
    const std::string path = dir.write("vocab.txt", "[UNK]\n\nb\n");
    CHECK_THROWS_WITH_AS(Vocabulary::load(path), doctest::Contains("line 2"), FormatError);
}

TEST_CASE("bert-sized file gets base_size equal to its line count") {
    testutil::TempDir dir;
    std::ofstream out(dir.file("bert.txt"));
    out << "[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\n";
    for (int i = 0; i < 30517; ++i) out << "token" << i << '\n';
    out.close();
    const Vocabulary vocab = Vocabulary::load(dir.file("bert.txt"));
    CHECK(vocab.size() == 30522);
    CHECK(vocab.base_size() == 30522);
}

TEST_CASE("explicit base_size marks the original prefix") {
    const Vocabulary vocab = Vocabulary::from_entries({"[UNK]", "a", "b", "##x"}, 2);
    CHECK(vocab.base_size() == 2);
    CHECK_THROWS_AS(Vocabulary::from_entries({"[UNK]"}, 5), DataError);
}

TEST_CASE("save round-trips") {
    testutil::TempDir dir;
    const Vocabulary vocab = Vocabulary::from_entries({"[UNK]", "[MASK]", "zz", "##z"});
    vocab.save(dir.file("out.txt"));
    CHECK(testutil::TempDir::slurp(dir.file("out.txt")) == "[UNK]\n[MASK]\nzz\n##z\n");
    const Vocabulary back = Vocabulary::load(dir.file("out.txt"));
    CHECK(back.size() == vocab.size());
    CHECK(back.entry(3) == "##z");
}

TEST_CASE("special token convention") {
    CHECK(Vocabulary::is_special_token("[UNK]"));
    CHECK(Vocabulary::is_special_token("[MASK]"));
    CHECK(Vocabulary::is_special_token("[unused17]"));
    CHECK_FALSE(Vocabulary::is_special_token("word"));
    CHECK_FALSE(Vocabulary::is_special_token("##ing"));
    CHECK_FALSE(Vocabulary::is_special_token("["));
    CHECK_FALSE(Vocabulary::is_special_token("[]"));
}

TEST_CASE("continuation form") {
    CHECK(Vocabulary::is_continuation("##a"));
    CHECK_FALSE(Vocabulary::is_continuation("a"));
    CHECK_FALSE(Vocabulary::is_continuation("##"));
}

TEST_CASE("unk_id on a vocabulary without [UNK] throws") {
    const Vocabulary vocab = Vocabulary::from_entries({"a", "b"});
    CHECK_THROWS_AS(vocab.unk_id(), DataError);
}

TEST_SUITE_END();
