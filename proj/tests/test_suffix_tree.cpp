#include <random>
#include <set>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ksa/alphabet.hpp"
#include "ksa/brute_force.hpp"
#include "ksa/suffix_tree.hpp"
#include "testutil.hpp"

using namespace ksa;

namespace {

Alphabet lowercase_letters() {
  return Alphabet("abcdefghijklmnopqrstuvwxyz");
}

}  // namespace

TEST_CASE("xabxac builds one leaf per suffix") {
  SuffixTree tree("xabxac", lowercase_letters());
  CHECK(tree.leaf_count() == 7);  // 6 suffixes + terminator
  CHECK(tree.locate("a") == std::vector<std::uint64_t>{1, 4});
  CHECK(tree.count("a") == 2);
  CHECK(tree.locate("xa") == std::vector<std::uint64_t>{0, 3});
  CHECK(tree.count("b") == 1);
  CHECK(tree.count("xac") == 1);
  CHECK(tree.count("q") == 0);
  tree.validate();
}

TEST_CASE("aaaa collapses repeated suffixes into shared edges") {
  SuffixTree tree("aaaa", lowercase_letters());
  CHECK(tree.leaf_count() == 5);
  CHECK(tree.node_count() <= 10);
  CHECK(tree.locate("aa") == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(tree.locate("aaaa") == std::vector<std::uint64_t>{0});
  CHECK(tree.count("aaaaa") == 0);
  tree.validate();
}

TEST_CASE("construction preconditions") {
  CHECK_THROWS_AS(SuffixTree("", Alphabet::dna()), Error);
  try {
    SuffixTree tree("ACGX", Alphabet::dna());
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::alphabet);
  }
}

TEST_CASE("query preconditions and misses") {
  SuffixTree tree("ACGTACGT", Alphabet::dna());
  CHECK(tree.contains(""));
  CHECK_THROWS_AS(tree.locate(""), Error);
  CHECK_THROWS_AS(tree.count(""), Error);
  // Bytes outside the alphabet cannot occur in the text.
  CHECK(tree.count("AX") == 0);
  CHECK(tree.locate("AX").empty());
  CHECK(!tree.contains("AX"));
}

TEST_CASE("suffix tree answers general substring queries at any length") {
  SuffixTree tree("ACGTCCTGG", Alphabet::dna());
  // Unlike the window trie, GG and the full text itself are found.
  CHECK(tree.count("GG") == 1);
  CHECK(tree.locate("ACGTCCTGG") == std::vector<std::uint64_t>{0});
  CHECK(tree.count("CCT") == 1);
  CHECK(tree.locate("C") == std::vector<std::uint64_t>{1, 4, 5});
}

TEST_CASE("random texts agree with the brute-force oracle") {
  std::mt19937_64 gen(31);
  for (int round = 0; round < 50; ++round) {
    std::size_t len = 1 + gen() % 64;
    std::string text = ksatest::random_dna(gen, len);
    SuffixTree tree(text, Alphabet::dna());
    tree.validate();
    CHECK(tree.leaf_count() == len + 1);

    std::set<std::string> patterns;
    for (std::size_t i = 0; i < text.size(); ++i)
      for (std::size_t l = 1; l <= text.size() - i && l <= 12; ++l)
        patterns.insert(text.substr(i, l));
    for (int extra = 0; extra < 10; ++extra)
      patterns.insert(ksatest::random_dna(gen, 1 + gen() % 8));

    for (const std::string& p : patterns) {
      auto expected = brute_force_locate(text, p);
      CHECK(tree.locate(p) == expected);
      CHECK(tree.count(p) == expected.size());
      CHECK(tree.contains(p) == !expected.empty());
    }
  }
}

TEST_CASE("bytes alphabet picks a terminator absent from the text") {
  std::string data("ab\0cd", 5);
  SuffixTree tree(data, Alphabet::bytes());
  CHECK(tree.leaf_count() == 6);
  CHECK(tree.sentinel() != 0x00);  // 0x00 occurs in the text
  CHECK(tree.count(std::string("\x00", 1)) == 1);
  CHECK(tree.locate(std::string("b\x00""c", 3)) == std::vector<std::uint64_t>{1});
  // A pattern containing the terminator byte cannot occur in the text.
  std::string with_sentinel{static_cast<char>(tree.sentinel())};
  CHECK(tree.count(with_sentinel) == 0);
  tree.validate();
}

TEST_CASE("a text using all 256 byte values has no terminator available") {
  std::string everything(256, '\0');
  for (int i = 0; i < 256; ++i) everything[i] = static_cast<char>(i);
  try {
    SuffixTree tree(everything, Alphabet::bytes());
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_parameter);
  }
}

TEST_CASE("stats use the suffix-tree cost model") {
  SuffixTree tree("ACGTACGTAC", Alphabet::dna());
  IndexStats stats = tree.stats();
  CHECK(stats.node_count == tree.node_count());
  CHECK(stats.leaf_count == 11);
  CHECK(stats.distinct_kmers == 0);
  CHECK(stats.total_windows == 0);
  CHECK(stats.estimated_bytes ==
        tree.node_count() *
            node_cost_model(StructureKind::suffix_tree, 4, ChildMapKind::array));
}

TEST_CASE("modeled byte ceiling aborts suffix tree construction") {
  std::mt19937_64 gen(8);
  std::string text = ksatest::random_dna(gen, 1000);
  try {
    SuffixTree tree(text, Alphabet::dna(), 2000);
    FAIL("expected a resource-limit throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::resource_limit);
  }
}

TEST_CASE("linear node growth: node count stays below 2n") {
  std::mt19937_64 gen(21);
  for (std::size_t n : {100, 1000, 5000}) {
    std::string text = ksatest::random_dna(gen, n);
    SuffixTree tree(text, Alphabet::dna());
    // n+1 leaves and at most n internal nodes (root included).
    CHECK(tree.node_count() <= 2 * (n + 1));
    tree.validate();
  }
}
