#include <catch2/catch_amalgamated.hpp>

#include "ksa/alphabet.hpp"
#include "ksa/cost_model.hpp"
#include "ksa/error.hpp"
#include "ksa/kmer_index.hpp"

using namespace ksa;

TEST_CASE("child map policy switches at 16 symbols") {
  CHECK(child_map_kind_for(1) == ChildMapKind::array);
  CHECK(child_map_kind_for(4) == ChildMapKind::array);
  CHECK(child_map_kind_for(16) == ChildMapKind::array);
  CHECK(child_map_kind_for(17) == ChildMapKind::sparse);
  CHECK(child_map_kind_for(20) == ChildMapKind::sparse);
  CHECK(child_map_kind_for(256) == ChildMapKind::sparse);
}

TEST_CASE("array-children node cost is fixed overhead plus sigma references") {
  // 4 symbols x 8-byte references = 32 bytes of slots on top of the fixed
  // per-node overhead.
  CHECK(node_cost_model(StructureKind::ksa, 4, ChildMapKind::array, 8) ==
        kNodeFixedOverheadBytes + 32);
  CHECK(node_cost_model(StructureKind::ksa, 4, ChildMapKind::array) == 48);
}

TEST_CASE("node cost is monotone in alphabet size") {
  // Same layout, larger alphabet.
  CHECK(node_cost_model(StructureKind::ksa, 20, ChildMapKind::array) >
        node_cost_model(StructureKind::ksa, 4, ChildMapKind::array));
  // Natural layouts for each alphabet: protein nodes go through the sparse
  // list and are still strictly larger than dna array nodes.
  CHECK(node_cost_model(StructureKind::ksa, 20, child_map_kind_for(20)) >
        node_cost_model(StructureKind::ksa, 4, child_map_kind_for(4)));
}

TEST_CASE("suffix tree nodes carry edge label, suffix link, and annotation") {
  // fixed 16 + (4+1 fanout) x 8 + edge label 16 + suffix link 8 + leaf
  // annotation 8 = 88 for dna with array children.
  CHECK(node_cost_model(StructureKind::suffix_tree, 4, ChildMapKind::array) == 88);
  CHECK(node_cost_model(StructureKind::suffix_tree, 4, ChildMapKind::array) >
        node_cost_model(StructureKind::ksa, 4, ChildMapKind::array));
}

TEST_CASE("cost model rejects an empty alphabet") {
  CHECK_THROWS_AS(node_cost_model(StructureKind::ksa, 0, ChildMapKind::array), Error);
}

TEST_CASE("an empty index models exactly one node") {
  KmerIndex index(4, Alphabet::dna());
  CHECK(index.modeled_bytes() ==
        node_cost_model(StructureKind::ksa, 4, ChildMapKind::array));

  KmerIndex protein(4, Alphabet::protein());
  CHECK(protein.modeled_bytes() ==
        node_cost_model(StructureKind::ksa, 20, ChildMapKind::sparse));
}

TEST_CASE("modeled bytes add posting cost only when postings are stored") {
  const std::string text = "ACGTCCTGG";
  KmerIndex with(4, Alphabet::dna());
  with.index_sequence(text, 0);
  KmerIndex without(4, Alphabet::dna(), IndexOptions{.store_postings = false});
  without.index_sequence(text, 0);
  CHECK(with.node_count() == without.node_count());
  CHECK(with.modeled_bytes() ==
        without.modeled_bytes() + with.total_windows() * kPostingBytes);
}
