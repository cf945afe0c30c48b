#pragma once

#include <cstddef>
#include <cstdint>

#include "ksa/error.hpp"

namespace ksa {

/// How a node stores its outgoing edges.
enum class ChildMapKind : std::uint8_t {
  /// Fixed-capacity slot array indexed by symbol rank. Used when the
  /// branching alphabet is small (<= kArrayChildMapMaxSymbols).
  array,
  /// Sorted sparse association list of (symbol, child) entries.
  sparse,
};

inline constexpr std::size_t kArrayChildMapMaxSymbols = 16;

inline ChildMapKind child_map_kind_for(std::size_t alphabet_size) {
  return alphabet_size <= kArrayChildMapMaxSymbols ? ChildMapKind::array
                                                   : ChildMapKind::sparse;
}

inline const char* to_string(ChildMapKind kind) {
  return kind == ChildMapKind::array ? "array" : "sparse";
}

enum class StructureKind : std::uint8_t { ksa, suffix_tree };

inline const char* to_string(StructureKind kind) {
  return kind == StructureKind::ksa ? "ksa" : "suffix_tree";
}

/// Deterministic per-node byte model, independent of the host runtime.
/// Reported memory figures use this model; an OS-measured peak is recorded
/// separately where available.
///
///   ksa, array children:   F + sigma * w
///   ksa, sparse children:  F + L + (1 + w)
///   suffix tree, array:    F + (sigma + 1) * w + E + w + A
///   suffix tree, sparse:   F + L + (1 + w) + E + w + A
///
/// where w is the child-reference width, F = 16 fixed per-node bookkeeping,
/// L = 24 association-list header, E = 16 edge-label (start, end) offsets,
/// A = 8 leaf suffix-start annotation, and the extra w on the suffix tree is
/// its suffix link. Sparse children charge each node for its own (symbol,
/// reference) entry in the parent's list; the suffix tree branches over the
/// alphabet plus the terminal sentinel, hence sigma + 1 slots.
inline constexpr std::uint64_t kNodeFixedOverheadBytes = 16;
inline constexpr std::uint64_t kSparseListOverheadBytes = 24;
inline constexpr std::uint64_t kEdgeLabelBytes = 16;
inline constexpr std::uint64_t kLeafAnnotationBytes = 8;
inline constexpr std::uint64_t kDefaultChildRefWidth = 8;

/// Serialized footprint of one posting: 32-bit sequence id + 64-bit offset.
inline constexpr std::uint64_t kPostingBytes = 12;

/// Summary counters every index structure reports. estimated_bytes is the
/// modeled size per node_cost_model (plus posting storage where applicable);
/// the suffix tree reports distinct_kmers and total_windows as zero since it
/// is not window-based.
struct IndexStats {
  std::uint64_t node_count = 0;
  std::uint64_t leaf_count = 0;
  std::uint64_t distinct_kmers = 0;
  std::uint64_t total_windows = 0;
  std::uint64_t estimated_bytes = 0;
};

inline std::uint64_t node_cost_model(
    StructureKind structure, std::size_t alphabet_size, ChildMapKind children,
    std::size_t child_ref_width = kDefaultChildRefWidth) {
  if (alphabet_size == 0)
    throw Error(ErrorKind::invalid_parameter, "alphabet size must be positive");
  const std::uint64_t w = child_ref_width;
  std::uint64_t cost = kNodeFixedOverheadBytes;
  const std::size_t fanout =
      alphabet_size + (structure == StructureKind::suffix_tree ? 1 : 0);
  if (children == ChildMapKind::array)
    cost += static_cast<std::uint64_t>(fanout) * w;
  else
    cost += kSparseListOverheadBytes + 1 + w;
  if (structure == StructureKind::suffix_tree)
    cost += kEdgeLabelBytes + w + kLeafAnnotationBytes;
  return cost;
}

}  // namespace ksa
