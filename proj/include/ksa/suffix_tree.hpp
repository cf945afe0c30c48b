#pragma once

// Classic suffix tree over a single text, built with Ukkonen's online
// algorithm in O(n) time. Serves as the full-index baseline the window trie
// is compared against: it answers general substring queries at any length,
// at the cost of one leaf per suffix.
//
// A terminator byte outside the text is appended internally so every suffix
// ends at a leaf. For alphabets that do not span all 256 byte values the
// lowest byte outside the alphabet is used; for full-byte alphabets the
// lowest byte absent from the text is used instead, and a text containing
// all 256 values is rejected.

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ksa/alphabet.hpp"
#include "ksa/cost_model.hpp"
#include "ksa/error.hpp"

namespace ksa {

class SuffixTree {
 public:
  /// Builds the tree over text, which must be non-empty and drawn from the
  /// alphabet. A non-zero modeled_byte_ceiling aborts construction with a
  /// resource-limit error once node_count x per-node cost exceeds it.
  SuffixTree(std::span<const std::uint8_t> text, Alphabet alphabet,
             std::uint64_t modeled_byte_ceiling = 0)
      : alphabet_(std::move(alphabet)),
        node_cost_(node_cost_model(StructureKind::suffix_tree, alphabet_.size(),
                                   child_map_kind_for(alphabet_.size()))),
        ceiling_(modeled_byte_ceiling) {
    if (text.empty())
      throw Error(ErrorKind::empty_input, "cannot build a suffix tree over empty input");
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (!alphabet_.contains(text[i]))
        throw Error(ErrorKind::alphabet,
                    "symbol code " + std::to_string(+text[i]) + " at offset " +
                        std::to_string(i) + " is not in the alphabet");
    }
    text_.assign(text.begin(), text.end());
    sentinel_ = pick_sentinel(text);
    text_.push_back(sentinel_);
    build();
    finalize();
  }

  SuffixTree(std::string_view text, Alphabet alphabet,
             std::uint64_t modeled_byte_ceiling = 0)
      : SuffixTree(std::span<const std::uint8_t>(
                       reinterpret_cast<const std::uint8_t*>(text.data()), text.size()),
                   std::move(alphabet), modeled_byte_ceiling) {}

  /// Text length without the internal terminator.
  std::uint64_t text_length() const { return text_.size() - 1; }
  const Alphabet& alphabet() const { return alphabet_; }
  std::uint64_t node_count() const { return nodes_.size(); }
  std::uint64_t leaf_count() const { return leaf_total_; }
  std::uint8_t sentinel() const { return sentinel_; }

  /// True iff pattern occurs in the text as a substring. The empty pattern
  /// is a substring of everything.
  bool contains(std::string_view pattern) const {
    return pattern.empty() || match(as_bytes(pattern)) >= 0;
  }

  /// All 0-based occurrence offsets, ascending.
  std::vector<std::uint64_t> locate(std::string_view pattern) const {
    require_query(pattern);
    std::vector<std::uint64_t> out;
    std::int32_t node = match(as_bytes(pattern));
    if (node < 0) return out;
    std::vector<std::int32_t> stack{node};
    while (!stack.empty()) {
      std::int32_t v = stack.back();
      stack.pop_back();
      if (nodes_[v].children.empty()) {
        out.push_back(static_cast<std::uint64_t>(nodes_[v].suffix_start));
        continue;
      }
      for (const auto& [byte, child] : nodes_[v].children) stack.push_back(child);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::uint64_t count(std::string_view pattern) const {
    require_query(pattern);
    std::int32_t node = match(as_bytes(pattern));
    return node < 0 ? 0 : subtree_leaves_[node];
  }

  /// Model-based size plus exact node counts; the windows/k-mer fields do
  /// not apply to a suffix tree and stay zero.
  IndexStats stats() const {
    IndexStats s;
    s.node_count = nodes_.size();
    s.leaf_count = leaf_total_;
    s.estimated_bytes = modeled_bytes();
    return s;
  }

  std::uint64_t modeled_bytes() const { return nodes_.size() * node_cost_; }

  /// Structural self-check: sibling edges start with distinct bytes, every
  /// internal node other than the root has at least two children, leaf
  /// suffix starts form a permutation of 0..n, and every path length is
  /// consistent with its leaf's suffix start. Throws on violation.
  void validate() const {
    const std::uint64_t total = text_.size();
    std::vector<bool> seen(total, false);
    struct Frame {
      std::int32_t node;
      std::uint64_t path_len;
    };
    std::vector<Frame> stack{{0, 0}};
    std::uint64_t visited = 0;
    std::uint64_t leaves = 0;
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      ++visited;
      const Node& nd = nodes_[f.node];
      if (nd.children.empty()) {
        if (f.node == 0)
          throw Error(ErrorKind::corrupt, "root of a non-empty text has no children");
        ++leaves;
        if (nd.suffix_start < 0 ||
            static_cast<std::uint64_t>(nd.suffix_start) + f.path_len != total)
          throw Error(ErrorKind::corrupt, "leaf path length disagrees with suffix start");
        if (seen[nd.suffix_start])
          throw Error(ErrorKind::corrupt, "duplicate suffix start");
        seen[nd.suffix_start] = true;
        continue;
      }
      if (f.node != 0 && nd.children.size() < 2)
        throw Error(ErrorKind::corrupt, "internal node with a single child");
      int prev = -1;
      for (const auto& [byte, child] : nd.children) {
        if (static_cast<int>(byte) <= prev)
          throw Error(ErrorKind::corrupt, "sibling edges out of order");
        prev = byte;
        const Node& c = nodes_[child];
        if (text_[c.start] != byte)
          throw Error(ErrorKind::corrupt, "edge key disagrees with label");
        stack.push_back(Frame{child, f.path_len + edge_length(c)});
      }
    }
    if (visited != nodes_.size())
      throw Error(ErrorKind::corrupt, "unreachable nodes in suffix tree");
    if (leaves != total || leaves != leaf_total_)
      throw Error(ErrorKind::corrupt, "leaf count is not one per suffix");
  }

 private:
  static constexpr std::int32_t kOpenEnd = -1;

  struct Node {
    std::int32_t start = 0;  // edge label is text_[start..end)
    std::int32_t end = 0;    // kOpenEnd while the leaf edge is still growing
    std::int32_t suffix_link = 0;
    std::int64_t suffix_start = -1;  // leaves only, set by finalize()
    std::vector<std::pair<std::uint8_t, std::int32_t>> children;  // sorted by byte
  };

  static std::span<const std::uint8_t> as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
  }

  std::uint8_t pick_sentinel(std::span<const std::uint8_t> text) const {
    if (alphabet_.size() < 256) {
      for (int b = 0; b < 256; ++b)
        if (!alphabet_.contains(static_cast<std::uint8_t>(b)))
          return static_cast<std::uint8_t>(b);
    }
    std::array<bool, 256> used{};
    for (std::uint8_t b : text) used[b] = true;
    for (int b = 0; b < 256; ++b)
      if (!used[b]) return static_cast<std::uint8_t>(b);
    throw Error(ErrorKind::invalid_parameter,
                "text uses all 256 byte values; no terminator byte is available");
  }

  std::int32_t edge_end(const Node& n) const {
    return n.end == kOpenEnd ? static_cast<std::int32_t>(text_.size()) : n.end;
  }

  std::uint64_t edge_length(const Node& n) const {
    return static_cast<std::uint64_t>(edge_end(n) - n.start);
  }

  std::int32_t child_of(std::int32_t node, std::uint8_t byte) const {
    const auto& row = nodes_[node].children;
    auto it = std::lower_bound(row.begin(), row.end(), byte,
                               [](const auto& e, std::uint8_t b) { return e.first < b; });
    return (it != row.end() && it->first == byte) ? it->second : -1;
  }

  void set_child(std::int32_t node, std::uint8_t byte, std::int32_t child) {
    auto& row = nodes_[node].children;
    auto it = std::lower_bound(row.begin(), row.end(), byte,
                               [](const auto& e, std::uint8_t b) { return e.first < b; });
    if (it != row.end() && it->first == byte)
      it->second = child;
    else
      row.insert(it, {byte, child});
  }

  std::int32_t new_node(std::int32_t start, std::int32_t end) {
    nodes_.push_back(Node{start, end, 0, -1, {}});
    if (ceiling_ != 0 && nodes_.size() * node_cost_ > ceiling_)
      throw Error(ErrorKind::resource_limit,
                  "modeled size exceeds the configured ceiling of " +
                      std::to_string(ceiling_) + " bytes");
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  void build() {
    nodes_.clear();
    new_node(-1, -1);  // root
    std::int32_t active_node = 0;
    std::int32_t active_edge = 0;  // index into text_ of the edge's first byte
    std::int32_t active_length = 0;
    std::int64_t remainder = 0;
    const auto n = static_cast<std::int32_t>(text_.size());

    for (std::int32_t pos = 0; pos < n; ++pos) {
      std::int32_t last_internal = -1;
      ++remainder;
      while (remainder > 0) {
        if (active_length == 0) active_edge = pos;
        std::int32_t next = child_of(active_node, text_[active_edge]);
        if (next == -1) {
          std::int32_t leaf = new_node(pos, kOpenEnd);
          set_child(active_node, text_[active_edge], leaf);
          if (last_internal != -1) {
            nodes_[last_internal].suffix_link = active_node;
            last_internal = -1;
          }
        } else {
          auto len = static_cast<std::int32_t>(
              std::min<std::int64_t>(edge_end(nodes_[next]), pos + 1) -
              nodes_[next].start);
          if (active_length >= len) {
            active_node = next;
            active_edge += len;
            active_length -= len;
            continue;  // walk down without consuming the extension
          }
          if (text_[nodes_[next].start + active_length] == text_[pos]) {
            // The suffix is already present implicitly; extensions for this
            // position are done.
            if (last_internal != -1 && active_node != 0) {
              nodes_[last_internal].suffix_link = active_node;
              last_internal = -1;
            }
            ++active_length;
            break;
          }
          std::int32_t split =
              new_node(nodes_[next].start, nodes_[next].start + active_length);
          set_child(active_node, text_[active_edge], split);
          std::int32_t leaf = new_node(pos, kOpenEnd);
          set_child(split, text_[pos], leaf);
          nodes_[next].start += active_length;
          set_child(split, text_[nodes_[next].start], next);
          if (last_internal != -1) nodes_[last_internal].suffix_link = split;
          last_internal = split;
        }
        --remainder;
        if (active_node == 0 && active_length > 0) {
          --active_length;
          active_edge = pos - static_cast<std::int32_t>(remainder) + 1;
        } else if (active_node != 0) {
          active_node = nodes_[active_node].suffix_link;
        }
      }
    }
  }

  /// One post-order pass: resolves leaf suffix starts from path lengths and
  /// fills per-subtree leaf counts for O(1) occurrence counting.
  void finalize() {
    subtree_leaves_.assign(nodes_.size(), 0);
    leaf_total_ = 0;
    const std::uint64_t total = text_.size();
    struct Frame {
      std::int32_t node;
      std::uint64_t path_len;
      bool expanded;
    };
    std::vector<Frame> stack{{0, 0, false}};
    while (!stack.empty()) {
      Frame& f = stack.back();
      Node& nd = nodes_[f.node];
      if (nd.children.empty()) {
        nd.suffix_start = static_cast<std::int64_t>(total - f.path_len);
        subtree_leaves_[f.node] = 1;
        ++leaf_total_;
        stack.pop_back();
        continue;
      }
      if (!f.expanded) {
        f.expanded = true;
        std::uint64_t base = f.path_len;
        for (const auto& [byte, child] : nd.children)
          stack.push_back(Frame{child, base + edge_length(nodes_[child]), false});
        continue;
      }
      std::uint64_t sum = 0;
      for (const auto& [byte, child] : nd.children) sum += subtree_leaves_[child];
      subtree_leaves_[f.node] = sum;
      stack.pop_back();
    }
    if (leaf_total_ != total)
      throw Error(ErrorKind::corrupt, "suffix tree construction lost a suffix");
  }

  void require_query(std::string_view pattern) const {
    if (pattern.empty())
      throw Error(ErrorKind::invalid_parameter, "pattern must be non-empty");
  }

  /// Walks the pattern from the root byte by byte. Returns the node whose
  /// subtree holds every occurrence (the node at or below the match point),
  /// or -1 when the pattern does not occur. Pattern bytes outside the
  /// alphabet cannot occur in the text, so they simply fail to match; the
  /// terminator byte is rejected the same way even when the alphabet
  /// contains it, because it was chosen to be absent from the text.
  std::int32_t match(std::span<const std::uint8_t> pattern) const {
    for (std::uint8_t b : pattern)
      if (!alphabet_.contains(b) || b == sentinel_) return -1;
    std::int32_t node = 0;
    std::size_t pi = 0;
    while (pi < pattern.size()) {
      std::int32_t next = child_of(node, pattern[pi]);
      if (next == -1) return -1;
      const Node& nd = nodes_[next];
      std::int32_t stop = edge_end(nd);
      for (std::int32_t t = nd.start; t < stop && pi < pattern.size(); ++t, ++pi)
        if (text_[t] != pattern[pi]) return -1;
      node = next;
    }
    return node;
  }

  Alphabet alphabet_;
  std::uint64_t node_cost_;
  std::uint64_t ceiling_;
  std::uint8_t sentinel_ = 0;
  std::vector<std::uint8_t> text_;
  std::vector<Node> nodes_;
  std::vector<std::uint64_t> subtree_leaves_;
  std::uint64_t leaf_total_ = 0;
};

}  // namespace ksa
