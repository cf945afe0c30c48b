#pragma once

// Depth-k generalized trie over fixed-length windows of one or more
// sequences. Construction slides a window of size k one symbol at a time and
// inserts each window on a root-to-leaf path of exactly k nodes; leaves carry
// the occurrence postings. The trie never stores suffixes of the windows, so
// its height is k regardless of input length.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ksa/alphabet.hpp"
#include "ksa/cost_model.hpp"
#include "ksa/crc64.hpp"
#include "ksa/error.hpp"

namespace ksa {

/// One occurrence of a window: which sequence, and the 0-based start offset.
struct Posting {
  std::uint32_t seq_id = 0;
  std::uint64_t offset = 0;

  friend auto operator<=>(const Posting&, const Posting&) = default;
};

/// Traversal instrumentation: counts the nodes touched while walking a
/// pattern, excluding any subtree collection that follows.
struct QueryStats {
  std::uint64_t nodes_visited = 0;
};

struct IndexOptions {
  /// When false the leaves keep occurrence counts only; locate() is
  /// unavailable and the serialized file omits the posting pairs.
  bool store_postings = true;
  /// Abort construction with a resource-limit error once the modeled size
  /// (node count x per-node cost + posting bytes) exceeds this. 0 = no limit.
  std::uint64_t modeled_byte_ceiling = 0;
};

/// "KSA1" on-disk format constants (all integers little-endian).
inline constexpr std::uint8_t kFileMagic[4] = {0x4B, 0x53, 0x41, 0x31};
inline constexpr std::uint16_t kFileVersion = 1;
inline constexpr std::uint8_t kFlagPostings = 0x01;

namespace detail {

inline constexpr std::uint32_t kNoChild = 0xFFFFFFFFu;

/// Rank-indexed child slots, sigma per node, in one flat vector.
class ArrayChildMap {
 public:
  static constexpr ChildMapKind kind = ChildMapKind::array;

  explicit ArrayChildMap(std::size_t sigma) : sigma_(sigma) {}

  void add_node() { slots_.resize(slots_.size() + sigma_, kNoChild); }

  std::uint32_t get(std::uint32_t node, std::uint8_t rank) const {
    return slots_[static_cast<std::size_t>(node) * sigma_ + rank];
  }

  void set(std::uint32_t node, std::uint8_t rank, std::uint32_t child) {
    slots_[static_cast<std::size_t>(node) * sigma_ + rank] = child;
  }

  std::size_t child_count(std::uint32_t node) const {
    std::size_t n = 0;
    for (std::size_t r = 0; r < sigma_; ++r)
      n += get(node, static_cast<std::uint8_t>(r)) != kNoChild;
    return n;
  }

  /// Visits children in ascending rank order.
  template <class Fn>
  void for_each(std::uint32_t node, Fn&& fn) const {
    for (std::size_t r = 0; r < sigma_; ++r) {
      std::uint32_t child = get(node, static_cast<std::uint8_t>(r));
      if (child != kNoChild) fn(static_cast<std::uint8_t>(r), child);
    }
  }

 private:
  std::size_t sigma_;
  std::vector<std::uint32_t> slots_;
};

/// Per-node sorted (rank, child) association list.
class SparseChildMap {
 public:
  static constexpr ChildMapKind kind = ChildMapKind::sparse;

  explicit SparseChildMap(std::size_t) {}

  void add_node() { rows_.emplace_back(); }

  std::uint32_t get(std::uint32_t node, std::uint8_t rank) const {
    const auto& row = rows_[node];
    auto it = std::lower_bound(
        row.begin(), row.end(), rank,
        [](const Edge& e, std::uint8_t r) { return e.rank < r; });
    return (it != row.end() && it->rank == rank) ? it->child : kNoChild;
  }

  void set(std::uint32_t node, std::uint8_t rank, std::uint32_t child) {
    auto& row = rows_[node];
    auto it = std::lower_bound(
        row.begin(), row.end(), rank,
        [](const Edge& e, std::uint8_t r) { return e.rank < r; });
    if (it != row.end() && it->rank == rank)
      it->child = child;
    else
      row.insert(it, Edge{rank, child});
  }

  std::size_t child_count(std::uint32_t node) const { return rows_[node].size(); }

  template <class Fn>
  void for_each(std::uint32_t node, Fn&& fn) const {
    for (const Edge& e : rows_[node]) fn(e.rank, e.child);
  }

 private:
  struct Edge {
    std::uint8_t rank;
    std::uint32_t child;
  };
  std::vector<std::vector<Edge>> rows_;
};

inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

/// Bounds-checked little-endian reader over a loaded byte buffer.
class WireCursor {
 public:
  WireCursor(const std::uint8_t* data, std::size_t size)
      : data_(data), size_(size) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return size_ - pos_; }

  void require(std::size_t n) const {
    if (size_ - pos_ < n)
      throw Error(ErrorKind::corrupt, "truncated index payload");
  }

  std::uint8_t u8() {
    require(1);
    return data_[pos_++];
  }
  std::uint16_t u16() {
    require(2);
    auto v = static_cast<std::uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    require(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    require(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

/// The trie proper, parameterized on child-map layout.
template <class ChildMap>
class TrieCore {
 public:
  TrieCore(std::uint32_t k, Alphabet alphabet, IndexOptions options)
      : k_(k),
        alphabet_(std::move(alphabet)),
        options_(options),
        children_(alphabet_.size()),
        node_cost_(node_cost_model(StructureKind::ksa, alphabet_.size(),
                                   ChildMap::kind)) {
    if (k_ == 0) throw Error(ErrorKind::invalid_parameter, "k must be at least 1");
    new_node();  // root
  }

  std::uint32_t k() const { return k_; }
  const Alphabet& alphabet() const { return alphabet_; }
  bool postings_enabled() const { return options_.store_postings; }
  bool frozen() const { return frozen_; }
  std::uint64_t total_windows() const { return total_windows_; }
  std::uint64_t node_count() const { return counts_.size(); }
  std::uint64_t short_sequence_count() const { return short_sequences_; }
  const std::map<std::uint32_t, std::uint64_t>& sequence_lengths() const {
    return sequence_lengths_;
  }
  ChildMapKind child_map_kind() const { return ChildMap::kind; }

  /// One build step: create the path spelling the k-mer (one node per
  /// symbol) and record the posting at its leaf. Re-inserting an existing
  /// k-mer adds no nodes, only the posting.
  void insert_kmer(std::span<const std::uint8_t> kmer, Posting posting) {
    require_mutable();
    if (kmer.size() != k_)
      throw Error(ErrorKind::kmer_length,
                  "k-mer length " + std::to_string(kmer.size()) +
                      " does not match k=" + std::to_string(k_));
    std::vector<std::uint8_t> ranks(kmer.size());
    for (std::size_t i = 0; i < kmer.size(); ++i) {
      int r = alphabet_.rank(kmer[i]);
      if (r < 0)
        throw Error(ErrorKind::alphabet,
                    "symbol code " + std::to_string(+kmer[i]) + " at position " +
                        std::to_string(i) + " is not in the alphabet");
      ranks[i] = static_cast<std::uint8_t>(r);
    }
    if (auto it = sequence_lengths_.find(posting.seq_id);
        it != sequence_lengths_.end()) {
      if (it->second < k_ || posting.offset > it->second - k_)
        throw Error(ErrorKind::invalid_parameter,
                    "posting offset " + std::to_string(posting.offset) +
                        " exceeds the last window of sequence " +
                        std::to_string(posting.seq_id));
    }
    add_window(ranks.data(), posting);
  }

  /// Slides the k-window over the sequence, inserting every window
  /// seq[i..i+k-1] with posting (seq_id, i). Returns the number of windows
  /// inserted: n - k + 1 when n >= k, else 0 (short sequences are recorded,
  /// not rejected).
  std::uint64_t index_sequence(std::span<const std::uint8_t> seq,
                               std::uint32_t seq_id) {
    require_mutable();
    if (sequence_lengths_.count(seq_id))
      throw Error(ErrorKind::duplicate_sequence,
                  "sequence id " + std::to_string(seq_id) + " is already indexed");
    std::vector<std::uint8_t> ranks(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
      int r = alphabet_.rank(seq[i]);
      if (r < 0)
        throw Error(ErrorKind::alphabet,
                    "symbol code " + std::to_string(+seq[i]) + " at offset " +
                        std::to_string(i) + " is not in the alphabet");
      ranks[i] = static_cast<std::uint8_t>(r);
    }
    sequence_lengths_[seq_id] = seq.size();
    if (seq.size() < k_) {
      ++short_sequences_;
      return 0;
    }
    const std::uint64_t windows = seq.size() - k_ + 1;
    for (std::uint64_t i = 0; i < windows; ++i)
      add_window(ranks.data() + i, Posting{seq_id, i});
    return windows;
  }

  /// Marks the end of construction; mutations throw afterwards. Any number
  /// of readers may then query concurrently without synchronization.
  void freeze() { frozen_ = true; }

  /// True iff the pattern is a prefix of at least one indexed window.
  /// Patterns shorter than k use window-prefix semantics, not general
  /// substring search. The empty pattern is a prefix of everything.
  bool contains(std::span<const std::uint8_t> pattern,
                QueryStats* qs = nullptr) const {
    check_pattern_length(pattern.size());
    return walk(pattern, qs).has_value();
  }

  /// All postings in the subtree reached by the pattern, sorted by
  /// (seq_id, offset). Exact occurrence positions when |pattern| = k;
  /// window-start positions of prefix matches when shorter.
  std::vector<Posting> locate(std::span<const std::uint8_t> pattern,
                              QueryStats* qs = nullptr) const {
    check_locate_pattern(pattern.size());
    if (!options_.store_postings)
      throw Error(ErrorKind::postings_disabled,
                  "index was built without postings; only counts are available");
    std::vector<Posting> out;
    if (auto node = walk(pattern, qs)) {
      walk_subtree(*node, static_cast<std::uint32_t>(pattern.size()),
                   [&](std::uint32_t leaf) {
                     for_each_posting(leaf,
                                      [&](Posting p) { out.push_back(p); });
                   });
      std::sort(out.begin(), out.end());
    }
    return out;
  }

  /// |locate(pattern)| without materializing the posting list. Works in
  /// count-only mode as well.
  std::uint64_t count_occurrences(std::span<const std::uint8_t> pattern,
                                  QueryStats* qs = nullptr) const {
    check_locate_pattern(pattern.size());
    std::uint64_t n = 0;
    if (auto node = walk(pattern, qs)) {
      walk_subtree(*node, static_cast<std::uint32_t>(pattern.size()),
                   [&](std::uint32_t leaf) { n += counts_[leaf]; });
    }
    return n;
  }

  /// Visits every distinct k-mer with its occurrence count, in lexicographic
  /// order by alphabet order. The string view is only valid for the call.
  template <class Fn>
  void for_each_kmer(Fn&& fn) const {
    if (total_windows_ == 0) return;
    std::string spelled(k_, '\0');
    walk_subtree(0, 0, [&](std::uint32_t leaf) {
      fn(std::string_view(spelled), counts_[leaf]);
    }, &spelled);
  }

  std::vector<std::pair<std::string, std::uint64_t>> find_frequent(
      std::uint64_t min_count) const {
    if (min_count == 0)
      throw Error(ErrorKind::invalid_parameter, "min_count must be at least 1");
    std::vector<std::pair<std::string, std::uint64_t>> out;
    for_each_kmer([&](std::string_view kmer, std::uint64_t count) {
      if (count >= min_count) out.emplace_back(std::string(kmer), count);
    });
    // Collected in lexicographic order; a stable sort by descending count
    // keeps that order within equal counts.
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
  }

  /// Exact counts by full traversal, plus the modeled byte estimate.
  IndexStats stats() const {
    IndexStats s;
    std::uint64_t windows = 0;
    struct Frame {
      std::uint32_t node;
      std::uint32_t depth;
    };
    std::vector<Frame> stack{{0, 0}};
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      ++s.node_count;
      std::size_t nchildren = children_.child_count(f.node);
      if (f.depth == k_) {
        if (nchildren != 0) throw Error(ErrorKind::corrupt, "node below depth k");
        ++s.leaf_count;
        windows += counts_[f.node];
      } else {
        if (nchildren == 0 && !(f.node == 0 && total_windows_ == 0))
          throw Error(ErrorKind::corrupt, "childless internal node");
        children_.for_each(f.node, [&](std::uint8_t, std::uint32_t child) {
          stack.push_back(Frame{child, f.depth + 1});
        });
      }
    }
    if (s.node_count != node_count() || windows != total_windows_)
      throw Error(ErrorKind::corrupt, "traversal disagrees with recorded counts");
    s.distinct_kmers = s.leaf_count;
    s.total_windows = windows;
    s.estimated_bytes = modeled_bytes();
    return s;
  }

  std::uint64_t modeled_bytes() const {
    std::uint64_t bytes = node_count() * node_cost_;
    if (options_.store_postings) bytes += total_windows_ * kPostingBytes;
    return bytes;
  }

  /// Serializes header + pre-order node stream + CRC-64 trailer ("KSA1").
  void save(std::ostream& out) const {
    std::string buf;
    buf.append(reinterpret_cast<const char*>(kFileMagic), 4);
    put_u16(buf, kFileVersion);
    put_u32(buf, k_);
    put_u16(buf, static_cast<std::uint16_t>(alphabet_.size()));
    for (std::uint8_t s : alphabet_.symbols()) buf.push_back(static_cast<char>(s));
    put_u32(buf, static_cast<std::uint32_t>(sequence_lengths_.size()));
    for (const auto& [id, len] : sequence_lengths_) {
      put_u32(buf, id);
      put_u64(buf, len);
    }
    buf.push_back(static_cast<char>(options_.store_postings ? kFlagPostings : 0));
    append_body(buf);
    std::uint64_t checksum = crc64(buf.data(), buf.size());
    put_u64(buf, checksum);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error(ErrorKind::io, "failed to write index stream");
  }

  /// Rebuilds a core from the node stream; header fields are already parsed.
  static TrieCore load_body(std::uint32_t k, Alphabet alphabet, IndexOptions options,
                            std::map<std::uint32_t, std::uint64_t> seq_lengths,
                            std::uint64_t short_sequences, WireCursor& cur,
                            std::uint64_t body_end) {
    TrieCore core(k, std::move(alphabet), options);
    core.sequence_lengths_ = std::move(seq_lengths);
    core.short_sequences_ = short_sequences;
    const std::size_t sigma = core.alphabet_.size();

    struct Frame {
      std::uint32_t node;
      std::uint32_t depth;
      std::uint64_t end;  // absolute offset one past this subtree
    };
    std::vector<Frame> stack{{0, 0, body_end}};
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      std::size_t nchildren = cur.u8();
      if (f.depth == core.k_) {
        if (nchildren != 0)
          throw Error(ErrorKind::corrupt, "leaf node with children in stream");
        std::uint64_t count = cur.u64();
        if (count == 0)
          throw Error(ErrorKind::corrupt, "leaf with zero occurrences");
        core.counts_[f.node] = count;
        core.total_windows_ += count;
        if (options.store_postings) {
          for (std::uint64_t i = 0; i < count; ++i) {
            Posting p{cur.u32(), cur.u64()};
            auto it = core.sequence_lengths_.find(p.seq_id);
            if (it != core.sequence_lengths_.end() &&
                (it->second < core.k_ || p.offset > it->second - core.k_))
              throw Error(ErrorKind::corrupt, "posting offset out of range");
            core.append_posting(f.node, p);
          }
        }
        if (cur.pos() != f.end)
          throw Error(ErrorKind::corrupt, "leaf record size mismatch");
        continue;
      }
      if (nchildren == 0) {
        if (f.node != 0)
          throw Error(ErrorKind::corrupt, "childless internal node in stream");
        if (cur.pos() != f.end)
          throw Error(ErrorKind::corrupt, "unexpected trailing node data");
        continue;  // empty index: bare root
      }
      if (nchildren > sigma)
        throw Error(ErrorKind::corrupt, "child count exceeds alphabet size");
      std::uint64_t child_start = cur.pos() + nchildren * 9u;
      int prev_rank = -1;
      std::vector<Frame> frames;
      frames.reserve(nchildren);
      for (std::size_t i = 0; i < nchildren; ++i) {
        std::uint8_t symbol = cur.u8();
        std::uint64_t sublen = cur.u64();
        int rank = core.alphabet_.rank(symbol);
        if (rank < 0)
          throw Error(ErrorKind::corrupt, "edge symbol outside alphabet");
        if (rank <= prev_rank)
          throw Error(ErrorKind::corrupt, "child symbols out of order");
        prev_rank = rank;
        if (sublen > f.end - child_start)
          throw Error(ErrorKind::corrupt, "subtree length overruns parent");
        std::uint32_t child = core.new_node();
        core.children_.set(f.node, static_cast<std::uint8_t>(rank), child);
        frames.push_back(Frame{child, f.depth + 1, child_start + sublen});
        child_start += sublen;
      }
      if (child_start != f.end)
        throw Error(ErrorKind::corrupt, "node record size mismatch");
      for (auto it = frames.rbegin(); it != frames.rend(); ++it)
        stack.push_back(*it);
    }
    return core;
  }

 private:
  void require_mutable() const {
    if (frozen_)
      throw Error(ErrorKind::index_frozen, "index is frozen; construction has ended");
  }

  std::uint32_t new_node() {
    if (counts_.size() >= kNoChild)
      throw Error(ErrorKind::resource_limit, "node id space is exhausted");
    children_.add_node();
    counts_.push_back(0);
    if (options_.store_postings) {
      posting_head_.push_back(kNoEntry);
      posting_tail_.push_back(kNoEntry);
    }
    return static_cast<std::uint32_t>(counts_.size() - 1);
  }

  void add_window(const std::uint8_t* ranks, Posting posting) {
    std::uint32_t node = 0;
    for (std::uint32_t d = 0; d < k_; ++d) {
      std::uint32_t child = children_.get(node, ranks[d]);
      if (child == kNoChild) {
        child = new_node();
        children_.set(node, ranks[d], child);
      }
      node = child;
    }
    ++counts_[node];
    if (options_.store_postings) append_posting(node, posting);
    ++total_windows_;
    if (options_.modeled_byte_ceiling != 0 &&
        modeled_bytes() > options_.modeled_byte_ceiling)
      throw Error(ErrorKind::resource_limit,
                  "modeled size exceeds the configured ceiling of " +
                      std::to_string(options_.modeled_byte_ceiling) + " bytes");
  }

  void check_pattern_length(std::size_t len) const {
    if (len > k_)
      throw Error(ErrorKind::pattern_too_long,
                  "pattern length " + std::to_string(len) +
                      " exceeds index k=" + std::to_string(k_));
  }

  void check_locate_pattern(std::size_t len) const {
    if (len == 0)
      throw Error(ErrorKind::invalid_parameter, "pattern must be non-empty");
    check_pattern_length(len);
  }

  /// Follows the pattern from the root; empty on a missing edge or a symbol
  /// outside the alphabet. Touches at most |pattern| + 1 nodes.
  std::optional<std::uint32_t> walk(std::span<const std::uint8_t> pattern,
                                    QueryStats* qs) const {
    std::uint32_t node = 0;
    if (qs) ++qs->nodes_visited;
    for (std::uint8_t symbol : pattern) {
      int r = alphabet_.rank(symbol);
      if (r < 0) return std::nullopt;
      std::uint32_t child = children_.get(node, static_cast<std::uint8_t>(r));
      if (child == kNoChild) return std::nullopt;
      node = child;
      if (qs) ++qs->nodes_visited;
    }
    return node;
  }

  /// Depth-first over the subtree in rank order, calling fn(leaf) at each
  /// leaf. When spell is given, slot d-1 holds the symbol entering depth d
  /// on the current path, so fn sees the spelled k-mer when started at the
  /// root.
  template <class Fn>
  void walk_subtree(std::uint32_t start, std::uint32_t start_depth, Fn&& fn,
                    std::string* spell = nullptr) const {
    struct Frame {
      std::uint32_t node;
      std::uint32_t depth;
      char symbol;
    };
    std::vector<Frame> stack{{start, start_depth, '\0'}};
    std::vector<Frame> scratch;
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      if (spell && f.depth > start_depth) (*spell)[f.depth - 1] = f.symbol;
      if (f.depth == k_) {
        fn(f.node);
        continue;
      }
      scratch.clear();
      children_.for_each(f.node, [&](std::uint8_t rank, std::uint32_t child) {
        scratch.push_back(Frame{child, f.depth + 1,
                                static_cast<char>(alphabet_.symbol(rank))});
      });
      for (auto it = scratch.rbegin(); it != scratch.rend(); ++it)
        stack.push_back(*it);
    }
  }

  /// Serialized size of every subtree, bottom-up.
  std::vector<std::uint64_t> subtree_sizes() const {
    std::vector<std::uint64_t> size(node_count(), 0);
    struct Frame {
      std::uint32_t node;
      std::uint32_t depth;
      bool expanded;
    };
    std::vector<Frame> stack{{0, 0, false}};
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.depth == k_) {
        std::uint64_t s = 1 + 8;  // child count + posting count
        if (options_.store_postings) s += counts_[f.node] * kPostingBytes;
        size[f.node] = s;
        stack.pop_back();
        continue;
      }
      if (!f.expanded) {
        f.expanded = true;
        std::uint32_t depth = f.depth;
        children_.for_each(f.node, [&](std::uint8_t, std::uint32_t child) {
          stack.push_back(Frame{child, depth + 1, false});
        });
        continue;
      }
      std::uint64_t s = 1;
      children_.for_each(f.node, [&](std::uint8_t, std::uint32_t child) {
        s += 9 + size[child];
      });
      size[f.node] = s;
      stack.pop_back();
    }
    return size;
  }

  void append_body(std::string& buf) const {
    std::vector<std::uint64_t> size = subtree_sizes();
    struct Frame {
      std::uint32_t node;
      std::uint32_t depth;
    };
    std::vector<Frame> stack{{0, 0}};
    std::vector<Frame> scratch;
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      if (f.depth == k_) {
        buf.push_back('\0');  // leaves have no children
        put_u64(buf, counts_[f.node]);
        if (options_.store_postings) {
          for_each_posting(f.node, [&](Posting p) {
            put_u32(buf, p.seq_id);
            put_u64(buf, p.offset);
          });
        }
        continue;
      }
      std::size_t nchildren = children_.child_count(f.node);
      if (nchildren > 255)
        throw Error(ErrorKind::bad_format,
                    "node with more than 255 children cannot be serialized "
                    "(KSA1 child-count field is 8-bit)");
      buf.push_back(static_cast<char>(nchildren));
      scratch.clear();
      children_.for_each(f.node, [&](std::uint8_t rank, std::uint32_t child) {
        buf.push_back(static_cast<char>(alphabet_.symbol(rank)));
        put_u64(buf, size[child]);
        scratch.push_back(Frame{child, f.depth + 1});
      });
      for (auto it = scratch.rbegin(); it != scratch.rend(); ++it)
        stack.push_back(*it);
    }
  }

  // Every leaf's postings form an insertion-ordered chain through one flat
  // pool, avoiding a heap allocation per leaf: entry i links to the next
  // posting of the same leaf via next, head/tail index the chain per node.
  struct PoolEntry {
    Posting posting;
    std::uint32_t next;
  };
  static constexpr std::uint32_t kNoEntry = 0xFFFFFFFFu;

  void append_posting(std::uint32_t node, Posting posting) {
    if (posting_pool_.size() >= kNoEntry)
      throw Error(ErrorKind::resource_limit, "posting pool is full");
    auto entry = static_cast<std::uint32_t>(posting_pool_.size());
    posting_pool_.push_back(PoolEntry{posting, kNoEntry});
    if (posting_tail_[node] == kNoEntry)
      posting_head_[node] = entry;
    else
      posting_pool_[posting_tail_[node]].next = entry;
    posting_tail_[node] = entry;
  }

  template <class Fn>
  void for_each_posting(std::uint32_t node, Fn&& fn) const {
    for (std::uint32_t e = posting_head_[node]; e != kNoEntry;
         e = posting_pool_[e].next)
      fn(posting_pool_[e].posting);
  }

  std::uint32_t k_;
  Alphabet alphabet_;
  IndexOptions options_;
  ChildMap children_;
  std::uint64_t node_cost_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint32_t> posting_head_;
  std::vector<std::uint32_t> posting_tail_;
  std::vector<PoolEntry> posting_pool_;
  std::map<std::uint32_t, std::uint64_t> sequence_lengths_;
  std::uint64_t total_windows_ = 0;
  std::uint64_t short_sequences_ = 0;
  bool frozen_ = false;
};

inline std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace detail

/// The k-mer window index. Small alphabets (<= 16 symbols) store children in
/// rank-indexed arrays, larger ones in sorted sparse lists; everything else
/// is identical between the two layouts.
///
/// Construction is single-writer. After freeze() (or once the builder stops
/// mutating), any number of threads may run queries concurrently; no query
/// mutates state.
class KmerIndex {
  using ArrayCore = detail::TrieCore<detail::ArrayChildMap>;
  using SparseCore = detail::TrieCore<detail::SparseChildMap>;
  using Core = std::variant<ArrayCore, SparseCore>;

  // Defined before first use: deduced return types must be visible to the
  // members below.
  template <class Fn>
  decltype(auto) visit(Fn&& fn) {
    return std::visit(std::forward<Fn>(fn), core_);
  }
  template <class Fn>
  decltype(auto) visit(Fn&& fn) const {
    return std::visit(std::forward<Fn>(fn), core_);
  }

 public:
  KmerIndex(std::uint32_t k, Alphabet alphabet, IndexOptions options = {})
      : core_(make_core(k, std::move(alphabet), options)) {}

  std::uint32_t k() const {
    return visit([](const auto& c) { return c.k(); });
  }
  const Alphabet& alphabet() const {
    return visit([](const auto& c) -> const Alphabet& { return c.alphabet(); });
  }
  bool postings_enabled() const {
    return visit([](const auto& c) { return c.postings_enabled(); });
  }
  bool frozen() const {
    return visit([](const auto& c) { return c.frozen(); });
  }
  std::uint64_t total_windows() const {
    return visit([](const auto& c) { return c.total_windows(); });
  }
  std::uint64_t node_count() const {
    return visit([](const auto& c) { return c.node_count(); });
  }
  std::uint64_t short_sequence_count() const {
    return visit([](const auto& c) { return c.short_sequence_count(); });
  }
  const std::map<std::uint32_t, std::uint64_t>& sequence_lengths() const {
    return visit([](const auto& c) -> const std::map<std::uint32_t, std::uint64_t>& {
      return c.sequence_lengths();
    });
  }
  ChildMapKind child_map_kind() const {
    return visit([](const auto& c) { return c.child_map_kind(); });
  }

  void insert_kmer(std::span<const std::uint8_t> kmer, Posting posting) {
    visit([&](auto& c) { c.insert_kmer(kmer, posting); });
  }
  void insert_kmer(std::string_view kmer, Posting posting) {
    insert_kmer(detail::as_bytes(kmer), posting);
  }

  std::uint64_t index_sequence(std::span<const std::uint8_t> seq, std::uint32_t seq_id) {
    return visit([&](auto& c) { return c.index_sequence(seq, seq_id); });
  }
  std::uint64_t index_sequence(std::string_view seq, std::uint32_t seq_id) {
    return index_sequence(detail::as_bytes(seq), seq_id);
  }

  void freeze() {
    visit([](auto& c) { c.freeze(); });
  }

  bool contains(std::span<const std::uint8_t> pattern, QueryStats* qs = nullptr) const {
    return visit([&](const auto& c) { return c.contains(pattern, qs); });
  }
  bool contains(std::string_view pattern, QueryStats* qs = nullptr) const {
    return contains(detail::as_bytes(pattern), qs);
  }

  std::vector<Posting> locate(std::span<const std::uint8_t> pattern,
                              QueryStats* qs = nullptr) const {
    return visit([&](const auto& c) { return c.locate(pattern, qs); });
  }
  std::vector<Posting> locate(std::string_view pattern, QueryStats* qs = nullptr) const {
    return locate(detail::as_bytes(pattern), qs);
  }

  std::uint64_t count_occurrences(std::span<const std::uint8_t> pattern,
                                  QueryStats* qs = nullptr) const {
    return visit([&](const auto& c) { return c.count_occurrences(pattern, qs); });
  }
  std::uint64_t count_occurrences(std::string_view pattern,
                                  QueryStats* qs = nullptr) const {
    return count_occurrences(detail::as_bytes(pattern), qs);
  }

  template <class Fn>
  void for_each_kmer(Fn&& fn) const {
    visit([&](const auto& c) { c.for_each_kmer(fn); });
  }

  std::vector<std::pair<std::string, std::uint64_t>> enumerate_kmers() const {
    std::vector<std::pair<std::string, std::uint64_t>> out;
    for_each_kmer([&](std::string_view kmer, std::uint64_t count) {
      out.emplace_back(std::string(kmer), count);
    });
    return out;
  }

  std::vector<std::pair<std::string, std::uint64_t>> find_frequent(
      std::uint64_t min_count) const {
    return visit([&](const auto& c) { return c.find_frequent(min_count); });
  }

  IndexStats stats() const {
    return visit([](const auto& c) { return c.stats(); });
  }

  std::uint64_t modeled_bytes() const {
    return visit([](const auto& c) { return c.modeled_bytes(); });
  }

  void save(std::ostream& out) const {
    visit([&](const auto& c) { c.save(out); });
  }

  void save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot open " + path + " for writing");
    save(out);
  }

  /// Parses a KSA1 stream. Distinct failures: bad magic, unsupported
  /// version, checksum mismatch, and structural corruption.
  static KmerIndex load(std::istream& in) {
    std::string buf((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    return load_buffer(buf);
  }

  static KmerIndex load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path + " for reading");
    return load(in);
  }

  static KmerIndex load_buffer(std::string_view buf) {
    const auto* data = reinterpret_cast<const std::uint8_t*>(buf.data());
    if (buf.size() < 4 || std::memcmp(data, kFileMagic, 4) != 0)
      throw Error(ErrorKind::bad_magic, "not a KSA1 index file");
    if (buf.size() < 4 + 2 + 8)
      throw Error(ErrorKind::corrupt, "file too short for header and checksum");
    detail::WireCursor cur(data, buf.size() - 8);
    cur.u32();  // magic, verified above
    std::uint16_t version = cur.u16();
    if (version != kFileVersion)
      throw Error(ErrorKind::unsupported_version,
                  "format version " + std::to_string(version) + " is not supported");
    {
      std::uint64_t stored = 0;
      for (int i = 0; i < 8; ++i)
        stored |= static_cast<std::uint64_t>(data[buf.size() - 8 + i]) << (8 * i);
      if (crc64(data, buf.size() - 8) != stored)
        throw Error(ErrorKind::checksum_mismatch,
                    "CRC-64 trailer does not match file contents");
    }
    std::uint32_t k = cur.u32();
    if (k == 0) throw Error(ErrorKind::corrupt, "header k is zero");
    std::uint16_t sigma = cur.u16();
    if (sigma == 0) throw Error(ErrorKind::corrupt, "header alphabet is empty");
    cur.require(sigma);
    std::vector<std::uint8_t> symbols(sigma);
    for (std::size_t i = 0; i < sigma; ++i) symbols[i] = cur.u8();
    std::optional<Alphabet> alphabet;
    try {
      alphabet.emplace(std::move(symbols));
    } catch (const Error&) {
      throw Error(ErrorKind::corrupt, "header alphabet has duplicate symbols");
    }
    std::uint32_t nseq = cur.u32();
    std::map<std::uint32_t, std::uint64_t> lengths;
    std::uint64_t short_sequences = 0;
    for (std::uint32_t i = 0; i < nseq; ++i) {
      std::uint32_t id = cur.u32();
      std::uint64_t len = cur.u64();
      if (!lengths.emplace(id, len).second)
        throw Error(ErrorKind::corrupt, "duplicate sequence id in header");
      if (len < k) ++short_sequences;
    }
    std::uint8_t flags = cur.u8();
    if (flags & ~kFlagPostings)
      throw Error(ErrorKind::corrupt, "unknown flag bits set");
    IndexOptions options;
    options.store_postings = (flags & kFlagPostings) != 0;
    std::uint64_t body_end = buf.size() - 8;
    KmerIndex index =
        alphabet->size() <= kArrayChildMapMaxSymbols
            ? KmerIndex(ArrayCore::load_body(k, std::move(*alphabet), options,
                                             std::move(lengths), short_sequences,
                                             cur, body_end))
            : KmerIndex(SparseCore::load_body(k, std::move(*alphabet), options,
                                              std::move(lengths), short_sequences,
                                              cur, body_end));
    if (cur.pos() != body_end)
      throw Error(ErrorKind::corrupt, "unparsed bytes after node stream");
    return index;
  }

 private:
  explicit KmerIndex(ArrayCore core) : core_(std::move(core)) {}
  explicit KmerIndex(SparseCore core) : core_(std::move(core)) {}

  static Core make_core(std::uint32_t k, Alphabet alphabet, IndexOptions options) {
    if (alphabet.size() <= kArrayChildMapMaxSymbols)
      return ArrayCore(k, std::move(alphabet), options);
    return SparseCore(k, std::move(alphabet), options);
  }

  Core core_;
};

}  // namespace ksa
