#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "ksa/error.hpp"

namespace ksa {

/// A finite ordered set of 8-bit symbol codes. The construction order is the
/// total order used everywhere: symbol ranks, child slots, lexicographic
/// enumeration. Immutable after construction.
class Alphabet {
 public:
  static constexpr int kNoRank = -1;

  explicit Alphabet(std::string_view symbols)
      : Alphabet(std::vector<std::uint8_t>(symbols.begin(), symbols.end())) {}

  explicit Alphabet(std::vector<std::uint8_t> symbols)
      : symbols_(std::move(symbols)) {
    if (symbols_.empty())
      throw Error(ErrorKind::invalid_parameter, "alphabet must be non-empty");
    ranks_.fill(kNoRank);
    for (std::size_t r = 0; r < symbols_.size(); ++r) {
      std::uint8_t s = symbols_[r];
      if (ranks_[s] != kNoRank)
        throw Error(ErrorKind::invalid_parameter,
                    "duplicate symbol in alphabet: code " + std::to_string(+s));
      ranks_[s] = static_cast<int>(r);
    }
  }

  /// {A, C, G, T}
  static Alphabet dna() { return Alphabet("ACGT"); }

  /// The 20 standard amino-acid letters, in ASCII order.
  static Alphabet protein() { return Alphabet("ACDEFGHIKLMNPQRSTVWY"); }

  /// All 256 byte values, 0x00 first.
  static Alphabet bytes() {
    std::vector<std::uint8_t> all(256);
    std::iota(all.begin(), all.end(), 0);
    return Alphabet(std::move(all));
  }

  std::size_t size() const noexcept { return symbols_.size(); }

  bool contains(std::uint8_t symbol) const noexcept {
    return ranks_[symbol] != kNoRank;
  }

  /// Rank of the symbol in alphabet order, or kNoRank if absent.
  int rank(std::uint8_t symbol) const noexcept { return ranks_[symbol]; }

  std::uint8_t symbol(std::size_t rank) const { return symbols_.at(rank); }

  const std::vector<std::uint8_t>& symbols() const noexcept { return symbols_; }

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.symbols_ == b.symbols_;
  }

 private:
  std::vector<std::uint8_t> symbols_;
  std::array<int, 256> ranks_{};
};

}  // namespace ksa
