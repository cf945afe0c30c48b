#pragma once

// Naive scanning oracle. Deliberately shares no traversal logic with the
// window trie or the suffix tree so it can serve as independent ground truth
// for both.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace ksa {

/// All 0-based offsets where pattern occurs in text as a plain substring,
/// ascending, found by direct comparison at every offset. The empty pattern
/// matches at every offset 0..|text|.
inline std::vector<std::uint64_t> brute_force_locate(std::string_view text,
                                                     std::string_view pattern) {
  std::vector<std::uint64_t> out;
  if (pattern.size() > text.size()) return out;
  for (std::size_t i = 0; i + pattern.size() <= text.size(); ++i) {
    if (text.compare(i, pattern.size(), pattern) == 0) out.push_back(i);
  }
  return out;
}

inline std::uint64_t brute_force_count(std::string_view text,
                                       std::string_view pattern) {
  return brute_force_locate(text, pattern).size();
}

/// Implemented via string_view::find rather than brute_force_locate so the
/// two can cross-check each other.
inline bool brute_force_contains(std::string_view text, std::string_view pattern) {
  return text.find(pattern) != std::string_view::npos;
}

/// Window-prefix ground truth: all window starts i (with i + k <= |text|)
/// where pattern is a prefix of the k-window text[i..i+k). Patterns longer
/// than k match nothing; the empty pattern matches every window.
inline std::vector<std::uint64_t> brute_force_window_starts(std::string_view text,
                                                            std::string_view pattern,
                                                            std::size_t k) {
  std::vector<std::uint64_t> out;
  if (pattern.size() > k || text.size() < k) return out;
  for (std::size_t i = 0; i + k <= text.size(); ++i) {
    if (text.compare(i, pattern.size(), pattern) == 0) out.push_back(i);
  }
  return out;
}

}  // namespace ksa
