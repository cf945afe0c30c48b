#pragma once

// Sequence ingestion: FASTA and plain text, with the normalization pipeline
// applied byte-by-byte in this order:
//
//   1. ASCII whitespace is removed (sequence lines are concatenated).
//   2. A byte already in the alphabet is kept.
//   3. A byte whose ASCII uppercase form is in the alphabet is kept folded.
//   4. 'N'/'n' is stripped and counted, but only when 'N' is not itself an
//      alphabet symbol (the protein alphabet keeps asparagine).
//   5. Anything else is an error naming the line and absolute byte offset.
//
// Offsets in postings always refer to the post-normalization sequence.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ksa/alphabet.hpp"
#include "ksa/error.hpp"

namespace ksa {

struct SequenceRecord {
  std::uint32_t seq_id = 0;
  std::string name;  // FASTA header text after '>'; empty for plain input
  std::string data;
  std::uint64_t stripped_n_count = 0;
  /// Residue bytes before N-stripping (whitespace excluded):
  /// original_length = |data| + stripped_n_count.
  std::uint64_t original_length = 0;
};

namespace detail {

inline bool is_ascii_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

inline std::string describe_symbol(std::uint8_t c) {
  char hex[8];
  std::snprintf(hex, sizeof hex, "0x%02X", c);
  if (c >= 0x21 && c <= 0x7E)
    return std::string("symbol '") + static_cast<char>(c) + "' (" + hex + ")";
  return std::string("symbol ") + hex;
}

/// Applies pipeline steps 2-5 to one non-whitespace byte.
inline void normalize_residue(const Alphabet& alphabet, bool strip_n, std::uint8_t c,
                              std::uint64_t line_no, std::uint64_t byte_offset,
                              std::string& data, std::uint64_t& stripped) {
  if (alphabet.contains(c)) {
    data.push_back(static_cast<char>(c));
    return;
  }
  auto upper = static_cast<std::uint8_t>(std::toupper(c));
  if (upper != c && alphabet.contains(upper)) {
    data.push_back(static_cast<char>(upper));
    return;
  }
  if (strip_n && (c == 'N' || c == 'n')) {
    ++stripped;
    return;
  }
  throw Error(ErrorKind::alphabet,
              "line " + std::to_string(line_no) + ", byte " +
                  std::to_string(byte_offset) + ": " + describe_symbol(c) +
                  " is not in the alphabet");
}

}  // namespace detail

/// Streams FASTA records to fn(SequenceRecord&&) as each block completes, so
/// peak memory is bounded by the largest record. seq_ids are dense and
/// 0-based in encounter order within this call.
template <class Fn>
void for_each_fasta_record(std::istream& in, const Alphabet& alphabet, Fn&& fn) {
  const bool strip_n = !alphabet.contains(static_cast<std::uint8_t>('N'));
  std::string line;
  std::uint64_t line_no = 0;
  std::uint64_t offset = 0;  // absolute 0-based offset of the current line
  std::uint32_t next_id = 0;
  bool in_record = false;
  SequenceRecord record;

  auto emit = [&] {
    record.original_length = record.data.size() + record.stripped_n_count;
    fn(std::move(record));
    record = SequenceRecord{};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.front() == '>') {
      if (in_record) emit();
      in_record = true;
      record.seq_id = next_id++;
      std::string name = line.substr(1);
      while (!name.empty() && detail::is_ascii_space(static_cast<std::uint8_t>(name.back())))
        name.pop_back();
      record.name = std::move(name);
    } else {
      for (std::size_t i = 0; i < line.size(); ++i) {
        auto c = static_cast<std::uint8_t>(line[i]);
        if (detail::is_ascii_space(c)) continue;
        if (!in_record)
          throw Error(ErrorKind::bad_format,
                      "line " + std::to_string(line_no) +
                          ": sequence data before the first '>' header");
        detail::normalize_residue(alphabet, strip_n, c, line_no, offset + i,
                                  record.data, record.stripped_n_count);
      }
    }
    offset += line.size() + 1;
  }
  if (!in_record)
    throw Error(ErrorKind::empty_input, "no FASTA records in input");
  emit();
}

inline std::vector<SequenceRecord> read_fasta(std::istream& in, const Alphabet& alphabet) {
  std::vector<SequenceRecord> records;
  for_each_fasta_record(in, alphabet,
                        [&](SequenceRecord&& r) { records.push_back(std::move(r)); });
  return records;
}

inline std::vector<SequenceRecord> read_fasta(std::string_view text, const Alphabet& alphabet) {
  std::istringstream in{std::string(text)};
  return read_fasta(in, alphabet);
}

/// Whole stream as one unnamed record: whitespace (including newlines)
/// removed, then the same normalization pipeline as FASTA.
inline SequenceRecord read_plain(std::istream& in, const Alphabet& alphabet) {
  const bool strip_n = !alphabet.contains(static_cast<std::uint8_t>('N'));
  SequenceRecord record;
  std::string line;
  std::uint64_t line_no = 0;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (std::size_t i = 0; i < line.size(); ++i) {
      auto c = static_cast<std::uint8_t>(line[i]);
      if (detail::is_ascii_space(c)) continue;
      detail::normalize_residue(alphabet, strip_n, c, line_no, offset + i,
                                record.data, record.stripped_n_count);
    }
    offset += line.size() + 1;
  }
  if (record.data.empty() && record.stripped_n_count == 0)
    throw Error(ErrorKind::empty_input, "input contains no sequence data");
  record.original_length = record.data.size() + record.stripped_n_count;
  return record;
}

inline SequenceRecord read_plain(std::string_view text, const Alphabet& alphabet) {
  std::istringstream in{std::string(text)};
  return read_plain(in, alphabet);
}

/// Uniform random sequence over the alphabet; deterministic for a given
/// seed. Generator is pinned: std::mt19937_64(seed), symbol index
/// gen() % alphabet size. A zero length writes a warning to `warnings` when
/// a sink is provided.
inline SequenceRecord synthesize_sequence(std::uint64_t length, const Alphabet& alphabet,
                                          std::uint64_t seed,
                                          std::ostream* warnings = nullptr) {
  SequenceRecord record;
  record.name = "synthetic";
  if (length == 0 && warnings)
    *warnings << "warning: synthesized sequence has zero length\n";
  std::mt19937_64 gen(seed);
  const auto& symbols = alphabet.symbols();
  record.data.reserve(length);
  for (std::uint64_t i = 0; i < length; ++i)
    record.data.push_back(static_cast<char>(symbols[gen() % symbols.size()]));
  record.original_length = length;
  return record;
}

}  // namespace ksa
