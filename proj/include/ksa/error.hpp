#pragma once

#include <stdexcept>
#include <string>

namespace ksa {

/// Category of a library failure. Callers that need to branch on the cause
/// (CLI exit codes, recovery paths) switch on this instead of parsing text.
enum class ErrorKind {
  invalid_parameter,
  kmer_length,
  alphabet,
  duplicate_sequence,
  pattern_too_long,
  postings_disabled,
  index_frozen,
  empty_input,
  bad_format,
  io,
  bad_magic,
  unsupported_version,
  checksum_mismatch,
  corrupt,
  resource_limit,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::kmer_length: return "kmer-length";
    case ErrorKind::alphabet: return "alphabet";
    case ErrorKind::duplicate_sequence: return "duplicate-sequence";
    case ErrorKind::pattern_too_long: return "pattern-too-long";
    case ErrorKind::postings_disabled: return "postings-disabled";
    case ErrorKind::index_frozen: return "index-frozen";
    case ErrorKind::empty_input: return "empty-input";
    case ErrorKind::bad_format: return "bad-format";
    case ErrorKind::io: return "io";
    case ErrorKind::bad_magic: return "bad-magic";
    case ErrorKind::unsupported_version: return "unsupported-version";
    case ErrorKind::checksum_mismatch: return "checksum-mismatch";
    case ErrorKind::corrupt: return "corrupt";
    case ErrorKind::resource_limit: return "resource-limit";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ksa
