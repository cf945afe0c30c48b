#pragma once

// Benchmark harness: builds the window trie and the suffix-tree baseline
// over configured inputs and k values, and reports per combination the node
// counts, deterministic modeled bytes, best-effort OS peak memory, build
// wall time (median of repetitions), and query throughput over a fixed
// seeded workload of 1000 patterns (500 sampled from the text, 500 random).
// Rows run sequentially; nothing is parallelized inside a build.
//
// Config file: flat key-value lines ("key = value"), full-line '#' comments
// and blank lines ignored. Keys:
//
//   input       = LABEL KIND:REST   (repeatable; KIND in {fasta, plain,
//                                    synthetic}; REST is a path, or
//                                    LENGTH[:SEED] for synthetic)
//   alphabet    = dna | protein | bytes          (default dna)
//   k           = comma-separated integers >= 1  (default 5,10,15)
//   structures  = comma subset of {ksa, suffix_tree}  (default both)
//   postings    = on | off | true | false        (default on)
//   repetitions = integer >= 1                   (default 1)
//   memory_ceiling_bytes = integer, 0 = unlimited (default 4 GiB)
//   seed        = query workload seed            (default 42)
//   output      = CSV path                       (default bench.csv)
//
// CSV schema (one header row, then one line per row, deterministic):
//   dataset,text_size,structure,k,node_count,leaf_count,modeled_bytes,
//   measured_peak_bytes,build_seconds,queries_per_second
// A build aborted by the memory ceiling renders its modeled and measured
// fields as ">CEILING" and leaves the other measurements empty.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ksa/alphabet.hpp"
#include "ksa/cost_model.hpp"
#include "ksa/error.hpp"
#include "ksa/kmer_index.hpp"
#include "ksa/sequence_io.hpp"
#include "ksa/suffix_tree.hpp"

namespace ksa {

struct BenchInput {
  enum class Kind { fasta, plain, synthetic };
  std::string label;
  Kind kind = Kind::fasta;
  std::string path;          // fasta / plain
  std::uint64_t length = 0;  // synthetic
  std::uint64_t seed = 1;    // synthetic
};

struct BenchConfig {
  std::vector<BenchInput> inputs;
  std::vector<std::uint32_t> k_values{5, 10, 15};
  std::vector<StructureKind> structures{StructureKind::ksa, StructureKind::suffix_tree};
  bool postings_enabled = true;
  std::uint32_t repetitions = 1;
  std::uint64_t memory_ceiling_bytes = 4ull * 1024 * 1024 * 1024;
  std::uint64_t workload_seed = 42;
  std::string output = "bench.csv";
  Alphabet alphabet = Alphabet::dna();
};

struct BenchRow {
  std::string dataset;
  std::uint64_t text_size = 0;
  StructureKind structure = StructureKind::ksa;
  std::uint32_t k = 0;
  bool aborted = false;        // memory ceiling hit during construction
  std::uint64_t ceiling = 0;   // rendered as ">ceiling" when aborted
  std::uint64_t node_count = 0;
  std::uint64_t leaf_count = 0;
  std::uint64_t modeled_bytes = 0;
  std::optional<std::uint64_t> measured_peak_bytes;
  double build_seconds = 0.0;
  std::optional<double> queries_per_second;
};

struct BenchError {
  std::string dataset;
  std::string structure;
  std::uint32_t k = 0;
  std::string message;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<BenchError> errors;
  /// Construction algorithms behind the rows, for the record.
  std::string trie_construction = "sliding-window insertion";
  std::string suffix_tree_construction = "ukkonen";
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_ascii_space(static_cast<std::uint8_t>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && is_ascii_space(static_cast<std::uint8_t>(s.back())))
    s.remove_suffix(1);
  return s;
}

inline std::uint64_t parse_number(std::string_view s, std::uint64_t line_no,
                                  std::string_view what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorKind::bad_format,
                "line " + std::to_string(line_no) + ": " + std::string(what) +
                    " expects an unsigned integer, got '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t at = s.find(sep, start);
    if (at == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, at - start));
    start = at + 1;
  }
}

inline BenchInput parse_bench_input(std::string_view value, std::uint64_t line_no) {
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorKind::bad_format,
                 "line " + std::to_string(line_no) + ": " + why +
                     " (expected 'LABEL KIND:REST')");
  };
  std::size_t gap = value.find_first_of(" \t");
  if (gap == std::string_view::npos) throw fail("input needs a label and a source");
  BenchInput in;
  in.label = std::string(trim(value.substr(0, gap)));
  if (in.label.find(',') != std::string::npos)
    throw fail("input label must not contain a comma");
  std::string_view source = trim(value.substr(gap + 1));
  std::size_t colon = source.find(':');
  if (colon == std::string_view::npos) throw fail("input source needs 'KIND:REST'");
  std::string_view kind = source.substr(0, colon);
  std::string_view rest = source.substr(colon + 1);
  if (kind == "fasta" || kind == "plain") {
    in.kind = kind == "fasta" ? BenchInput::Kind::fasta : BenchInput::Kind::plain;
    if (rest.empty()) throw fail("input path is empty");
    in.path = std::string(rest);
  } else if (kind == "synthetic") {
    in.kind = BenchInput::Kind::synthetic;
    auto parts = split(rest, ':');
    if (parts.empty() || parts.size() > 2)
      throw fail("synthetic input expects 'LENGTH' or 'LENGTH:SEED'");
    in.length = parse_number(trim(parts[0]), line_no, "synthetic length");
    if (parts.size() == 2)
      in.seed = parse_number(trim(parts[1]), line_no, "synthetic seed");
  } else {
    throw fail("unknown input kind '" + std::string(kind) + "'");
  }
  return in;
}

inline std::optional<std::uint64_t> vm_hwm_bytes() {
  std::ifstream in("/proc/self/status");
  if (!in) return std::nullopt;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) != 0) continue;
    std::uint64_t kb = 0;
    bool any = false;
    for (char ch : line) {
      if (ch >= '0' && ch <= '9') {
        kb = kb * 10 + static_cast<std::uint64_t>(ch - '0');
        any = true;
      } else if (any) {
        break;
      }
    }
    if (!any) return std::nullopt;
    return kb * 1024;
  }
  return std::nullopt;
}

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

struct Workload {
  std::vector<std::string> patterns;  // all of length k
  std::size_t sampled = 0;            // the first `sampled` come from the text
};

inline Workload make_workload(const std::vector<SequenceRecord>& records,
                              std::uint32_t k, const Alphabet& alphabet,
                              std::uint64_t seed) {
  constexpr std::size_t kTotal = 1000;
  constexpr std::size_t kSampled = 500;
  std::mt19937_64 gen(seed);
  Workload w;
  w.patterns.reserve(kTotal);
  std::uint64_t windows = 0;
  for (const SequenceRecord& r : records)
    if (r.data.size() >= k) windows += r.data.size() - k + 1;
  if (windows > 0) {
    for (std::size_t i = 0; i < kSampled; ++i) {
      std::uint64_t g = gen() % windows;
      for (const SequenceRecord& r : records) {
        if (r.data.size() < k) continue;
        std::uint64_t here = r.data.size() - k + 1;
        if (g < here) {
          w.patterns.push_back(r.data.substr(g, k));
          break;
        }
        g -= here;
      }
    }
    w.sampled = kSampled;
  }
  const auto& symbols = alphabet.symbols();
  while (w.patterns.size() < kTotal) {
    std::string p(k, '\0');
    for (std::uint32_t i = 0; i < k; ++i)
      p[i] = static_cast<char>(symbols[gen() % symbols.size()]);
    w.patterns.push_back(std::move(p));
  }
  return w;
}

}  // namespace detail

inline BenchConfig parse_bench_config(std::istream& in) {
  BenchConfig config;
  bool saw_k = false;
  bool saw_structures = false;
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = detail::trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    std::size_t eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::bad_format,
                  "line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string_view key = detail::trim(sv.substr(0, eq));
    std::string_view value = detail::trim(sv.substr(eq + 1));
    if (key == "input") {
      config.inputs.push_back(detail::parse_bench_input(value, line_no));
    } else if (key == "alphabet") {
      if (value == "dna")
        config.alphabet = Alphabet::dna();
      else if (value == "protein")
        config.alphabet = Alphabet::protein();
      else if (value == "bytes")
        config.alphabet = Alphabet::bytes();
      else
        throw Error(ErrorKind::bad_format,
                    "line " + std::to_string(line_no) + ": unknown alphabet '" +
                        std::string(value) + "'");
    } else if (key == "k") {
      if (!saw_k) {
        config.k_values.clear();
        saw_k = true;
      }
      for (std::string_view part : detail::split(value, ',')) {
        std::uint64_t k = detail::parse_number(detail::trim(part), line_no, "k");
        if (k == 0)
          throw Error(ErrorKind::bad_format,
                      "line " + std::to_string(line_no) + ": k must be at least 1");
        config.k_values.push_back(static_cast<std::uint32_t>(k));
      }
    } else if (key == "structures") {
      if (!saw_structures) {
        config.structures.clear();
        saw_structures = true;
      }
      for (std::string_view part : detail::split(value, ',')) {
        std::string_view name = detail::trim(part);
        if (name == "ksa")
          config.structures.push_back(StructureKind::ksa);
        else if (name == "suffix_tree")
          config.structures.push_back(StructureKind::suffix_tree);
        else
          throw Error(ErrorKind::bad_format,
                      "line " + std::to_string(line_no) + ": unknown structure '" +
                          std::string(name) + "'");
      }
    } else if (key == "postings") {
      if (value == "on" || value == "true" || value == "1")
        config.postings_enabled = true;
      else if (value == "off" || value == "false" || value == "0")
        config.postings_enabled = false;
      else
        throw Error(ErrorKind::bad_format,
                    "line " + std::to_string(line_no) + ": postings expects on/off");
    } else if (key == "repetitions") {
      std::uint64_t r = detail::parse_number(value, line_no, "repetitions");
      if (r == 0)
        throw Error(ErrorKind::bad_format,
                    "line " + std::to_string(line_no) + ": repetitions must be at least 1");
      config.repetitions = static_cast<std::uint32_t>(r);
    } else if (key == "memory_ceiling_bytes") {
      config.memory_ceiling_bytes = detail::parse_number(value, line_no, "memory_ceiling_bytes");
    } else if (key == "seed") {
      config.workload_seed = detail::parse_number(value, line_no, "seed");
    } else if (key == "output") {
      if (value.empty())
        throw Error(ErrorKind::bad_format,
                    "line " + std::to_string(line_no) + ": output path is empty");
      config.output = std::string(value);
    } else {
      throw Error(ErrorKind::bad_format,
                  "line " + std::to_string(line_no) + ": unknown key '" +
                      std::string(key) + "'");
    }
  }
  if (config.structures.empty())
    throw Error(ErrorKind::bad_format, "structures list is empty");
  if (config.k_values.empty())
    throw Error(ErrorKind::bad_format, "k list is empty");
  return config;
}

inline BenchConfig parse_bench_config(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_bench_config(in);
}

namespace detail {

struct LoadedInput {
  std::vector<SequenceRecord> records;
  std::uint64_t text_size = 0;
};

inline LoadedInput load_bench_input(const BenchInput& in, const Alphabet& alphabet) {
  LoadedInput out;
  switch (in.kind) {
    case BenchInput::Kind::fasta: {
      std::ifstream f(in.path, std::ios::binary);
      if (!f) throw Error(ErrorKind::io, "cannot open " + in.path + " for reading");
      out.records = read_fasta(f, alphabet);
      break;
    }
    case BenchInput::Kind::plain: {
      std::ifstream f(in.path, std::ios::binary);
      if (!f) throw Error(ErrorKind::io, "cannot open " + in.path + " for reading");
      out.records.push_back(read_plain(f, alphabet));
      break;
    }
    case BenchInput::Kind::synthetic:
      out.records.push_back(synthesize_sequence(in.length, alphabet, in.seed));
      break;
  }
  for (const SequenceRecord& r : out.records) out.text_size += r.data.size();
  return out;
}

/// Suffix-tree baseline over a multi-record input: one tree per non-empty
/// record, stats summed across the forest. Length-k queries then count the
/// same occurrences as the generalized window trie over the same records.
inline std::vector<SuffixTree> build_st_forest(const std::vector<SequenceRecord>& records,
                                               const Alphabet& alphabet,
                                               std::uint64_t ceiling) {
  std::vector<SuffixTree> forest;
  std::uint64_t used = 0;
  for (const SequenceRecord& r : records) {
    if (r.data.empty()) continue;
    std::uint64_t remaining = 0;
    if (ceiling != 0) {
      if (used >= ceiling)
        throw Error(ErrorKind::resource_limit,
                    "modeled size exceeds the configured ceiling of " +
                        std::to_string(ceiling) + " bytes");
      remaining = ceiling - used;
    }
    forest.emplace_back(r.data, alphabet, remaining);
    used += forest.back().modeled_bytes();
  }
  return forest;
}

inline std::uint64_t forest_count(const std::vector<SuffixTree>& forest,
                                  std::string_view pattern) {
  std::uint64_t n = 0;
  for (const SuffixTree& t : forest) n += t.count(pattern);
  return n;
}

}  // namespace detail

inline BenchReport run_benchmark(const BenchConfig& config) {
  using Clock = std::chrono::steady_clock;
  BenchReport report;
  for (const BenchInput& bi : config.inputs) {
    detail::LoadedInput li;
    try {
      li = detail::load_bench_input(bi, config.alphabet);
    } catch (const Error& e) {
      for (std::uint32_t k : config.k_values)
        for (StructureKind s : config.structures)
          report.errors.push_back(BenchError{bi.label, to_string(s), k, e.what()});
      continue;
    }
    for (std::uint32_t k : config.k_values) {
      detail::Workload workload =
          detail::make_workload(li.records, k, config.alphabet, config.workload_seed);
      std::optional<KmerIndex> trie;
      std::optional<std::vector<SuffixTree>> forest;
      for (StructureKind s : config.structures) {
        BenchRow row;
        row.dataset = bi.label;
        row.text_size = li.text_size;
        row.structure = s;
        row.k = k;
        row.ceiling = config.memory_ceiling_bytes;
        try {
          std::vector<double> times;
          std::optional<std::uint64_t> hwm_before, hwm_after;
          for (std::uint32_t rep = 0; rep < config.repetitions; ++rep) {
            if (rep == 0) hwm_before = detail::vm_hwm_bytes();
            Clock::time_point t0 = Clock::now();
            if (s == StructureKind::ksa) {
              IndexOptions options;
              options.store_postings = config.postings_enabled;
              options.modeled_byte_ceiling = config.memory_ceiling_bytes;
              KmerIndex idx(k, config.alphabet, options);
              for (const SequenceRecord& r : li.records)
                idx.index_sequence(r.data, r.seq_id);
              idx.freeze();
              trie.emplace(std::move(idx));
            } else {
              forest.emplace(detail::build_st_forest(li.records, config.alphabet,
                                                     config.memory_ceiling_bytes));
            }
            Clock::time_point t1 = Clock::now();
            times.push_back(std::chrono::duration<double>(t1 - t0).count());
            if (rep == 0) hwm_after = detail::vm_hwm_bytes();
          }
          row.build_seconds = detail::median(std::move(times));
          if (hwm_before && hwm_after && *hwm_after >= *hwm_before)
            row.measured_peak_bytes = *hwm_after - *hwm_before;
          if (s == StructureKind::ksa) {
            IndexStats st = trie->stats();
            row.node_count = st.node_count;
            row.leaf_count = st.leaf_count;
            row.modeled_bytes = st.estimated_bytes;
          } else {
            for (const SuffixTree& t : *forest) {
              IndexStats st = t.stats();
              row.node_count += st.node_count;
              row.leaf_count += st.leaf_count;
              row.modeled_bytes += st.estimated_bytes;
            }
          }
          auto count_one = [&](const std::string& p) {
            return s == StructureKind::ksa ? trie->count_occurrences(p)
                                           : detail::forest_count(*forest, p);
          };
          for (std::size_t i = 0; i < workload.sampled; ++i) {
            if (count_one(workload.patterns[i]) == 0) {
              report.errors.push_back(BenchError{
                  bi.label, to_string(s), k,
                  "text-sampled pattern '" + workload.patterns[i] +
                      "' has zero count"});
              break;
            }
          }
          if (!workload.patterns.empty()) {
            Clock::time_point q0 = Clock::now();
            std::uint64_t sink = 0;
            for (const std::string& p : workload.patterns) sink += count_one(p);
            Clock::time_point q1 = Clock::now();
            double secs = std::chrono::duration<double>(q1 - q0).count();
            (void)sink;
            if (secs > 0)
              row.queries_per_second =
                  static_cast<double>(workload.patterns.size()) / secs;
          }
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::resource_limit) {
            row.aborted = true;
            row.node_count = 0;
            row.leaf_count = 0;
            row.modeled_bytes = 0;
            row.measured_peak_bytes.reset();
            row.build_seconds = 0;
            row.queries_per_second.reset();
            if (s == StructureKind::ksa)
              trie.reset();
            else
              forest.reset();
            report.rows.push_back(std::move(row));
            continue;
          }
          report.errors.push_back(BenchError{bi.label, to_string(s), k, e.what()});
          continue;
        }
        report.rows.push_back(std::move(row));
      }
      if (trie && forest) {
        for (const std::string& p : workload.patterns) {
          if (trie->count_occurrences(p) != detail::forest_count(*forest, p)) {
            report.errors.push_back(BenchError{
                bi.label, "ksa+suffix_tree", k,
                "structures disagree on length-k pattern '" + p + "'"});
            break;
          }
        }
      }
    }
  }
  return report;
}

inline void emit_csv(const BenchReport& report, std::ostream& out) {
  out << "dataset,text_size,structure,k,node_count,leaf_count,modeled_bytes,"
         "measured_peak_bytes,build_seconds,queries_per_second\n";
  char buf[64];
  for (const BenchRow& row : report.rows) {
    out << row.dataset << ',' << row.text_size << ',' << to_string(row.structure)
        << ',' << row.k << ',';
    if (row.aborted) {
      out << ",,>" << row.ceiling << ",>" << row.ceiling << ",,";
    } else {
      out << row.node_count << ',' << row.leaf_count << ',' << row.modeled_bytes << ',';
      if (row.measured_peak_bytes) out << *row.measured_peak_bytes;
      out << ',';
      std::snprintf(buf, sizeof buf, "%.6f", row.build_seconds);
      out << buf << ',';
      if (row.queries_per_second) {
        std::snprintf(buf, sizeof buf, "%.3f", *row.queries_per_second);
        out << buf;
      }
    }
    out << '\n';
  }
}

inline void emit_csv(const BenchReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path + " for writing");
  emit_csv(report, out);
  if (!out) throw Error(ErrorKind::io, "failed to write " + path);
}

}  // namespace ksa
