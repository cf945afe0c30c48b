// Command-line front end: build, search, kmers, stats, bench.
//
// Exit codes: 0 success, 1 domain errors (bad alphabet symbol, pattern too
// long, corrupt index, ...), 2 usage errors. Machine-readable output goes to
// standard output, diagnostics and warnings to standard error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ksa/ksa.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomainError = 1;
constexpr int kExitUsage = 2;

ksa::Alphabet alphabet_from_name(const std::string& name) {
  if (name == "dna") return ksa::Alphabet::dna();
  if (name == "protein") return ksa::Alphabet::protein();
  return ksa::Alphabet::bytes();
}

struct BuildArgs {
  std::uint32_t k = 0;
  std::vector<std::string> inputs;
  std::string format = "fasta";
  std::string alphabet = "dna";
  bool no_postings = false;
  std::string out;
};

struct SearchArgs {
  std::string index;
  std::optional<std::string> pattern;
  std::string patterns_file;
  bool count_only = false;
};

struct KmersArgs {
  std::string index;
  std::uint64_t min_count = 1;
};

/// Reads one input file (or "-" for standard input) into records.
std::vector<ksa::SequenceRecord> read_input(const std::string& path,
                                            const std::string& format,
                                            const ksa::Alphabet& alphabet) {
  auto read_stream = [&](std::istream& in) {
    std::vector<ksa::SequenceRecord> records;
    if (format == "fasta")
      records = ksa::read_fasta(in, alphabet);
    else
      records.push_back(ksa::read_plain(in, alphabet));
    return records;
  };
  if (path == "-") return read_stream(std::cin);
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ksa::Error(ksa::ErrorKind::io, "cannot open " + path + " for reading");
  return read_stream(in);
}

int run_build(const BuildArgs& args) {
  ksa::Alphabet alphabet = alphabet_from_name(args.alphabet);
  ksa::IndexOptions options;
  options.store_postings = !args.no_postings;
  ksa::KmerIndex index(args.k, alphabet, options);
  std::uint32_t seq_id = 0;
  std::uint64_t sequences = 0;
  for (const std::string& path : args.inputs) {
    for (ksa::SequenceRecord& record : read_input(path, args.format, alphabet)) {
      index.index_sequence(record.data, seq_id);
      if (record.data.size() < args.k)
        std::cerr << "warning: record " << seq_id << " length " << record.data.size()
                  << " is shorter than k=" << args.k << "; no windows inserted\n";
      ++seq_id;
      ++sequences;
    }
  }
  index.freeze();
  index.save_file(args.out);
  std::cout << "k=" << index.k() << " sequences=" << sequences
            << " windows=" << index.total_windows() << " nodes=" << index.node_count()
            << " modeled_bytes=" << index.modeled_bytes() << "\n";
  return kExitOk;
}

/// Patterns for a bytes-alphabet index are length-prefixed binary records
/// (little-endian u32 length, then that many bytes); anything else is one
/// pattern per line.
std::vector<std::string> read_patterns_file(const std::string& path,
                                            bool length_prefixed) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ksa::Error(ksa::ErrorKind::io, "cannot open " + path + " for reading");
  std::vector<std::string> patterns;
  if (length_prefixed) {
    while (true) {
      unsigned char lenbuf[4];
      in.read(reinterpret_cast<char*>(lenbuf), 4);
      if (in.gcount() == 0 && in.eof()) break;
      if (in.gcount() != 4)
        throw ksa::Error(ksa::ErrorKind::bad_format,
                         "truncated length prefix in " + path);
      std::uint32_t len = static_cast<std::uint32_t>(lenbuf[0]) |
                          (static_cast<std::uint32_t>(lenbuf[1]) << 8) |
                          (static_cast<std::uint32_t>(lenbuf[2]) << 16) |
                          (static_cast<std::uint32_t>(lenbuf[3]) << 24);
      std::string p(len, '\0');
      in.read(p.data(), static_cast<std::streamsize>(len));
      if (in.gcount() != static_cast<std::streamsize>(len))
        throw ksa::Error(ksa::ErrorKind::bad_format,
                         "truncated pattern record in " + path);
      patterns.push_back(std::move(p));
    }
  } else {
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      patterns.push_back(line);
    }
  }
  return patterns;
}

int run_search(const SearchArgs& args) {
  ksa::KmerIndex index = ksa::KmerIndex::load_file(args.index);
  std::vector<std::string> patterns;
  if (args.pattern)
    patterns.push_back(*args.pattern);
  else
    patterns = read_patterns_file(args.patterns_file, index.alphabet().size() == 256);
  for (const std::string& p : patterns) {
    if (p.empty()) {
      std::cerr << "usage error: empty pattern\n";
      return kExitUsage;
    }
  }
  for (const std::string& p : patterns) {
    if (args.count_only) {
      std::cout << p << '\t' << index.count_occurrences(p) << '\n';
      continue;
    }
    std::vector<ksa::Posting> postings = index.locate(p);
    std::cout << p << '\t' << postings.size() << '\t';
    for (std::size_t i = 0; i < postings.size(); ++i) {
      if (i) std::cout << ',';
      std::cout << postings[i].seq_id << ':' << postings[i].offset;
    }
    std::cout << '\n';
  }
  return kExitOk;
}

int run_kmers(const KmersArgs& args) {
  ksa::KmerIndex index = ksa::KmerIndex::load_file(args.index);
  index.for_each_kmer([&](std::string_view kmer, std::uint64_t count) {
    if (count >= args.min_count) std::cout << kmer << '\t' << count << '\n';
  });
  return kExitOk;
}

int run_stats(const std::string& index_path) {
  ksa::KmerIndex index = ksa::KmerIndex::load_file(index_path);
  ksa::IndexStats stats = index.stats();
  std::cout << "k=" << index.k() << '\n'
            << "alphabet_size=" << index.alphabet().size() << '\n'
            << "sequences=" << index.sequence_lengths().size() << '\n'
            << "short_sequences=" << index.short_sequence_count() << '\n'
            << "windows=" << stats.total_windows << '\n'
            << "nodes=" << stats.node_count << '\n'
            << "leaves=" << stats.leaf_count << '\n'
            << "distinct_kmers=" << stats.distinct_kmers << '\n'
            << "modeled_bytes=" << stats.estimated_bytes << '\n'
            << "postings=" << (index.postings_enabled() ? "on" : "off") << '\n'
            << "child_map=" << ksa::to_string(index.child_map_kind()) << '\n';
  return kExitOk;
}

int run_bench(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in)
    throw ksa::Error(ksa::ErrorKind::io,
                     "cannot open " + config_path + " for reading");
  ksa::BenchConfig config = ksa::parse_bench_config(in);
  ksa::BenchReport report = ksa::run_benchmark(config);
  for (const ksa::BenchError& e : report.errors)
    std::cerr << "bench error: dataset=" << e.dataset << " structure=" << e.structure
              << " k=" << e.k << ": " << e.message << "\n";
  ksa::emit_csv(report, config.output);
  std::cout << config.output << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-mer window index: build, query, inspect, benchmark"};
  app.require_subcommand(1);

  BuildArgs build_args;
  CLI::App* build = app.add_subcommand("build", "Ingest sequences and write a KSA1 index");
  build->add_option("--k", build_args.k, "Window length (k >= 1)")
      ->required()
      ->check(CLI::PositiveNumber);
  build->add_option("--input", build_args.inputs, "Input file(s); '-' for stdin")
      ->required();
  build->add_option("--format", build_args.format, "Input format")
      ->check(CLI::IsMember({"fasta", "plain"}));
  build->add_option("--alphabet", build_args.alphabet, "Symbol alphabet")
      ->check(CLI::IsMember({"dna", "protein", "bytes"}));
  build->add_flag("--no-postings", build_args.no_postings,
                  "Store occurrence counts only, not positions");
  build->add_option("--out", build_args.out, "Output index path")->required();

  SearchArgs search_args;
  std::string pattern_value;
  CLI::App* search = app.add_subcommand("search", "Query an index for patterns");
  search->add_option("--index", search_args.index, "KSA1 index path")->required();
  CLI::Option* pattern_opt =
      search->add_option("--pattern", pattern_value, "Pattern (length <= k)");
  CLI::Option* file_opt = search->add_option("--patterns-file", search_args.patterns_file,
                                             "File with one pattern per line "
                                             "(length-prefixed records for bytes alphabet)");
  pattern_opt->excludes(file_opt);
  file_opt->excludes(pattern_opt);
  search->add_flag("--count-only", search_args.count_only, "Print counts without positions");

  KmersArgs kmers_args;
  CLI::App* kmers = app.add_subcommand("kmers", "List distinct k-mers with counts");
  kmers->add_option("--index", kmers_args.index, "KSA1 index path")->required();
  kmers->add_option("--min-count", kmers_args.min_count, "Minimum occurrence count")
      ->check(CLI::PositiveNumber);

  std::string stats_index;
  CLI::App* stats = app.add_subcommand("stats", "Print index summary");
  stats->add_option("--index", stats_index, "KSA1 index path")->required();

  std::string bench_config;
  CLI::App* bench = app.add_subcommand("bench", "Run the benchmark harness");
  bench->add_option("--config", bench_config, "Benchmark config path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (pattern_opt->count() > 0) search_args.pattern = pattern_value;

  try {
    if (app.got_subcommand(build)) return run_build(build_args);
    if (app.got_subcommand(search)) {
      if (!search_args.pattern && search_args.patterns_file.empty()) {
        std::cerr << "usage error: provide --pattern or --patterns-file\n";
        return kExitUsage;
      }
      if (search_args.pattern && search_args.pattern->empty()) {
        std::cerr << "usage error: empty pattern\n";
        return kExitUsage;
      }
      return run_search(search_args);
    }
    if (app.got_subcommand(kmers)) return run_kmers(kmers_args);
    if (app.got_subcommand(stats)) return run_stats(stats_index);
    if (app.got_subcommand(bench)) return run_bench(bench_config);
  } catch (const ksa::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  return kExitUsage;
}
