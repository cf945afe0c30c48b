#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ksa/bench.hpp"
#include "testutil.hpp"

using namespace ksa;

namespace {

std::string csv_of(const BenchReport& report) {
  std::ostringstream out;
  emit_csv(report, out);
  return out.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

constexpr const char* kHeader =
    "dataset,text_size,structure,k,node_count,leaf_count,modeled_bytes,"
    "measured_peak_bytes,build_seconds,queries_per_second";

}  // namespace

TEST_CASE("config parsing fills every field") {
  BenchConfig config = parse_bench_config(
      "# benchmark setup\n"
      "\n"
      "alphabet = protein\n"
      "k = 5, 10\n"
      "structures = ksa\n"
      "postings = off\n"
      "repetitions = 3\n"
      "memory_ceiling_bytes = 1000000\n"
      "seed = 7\n"
      "output = out.csv\n"
      "input = chr1 fasta:data/chr1.fa\n"
      "input = prot plain:data/prot.txt\n"
      "input = synth synthetic:5000:9\n"
      "input = synth2 synthetic:600\n");
  CHECK(config.alphabet == Alphabet::protein());
  CHECK(config.k_values == std::vector<std::uint32_t>{5, 10});
  CHECK(config.structures == std::vector<StructureKind>{StructureKind::ksa});
  CHECK(!config.postings_enabled);
  CHECK(config.repetitions == 3);
  CHECK(config.memory_ceiling_bytes == 1000000);
  CHECK(config.workload_seed == 7);
  CHECK(config.output == "out.csv");
  REQUIRE(config.inputs.size() == 4);
  CHECK(config.inputs[0].label == "chr1");
  CHECK(config.inputs[0].kind == BenchInput::Kind::fasta);
  CHECK(config.inputs[0].path == "data/chr1.fa");
  CHECK(config.inputs[1].kind == BenchInput::Kind::plain);
  CHECK(config.inputs[2].kind == BenchInput::Kind::synthetic);
  CHECK(config.inputs[2].length == 5000);
  CHECK(config.inputs[2].seed == 9);
  CHECK(config.inputs[3].seed == 1);  // default synthetic seed
}

TEST_CASE("config defaults match the documentation") {
  BenchConfig config = parse_bench_config("input = a synthetic:100\n");
  CHECK(config.alphabet == Alphabet::dna());
  CHECK(config.k_values == std::vector<std::uint32_t>{5, 10, 15});
  CHECK(config.structures ==
        std::vector<StructureKind>{StructureKind::ksa, StructureKind::suffix_tree});
  CHECK(config.postings_enabled);
  CHECK(config.repetitions == 1);
  CHECK(config.memory_ceiling_bytes == 4ull * 1024 * 1024 * 1024);
  CHECK(config.workload_seed == 42);
  CHECK(config.output == "bench.csv");
}

TEST_CASE("config rejections name the offending line") {
  auto rejects = [](std::string_view text, std::string_view needle) {
    try {
      parse_bench_config(text);
      FAIL("expected a throw for: " << text);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::bad_format);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  rejects("nonsense\n", "line 1");
  rejects("mystery = 4\n", "unknown key");
  rejects("k = 0\n", "at least 1");
  rejects("k = five\n", "unsigned integer");
  rejects("structures = btree\n", "unknown structure");
  rejects("repetitions = 0\n", "at least 1");
  rejects("postings = maybe\n", "on/off");
  rejects("input = nolabel\n", "label");
  rejects("input = a,b synthetic:10\n", "comma");
  rejects("input = lab trie:path\n", "unknown input kind");
  rejects("input = lab synthetic:1:2:3\n", "synthetic");
  rejects("alphabet = rna\n", "unknown alphabet");
  rejects("structures = \n", "unknown structure");
}

TEST_CASE("a small synthetic benchmark produces one row per combination") {
  BenchConfig config = parse_bench_config(
      "input = tiny synthetic:2000:3\n"
      "k = 5\n"
      "repetitions = 2\n");
  BenchReport report = run_benchmark(config);
  CHECK(report.errors.empty());
  REQUIRE(report.rows.size() == 2);

  const BenchRow& trie_row = report.rows[0];
  CHECK(trie_row.dataset == "tiny");
  CHECK(trie_row.structure == StructureKind::ksa);
  CHECK(trie_row.k == 5);
  CHECK(trie_row.text_size == 2000);
  CHECK(!trie_row.aborted);
  CHECK(trie_row.node_count <= 1365);  // k=5 DNA saturation bound
  CHECK(trie_row.leaf_count <= 1024);
  CHECK(trie_row.modeled_bytes ==
        trie_row.node_count * node_cost_model(StructureKind::ksa, 4, ChildMapKind::array) +
            1996 * kPostingBytes);
  CHECK(trie_row.build_seconds >= 0.0);
  CHECK(trie_row.queries_per_second.has_value());

  const BenchRow& st_row = report.rows[1];
  CHECK(st_row.structure == StructureKind::suffix_tree);
  CHECK(st_row.leaf_count == 2001);
  CHECK(st_row.modeled_bytes ==
        st_row.node_count * node_cost_model(StructureKind::suffix_tree, 4,
                                            ChildMapKind::array));
  // The depth-5 trie models far smaller than the full suffix tree.
  CHECK(trie_row.modeled_bytes < st_row.modeled_bytes);
}

TEST_CASE("multi-record FASTA input benchmarks both structures consistently") {
  ksatest::TempFile fasta;
  fasta.write(">a\nACGTACGTACGTACGTACGT\n>b\nTTTTGGGGCCCCAAAA\n>c\nAC\n");
  BenchConfig config = parse_bench_config("k = 4\nrepetitions = 1\n");
  config.inputs.push_back(BenchInput{"multi", BenchInput::Kind::fasta, fasta.str(), 0, 1});
  BenchReport report = run_benchmark(config);
  CHECK(report.errors.empty());  // includes the cross-structure agreement check
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].text_size == 38);
  CHECK(report.rows[1].text_size == 38);
}

TEST_CASE("the memory ceiling aborts rows with the table convention") {
  BenchConfig config = parse_bench_config(
      "input = big synthetic:10000:5\n"
      "k = 6\n"
      "memory_ceiling_bytes = 5000\n");
  BenchReport report = run_benchmark(config);
  REQUIRE(report.rows.size() == 2);
  for (const BenchRow& row : report.rows) {
    CHECK(row.aborted);
    CHECK(row.ceiling == 5000);
  }
  auto lines = lines_of(csv_of(report));
  REQUIRE(lines.size() == 3);
  CHECK(lines[1].find(">5000") != std::string::npos);
  CHECK(lines[2].find(">5000") != std::string::npos);
}

TEST_CASE("unreadable inputs produce error entries and the run continues") {
  BenchConfig config = parse_bench_config(
      "input = missing fasta:/nonexistent/file.fa\n"
      "input = ok synthetic:500:2\n"
      "k = 3\n"
      "structures = ksa\n");
  BenchReport report = run_benchmark(config);
  REQUIRE(report.errors.size() == 1);
  CHECK(report.errors[0].dataset == "missing");
  CHECK(report.errors[0].k == 3);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].dataset == "ok");
}

TEST_CASE("CSV output is stable and deterministic") {
  BenchReport empty;
  CHECK(csv_of(empty) == std::string(kHeader) + "\n");

  BenchRow row;
  row.dataset = "d";
  row.text_size = 10;
  row.structure = StructureKind::ksa;
  row.k = 4;
  row.node_count = 23;
  row.leaf_count = 6;
  row.modeled_bytes = 1176;
  row.measured_peak_bytes = 4096;
  row.build_seconds = 0.25;
  row.queries_per_second = 1234.5;
  BenchReport report;
  report.rows = {row, row, row, row};
  std::string csv = csv_of(report);
  auto lines = lines_of(csv);
  REQUIRE(lines.size() == 5);  // header + 4 rows
  CHECK(lines[0] == kHeader);
  CHECK(lines[1] == "d,10,ksa,4,23,6,1176,4096,0.250000,1234.500");
  CHECK(csv == csv_of(report));  // byte-identical re-emission

  row.measured_peak_bytes.reset();
  row.queries_per_second.reset();
  report.rows = {row};
  CHECK(lines_of(csv_of(report))[1] == "d,10,ksa,4,23,6,1176,,0.250000,");
}

TEST_CASE("emit_csv writes the configured file") {
  ksatest::TempFile out;
  BenchConfig config = parse_bench_config(
      "input = s synthetic:300:4\nk = 2\nstructures = ksa\n");
  BenchReport report = run_benchmark(config);
  emit_csv(report, out.str());
  auto lines = lines_of(out.read());
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == kHeader);
  CHECK(lines[1].rfind("s,300,ksa,2,", 0) == 0);
}

TEST_CASE("an empty input list yields an empty report") {
  BenchConfig config = parse_bench_config("k = 5\n");
  BenchReport report = run_benchmark(config);
  CHECK(report.rows.empty());
  CHECK(report.errors.empty());
  CHECK(csv_of(report) == std::string(kHeader) + "\n");
}
