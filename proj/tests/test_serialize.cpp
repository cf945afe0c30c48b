#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ksa/crc64.hpp"
#include "ksa/kmer_index.hpp"
#include "testutil.hpp"

using namespace ksa;

namespace {

std::string serialized(const KmerIndex& index) {
  std::ostringstream out(std::ios::binary);
  index.save(out);
  return out.str();
}

KmerIndex deserialized(const std::string& buf) {
  std::istringstream in(buf, std::ios::binary);
  return KmerIndex::load(in);
}

/// Overwrites the CRC-64 trailer so a deliberately malformed buffer still
/// passes the checksum gate and exercises the structural validator.
void refresh_checksum(std::string& buf) {
  buf.resize(buf.size() - 8);
  std::uint64_t checksum = crc64(buf.data(), buf.size());
  for (int i = 0; i < 8; ++i)
    buf.push_back(static_cast<char>((checksum >> (8 * i)) & 0xFF));
}

ErrorKind load_failure(const std::string& buf) {
  try {
    deserialized(buf);
  } catch (const Error& e) {
    return e.kind();
  }
  throw std::runtime_error("expected the load to fail");
}

void check_equivalent(const KmerIndex& a, const KmerIndex& b,
                      const std::vector<std::string>& probes) {
  IndexStats sa = a.stats();
  IndexStats sb = b.stats();
  CHECK(sa.node_count == sb.node_count);
  CHECK(sa.leaf_count == sb.leaf_count);
  CHECK(sa.total_windows == sb.total_windows);
  CHECK(sa.estimated_bytes == sb.estimated_bytes);
  CHECK(a.k() == b.k());
  CHECK(a.alphabet() == b.alphabet());
  CHECK(a.postings_enabled() == b.postings_enabled());
  CHECK(a.sequence_lengths() == b.sequence_lengths());
  CHECK(a.enumerate_kmers() == b.enumerate_kmers());
  for (const std::string& p : probes) {
    CHECK(a.count_occurrences(p) == b.count_occurrences(p));
    if (a.postings_enabled()) CHECK(a.locate(p) == b.locate(p));
  }
}

}  // namespace

TEST_CASE("CRC-64 matches the reference check value") {
  // CRC-64/XZ check input.
  CHECK(crc64("123456789", 9) == 0x995DC9BBDF1939FAull);
  CHECK(crc64("", 0) == 0);

  // Incremental updates equal one-shot computation.
  Crc64 crc;
  crc.update("1234", 4);
  crc.update("56789", 5);
  CHECK(crc.value() == 0x995DC9BBDF1939FAull);
}

TEST_CASE("round trip preserves stats, postings, and answers") {
  KmerIndex index(4, Alphabet::dna());
  index.index_sequence("ACGTCCTGG", 0);
  index.index_sequence("ACGTACGT", 1);
  index.index_sequence("AC", 2);  // shorter than k

  std::string buf = serialized(index);
  KmerIndex loaded = deserialized(buf);
  check_equivalent(index, loaded, {"ACGT", "TCCT", "C", "GG", "A"});
  CHECK(loaded.short_sequence_count() == 1);
  CHECK(loaded.total_windows() == 11);

  // The loaded index accepts further construction.
  CHECK(!loaded.frozen());
  loaded.index_sequence("TTTT", 3);
  CHECK(loaded.total_windows() == 12);
}

TEST_CASE("count-only indexes round trip without posting pairs") {
  KmerIndex index(3, Alphabet::dna(), IndexOptions{.store_postings = false});
  index.index_sequence("ACGTACGTAC", 0);
  std::string buf = serialized(index);

  KmerIndex loaded = deserialized(buf);
  CHECK(!loaded.postings_enabled());
  CHECK(loaded.count_occurrences("ACG") == 2);
  CHECK_THROWS_AS(loaded.locate("ACG"), Error);

  // Postings make the payload strictly larger for the same text.
  KmerIndex with(3, Alphabet::dna());
  with.index_sequence("ACGTACGTAC", 0);
  CHECK(serialized(with).size() > buf.size());
}

TEST_CASE("an empty index round trips") {
  KmerIndex index(5, Alphabet::protein());
  std::string buf = serialized(index);
  KmerIndex loaded = deserialized(buf);
  CHECK(loaded.node_count() == 1);
  CHECK(loaded.total_windows() == 0);
  CHECK(loaded.k() == 5);
  CHECK(loaded.alphabet() == Alphabet::protein());
}

TEST_CASE("magic and version are checked before anything else") {
  KmerIndex index(2, Alphabet::dna());
  index.index_sequence("ACGT", 0);
  std::string buf = serialized(index);

  std::string bad_magic_buf = buf;
  bad_magic_buf[0] = 'X';
  CHECK(load_failure(bad_magic_buf) == ErrorKind::bad_magic);

  CHECK(load_failure("") == ErrorKind::bad_magic);
  CHECK(load_failure("KSA1") == ErrorKind::corrupt);  // too short for header

  // Future version, checksum refreshed: rejected by the version gate.
  std::string future = buf;
  future[4] = 2;
  refresh_checksum(future);
  CHECK(load_failure(future) == ErrorKind::unsupported_version);
  // Even without a fixed checksum the version error wins (checked first).
  std::string future_bad_crc = buf;
  future_bad_crc[4] = 2;
  CHECK(load_failure(future_bad_crc) == ErrorKind::unsupported_version);
}

TEST_CASE("single-byte corruption is caught by the checksum") {
  KmerIndex index(3, Alphabet::dna());
  index.index_sequence("ACGTCCTGGACGT", 0);
  std::string buf = serialized(index);

  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 64; ++trial) {
    std::string corrupted = buf;
    // Skip magic (0..3) and version (4..5): those gates fire first by design.
    std::size_t at = 6 + gen() % (corrupted.size() - 6);
    corrupted[at] = static_cast<char>(corrupted[at] ^ (1 << (gen() % 8)));
    CHECK(load_failure(corrupted) == ErrorKind::checksum_mismatch);
  }

  // Truncation also fails the checksum.
  std::string truncated = buf.substr(0, buf.size() - 1);
  CHECK(load_failure(truncated) == ErrorKind::checksum_mismatch);
}

TEST_CASE("structurally invalid payloads with a valid checksum are rejected") {
  using detail::put_u16;
  using detail::put_u32;
  using detail::put_u64;

  auto header = [](std::uint32_t k, std::string_view symbols, std::uint8_t flags) {
    std::string buf;
    buf.append("KSA1");
    put_u16(buf, 1);  // version
    put_u32(buf, k);
    put_u16(buf, static_cast<std::uint16_t>(symbols.size()));
    buf.append(symbols);
    put_u32(buf, 0);  // no sequences
    buf.push_back(static_cast<char>(flags));
    return buf;
  };
  auto seal = [](std::string buf) {
    std::uint64_t checksum = crc64(buf.data(), buf.size());
    for (int i = 0; i < 8; ++i)
      buf.push_back(static_cast<char>((checksum >> (8 * i)) & 0xFF));
    return buf;
  };

  // Edge symbol not in the alphabet.
  {
    std::string buf = header(1, "AC", 1);
    buf.push_back(1);  // root has one child
    buf.push_back('Z');
    put_u64(buf, 9);      // leaf subtree: 1 + 8
    buf.push_back(0);     // leaf child count
    put_u64(buf, 1);      // leaf occurrence count
    put_u32(buf, 0);      // posting seq
    put_u64(buf, 0);      // posting offset
    CHECK(load_failure(seal(buf)) == ErrorKind::corrupt);
  }

  // Zero k in the header.
  {
    std::string buf = header(0, "AC", 1);
    buf.push_back(0);
    CHECK(load_failure(seal(buf)) == ErrorKind::corrupt);
  }

  // Leaf with zero occurrences.
  {
    std::string buf = header(1, "AC", 0);
    buf.push_back(1);
    buf.push_back('A');
    put_u64(buf, 9);
    buf.push_back(0);
    put_u64(buf, 0);  // count must be >= 1
    CHECK(load_failure(seal(buf)) == ErrorKind::corrupt);
  }

  // Subtree length overruns the parent extent.
  {
    std::string buf = header(1, "AC", 0);
    buf.push_back(1);
    buf.push_back('A');
    put_u64(buf, 1000);
    buf.push_back(0);
    put_u64(buf, 1);
    CHECK(load_failure(seal(buf)) == ErrorKind::corrupt);
  }

  // Children out of rank order.
  {
    std::string buf = header(1, "AC", 0);
    buf.push_back(2);
    buf.push_back('C');
    put_u64(buf, 9);
    buf.push_back('A');
    put_u64(buf, 9);
    buf.push_back(0);
    put_u64(buf, 1);
    buf.push_back(0);
    put_u64(buf, 1);
    CHECK(load_failure(seal(buf)) == ErrorKind::corrupt);
  }

  // Trailing garbage after the node stream.
  {
    std::string buf = header(2, "AC", 0);
    buf.push_back(0);  // bare root (empty index)
    buf.push_back(7);  // stray byte
    CHECK(load_failure(seal(buf)) == ErrorKind::corrupt);
  }
}

TEST_CASE("file save and load round trip") {
  ksatest::TempFile file;
  KmerIndex index(4, Alphabet::dna());
  index.index_sequence("ACGTCCTGGACGTCCTGG", 0);
  index.save_file(file.str());

  KmerIndex loaded = KmerIndex::load_file(file.str());
  check_equivalent(index, loaded, {"ACGT", "CC", "T"});

  try {
    KmerIndex::load_file("/nonexistent/path/index.ksa");
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
}

TEST_CASE("random indexes round trip across alphabets and modes") {
  std::mt19937_64 gen(2718);
  const std::string dna = "ACGT";
  const std::string protein = "ACDEFGHIKLMNPQRSTVWY";
  for (int round = 0; round < 25; ++round) {
    const bool use_protein = round % 3 == 1;
    const bool use_bytes = round % 3 == 2;
    Alphabet alphabet = use_protein   ? Alphabet::protein()
                        : use_bytes   ? Alphabet::bytes()
                                      : Alphabet::dna();
    std::string_view symbols = use_protein ? protein : dna;
    std::uint32_t k = 1 + gen() % 6;
    IndexOptions options;
    options.store_postings = gen() % 2 == 0;
    KmerIndex index(k, alphabet, options);
    std::vector<std::string> probes;
    for (std::uint32_t id = 0; id < 1 + gen() % 3; ++id) {
      std::string seq;
      if (use_bytes) {
        seq.resize(gen() % 50);
        for (char& ch : seq) ch = static_cast<char>(gen() % 256);
      } else {
        seq = ksatest::random_string(gen, symbols, gen() % 50);
      }
      index.index_sequence(seq, id);
      if (seq.size() >= k) probes.push_back(seq.substr(gen() % (seq.size() - k + 1), k));
    }
    KmerIndex loaded = deserialized(serialized(index));
    check_equivalent(index, loaded, probes);
  }
}
