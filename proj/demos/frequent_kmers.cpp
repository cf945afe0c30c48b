// Demo: index a FASTA file (or a synthetic sequence when no path is given)
// and report the most frequent k-mers plus the positions of the top hit.
//
//   frequent_kmers [fasta-path] [k]

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ksa/ksa.hpp"

int main(int argc, char** argv) {
  try {
    const std::uint32_t k = argc > 2 ? static_cast<std::uint32_t>(std::stoul(argv[2])) : 8;
    ksa::Alphabet alphabet = ksa::Alphabet::dna();

    std::vector<ksa::SequenceRecord> records;
    if (argc > 1) {
      std::ifstream in(argv[1], std::ios::binary);
      if (!in) {
        std::cerr << "cannot open " << argv[1] << "\n";
        return 1;
      }
      records = ksa::read_fasta(in, alphabet);
    } else {
      records.push_back(ksa::synthesize_sequence(200000, alphabet, 7));
      std::cout << "no input given; using a 200 kb synthetic DNA sequence\n";
    }

    ksa::KmerIndex index(k, alphabet);
    for (const ksa::SequenceRecord& r : records)
      index.index_sequence(r.data, r.seq_id);
    index.freeze();

    ksa::IndexStats stats = index.stats();
    std::cout << "sequences=" << records.size() << " windows=" << stats.total_windows
              << " distinct_kmers=" << stats.distinct_kmers
              << " nodes=" << stats.node_count
              << " modeled_bytes=" << stats.estimated_bytes << "\n\n";

    auto frequent = index.find_frequent(2);
    std::cout << "top k-mers (count >= 2):\n";
    for (std::size_t i = 0; i < frequent.size() && i < 10; ++i)
      std::cout << "  " << frequent[i].first << "\t" << frequent[i].second << "\n";

    if (!frequent.empty()) {
      const std::string& top = frequent.front().first;
      auto postings = index.locate(top);
      std::cout << "\nfirst positions of " << top << ":";
      for (std::size_t i = 0; i < postings.size() && i < 8; ++i)
        std::cout << " " << postings[i].seq_id << ":" << postings[i].offset;
      std::cout << "\n";
    }
    return 0;
  } catch (const ksa::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
