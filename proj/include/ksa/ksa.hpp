#pragma once

// Umbrella header for the whole library.

#include "ksa/alphabet.hpp"
#include "ksa/bench.hpp"
#include "ksa/brute_force.hpp"
#include "ksa/cost_model.hpp"
#include "ksa/crc64.hpp"
#include "ksa/error.hpp"
#include "ksa/kmer_index.hpp"
#include "ksa/sequence_io.hpp"
#include "ksa/suffix_tree.hpp"
