#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "sketchspan/graph.hpp"
#include "sketchspan/ur.hpp"

namespace sketchspan {

struct NfoldResult {
  std::vector<std::optional<Element>> answers;
  std::uint64_t communicated_bytes = 0;  // sketch memory shipped from Alice to Bob
  std::uint64_t serialized_bytes = 0;    // including the public parameter preamble
  std::uint64_t memory_bits = 0;         // total_size_bits of the bank
  bool forest_valid = false;
  bool all_correct = false;
};

/// Runs n UR-subset instances over [n] through one AGM bank on the 2n-vertex
/// bipartite graph: Alice inserts (x, n+i) for x in S_i, ships the bank, Bob
/// deletes (x, n+i) for x in T_i, queries, and reads each right vertex's
/// forest neighbor. Throws InternalError if the shipped bank does not
/// round-trip exactly.
NfoldResult nfold_reduction(const std::vector<UrInstance>& instances, double delta, const Seed& seed);

/// |S_i| uniform in [1, n], T_i a uniform subset of S_i of size uniform in [0, |S_i| - 1].
std::vector<UrInstance> random_ur_instances(std::uint32_t n, std::mt19937_64& rng);

}  // namespace sketchspan
