#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "sketchspan/forest.hpp"
#include "sketchspan/graph.hpp"
#include "sketchspan/ur.hpp"

namespace sketchspan {

/// Group sizes for ambient parameter n = b^5 (b >= 4): the graph has b^4
/// vertices; V_m has floor(b^3 / 2) hubs, each owning a block of b vertices;
/// V_r has b vertices; the rest are isolated.
struct DskLayout {
  std::uint64_t ambient_n = 0;
  std::uint32_t base = 0;
  std::uint32_t vertex_count = 0;
  std::uint32_t hubs = 0;
  std::uint32_t block_size = 0;
  std::uint32_t right_size = 0;
};

/// Throws SizeError unless n is a perfect fifth power of an integer >= 4.
DskLayout dsk_layout(std::uint64_t n);

enum class Role : std::uint8_t { kBlock, kHub, kRight, kIsolated };

struct DskGraph {
  DskLayout layout;
  ExactGraph graph;
  std::vector<Vertex> hubs;                 // V_m; hubs[j] owns blocks[j]
  std::vector<std::vector<Vertex>> blocks;  // V_1 .. V_|V_m|
  std::vector<Vertex> right;                // V_r
  std::vector<Vertex> isolated;             // V_o
  std::vector<UrInstance> instances;        // (S_j, T_j) per hub
  std::vector<Role> role;
  std::vector<std::uint32_t> owner;  // hub index for block and hub vertices
};

/// Requires ur.universe == n^{1/5}.
DskGraph sample_d_sk(std::uint64_t n, const UrParams& ur, std::mt19937_64& rng);

struct DskStructureCheck {
  std::uint64_t edge_type_violations = 0;
  std::uint64_t block_isolation_violations = 0;
  bool ok() const { return edge_type_violations == 0 && block_isolation_violations == 0; }
};

/// Checks the two allowed edge types and, for every block, enumerates the
/// cuts of V_j and V_j + v_j: the first may only reach v_j, the second only V_r.
DskStructureCheck check_dsk_structure(const DskGraph& g);

enum class DskPrimeCase { kDsk = 0, kMiddleDegrees = 1, kRightDegrees = 2 };

struct DskPrimeSample {
  DskPrimeCase which = DskPrimeCase::kDsk;
  ExactGraph graph;
  std::vector<Vertex> u1, u2;                 // empty for the D_sk case
  std::vector<std::uint32_t> u1_degrees;      // requested degrees, aligned with u1
  std::optional<DskGraph> dsk;
};

/// Degree of a uniformly chosen V_m (or V_r) vertex in a fresh D_sk draw.
std::uint32_t sample_hub_degree(std::uint64_t n, const UrParams& ur, std::mt19937_64& rng);
std::uint32_t sample_right_degree(std::uint64_t n, const UrParams& ur, std::mt19937_64& rng);

DskPrimeSample sample_d_sk_prime(std::uint64_t n, const UrParams& ur, std::mt19937_64& rng);

/// A UR-subset instance planted at hub `hub_index` of a D_sk-shaped graph.
struct Embedding {
  DskGraph dsk;
  std::uint32_t hub_index = 0;
  Vertex hub = 0;
  std::vector<Vertex> beta;  // beta[x] for x in [U]
};

/// Throws SizeError on size mismatches and ParameterError unless T is a
/// proper subset of S inside [n^{1/5}].
Embedding embed_ur_in_dsk(const ElementSet& s, const ElementSet& t, std::uint64_t n, const UrParams& ur,
                          std::mt19937_64& rng);

/// Genie read-out: beta^{-1}(u) for the first forest edge (hub, u) with u in V_r.
std::optional<Element> recover_element(const Embedding& e, const SpanningForest& forest);

/// Disjoint union; copy c occupies vertices [c n', (c+1) n').
ExactGraph disconnected_copies(const std::vector<ExactGraph>& graphs);

/// Edges of `forest` inside copy c, shifted back to [0, n').
SpanningForest restrict_to_copy(const SpanningForest& forest, std::uint32_t copy_size, std::uint32_t copy);

}  // namespace sketchspan
