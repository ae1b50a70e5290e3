#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "sketchspan/forest.hpp"
#include "sketchspan/seed.hpp"
#include "sketchspan/support_find.hpp"

namespace sketchspan {

/// Per-query SupportFind failure cap; keeps 6e * delta_prime <= 1/2.
inline constexpr double kDeltaPrimeCap = 1.0 / (12.0 * 2.718281828459045);

struct AgmParams {
  std::uint32_t n = 0;
  double delta = 0;
  double delta_prime = 0;
  std::uint32_t rounds = 0;
  double delta_dprime = 0;
  std::uint64_t edge_universe = 0;

  SketchParams sketch_params() const;
  bool operator==(const AgmParams&) const = default;
};

/// Smallest k with 1.5^k >= n.
std::uint32_t ceil_log_three_halves(std::uint64_t n);

/// delta' = min{1/(12e), 2^(-log2(n/delta)/log2 n)},
/// R = ceil(log_{3/2} n) + max{ceil(log_{3/2} n), ceil(log2(2/delta) / log2(1/(6e delta')))},
/// delta'' = delta / (2 n R).
AgmParams agm_params(std::uint32_t n, double delta);

/// The AGM state: an n x R grid of support-finding sketches of the signed
/// edge-incidence vectors. All vertices share one sketch context per round,
/// keyed by (shared_seed, round), so sketches within a round are addable.
class VertexSketchBank {
 public:
  VertexSketchBank(const AgmParams& params, const Seed& shared_seed);

  const AgmParams& params() const { return params_; }
  const Seed& shared_seed() const { return seed_; }
  std::uint32_t n() const { return params_.n; }
  std::uint32_t rounds() const { return params_.rounds; }

  /// Edge (u, v) gains `delta` in multiplicity. Throws SelfLoopError if u == v.
  void update(Vertex u, Vertex v, int delta);

  const SupportFindSketch& sketch(Vertex u, std::uint32_t round) const { return sketches_[index(u, round)]; }
  std::span<const SupportFindSketch> vertex_sketches(Vertex u) const {
    return {sketches_.data() + std::size_t{u} * params_.rounds, params_.rounds};
  }
  /// Replaces vertex u's R sketches; each must share the round's context.
  void set_vertex_sketches(Vertex u, std::vector<SupportFindSketch> sketches);

  const std::shared_ptr<const SketchContext>& round_context(std::uint32_t round) const { return contexts_[round]; }

  /// Sum over members of the round's sketches: the sketch of the cut vector.
  SupportFindSketch component_sketch(std::span<const Vertex> members, std::uint32_t round) const;

  /// Sketch memory in bits: n * R * size_bits(one sketch). The AgmParams
  /// preamble written by serialize() is public information and not counted.
  std::uint64_t total_size_bits() const;

  /// AgmParams preamble, then every sketch vertex-major then round-major.
  std::vector<std::uint8_t> serialize() const;
  static VertexSketchBank deserialize(std::span<const std::uint8_t> in);
  static constexpr std::uint64_t kPreambleBytes = 4 + 4 + 8 + 4 + 32;

  bool operator==(const VertexSketchBank& other) const;

 private:
  std::size_t index(Vertex u, std::uint32_t round) const { return std::size_t{u} * params_.rounds + round; }

  AgmParams params_;
  Seed seed_;
  std::vector<std::shared_ptr<const SketchContext>> contexts_;
  std::vector<SupportFindSketch> sketches_;
};

enum class Execution { kSerial, kParallel };

struct QueryTrace {
  // Rounds after which the partition changed; completed_round is one past
  // the last round that merged anything (0 when nothing merged).
  std::uint32_t completed_round = 0;
  std::uint32_t failed_queries = 0;
  std::uint32_t rejected_edges = 0;
  std::vector<std::uint32_t> merges_per_round;
};

/// Boruvka-style query over R rounds. Each round queries the summed sketch of
/// every current component for one cut edge, rejects any edge that does not
/// leave its component, then merges in ascending smallest-member order,
/// skipping edges that would close a cycle.
SpanningForest agm_query(const VertexSketchBank& bank, Execution exec = Execution::kParallel,
                         QueryTrace* trace = nullptr);

}  // namespace sketchspan
