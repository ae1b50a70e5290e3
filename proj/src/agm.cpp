#include "sketchspan/agm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sketchspan/bytes.hpp"
#include "sketchspan/errors.hpp"

namespace sketchspan {

namespace {

constexpr std::uint32_t kBankMagic = 0x424d4741;  // "AGMB"

}  // namespace

std::uint32_t ceil_log_three_halves(std::uint64_t n) {
  std::uint32_t k = 0;
  double power = 1.0;
  while (power < static_cast<double>(n)) {
    power *= 1.5;
    ++k;
  }
  return k;
}

AgmParams agm_params(std::uint32_t n, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
  if (n < 2) throw ParameterError("need at least two vertices");
  if (n < 1024 && delta <= std::ldexp(1.0, -static_cast<int>(n))) throw ParameterError("delta must exceed 2^-n");

  AgmParams p;
  p.n = n;
  p.delta = delta;
  const double log_n = std::log2(static_cast<double>(n));
  const double candidate = std::exp2(-std::log2(static_cast<double>(n) / delta) / log_n);
  const bool capped = candidate >= kDeltaPrimeCap;
  p.delta_prime = capped ? kDeltaPrimeCap : candidate;

  const std::uint32_t base = ceil_log_three_halves(n);
  // At the cap 6e*delta' = 1/2 exactly; avoid rounding the divisor below 1.
  const double divisor = capped ? 1.0 : std::log2(1.0 / (6.0 * 2.718281828459045 * p.delta_prime));
  const double extra = std::ceil(std::log2(2.0 / delta) / divisor - 1e-9);
  p.rounds = base + std::max(base, static_cast<std::uint32_t>(extra));
  p.delta_dprime = delta / (2.0 * n * p.rounds);
  p.edge_universe = edge_universe(n);
  return p;
}

SketchParams AgmParams::sketch_params() const { return SketchParams::make(edge_universe, 1, delta_prime, delta_dprime); }

VertexSketchBank::VertexSketchBank(const AgmParams& params, const Seed& shared_seed)
    : params_(params), seed_(shared_seed) {
  const SketchParams sp = params_.sketch_params();
  contexts_.reserve(params_.rounds);
  for (std::uint32_t r = 0; r < params_.rounds; ++r) {
    contexts_.push_back(std::make_shared<const SketchContext>(sp, seed_.derive(seed_tag::kRound, r)));
  }
  sketches_.reserve(std::size_t{params_.n} * params_.rounds);
  for (Vertex u = 0; u < params_.n; ++u) {
    for (std::uint32_t r = 0; r < params_.rounds; ++r) sketches_.emplace_back(contexts_[r]);
  }
}

void VertexSketchBank::update(Vertex u, Vertex v, int delta) {
  if (u == v) throw SelfLoopError("self-loop on vertex " + std::to_string(u));
  if (u >= params_.n || v >= params_.n) throw RangeError("vertex outside [0, n)");
  const Edge e = Edge::make(u, v);
  const std::uint64_t idx = edge_index(params_.n, e.u, e.v);
  for (std::uint32_t r = 0; r < params_.rounds; ++r) {
    const IndexTouch touch = touch_index(*contexts_[r], idx);
    sketches_[index(e.u, r)].apply(touch, delta);
    sketches_[index(e.v, r)].apply(touch, -delta);
  }
}

void VertexSketchBank::set_vertex_sketches(Vertex u, std::vector<SupportFindSketch> sketches) {
  if (u >= params_.n) throw RangeError("vertex outside [0, n)");
  if (sketches.size() != params_.rounds) throw IncompatibleError("expected one sketch per round");
  for (std::uint32_t r = 0; r < params_.rounds; ++r) {
    if (!sketches[r].context().compatible(*contexts_[r])) throw IncompatibleError("sketch does not match round context");
    sketches_[index(u, r)] = std::move(sketches[r]);
  }
}

SupportFindSketch VertexSketchBank::component_sketch(std::span<const Vertex> members, std::uint32_t round) const {
  std::vector<const SupportFindSketch*> parts;
  parts.reserve(members.size());
  for (Vertex w : members) parts.push_back(&sketches_[index(w, round)]);
  return SupportFindSketch::sum(parts);
}

std::uint64_t VertexSketchBank::total_size_bits() const {
  return std::uint64_t{params_.n} * params_.rounds * size_bits(params_.sketch_params());
}

std::vector<std::uint8_t> VertexSketchBank::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(kPreambleBytes + total_size_bits() / 8);
  bytes::Writer w(out);
  w.u32(kBankMagic);
  w.u32(params_.n);
  w.f64(params_.delta);
  w.u32(params_.rounds);
  for (std::uint64_t word : seed_.words()) w.u64(word);
  for (const auto& s : sketches_) s.serialize_to(out);
  return out;
}

VertexSketchBank VertexSketchBank::deserialize(std::span<const std::uint8_t> in) {
  bytes::Reader r(in);
  if (r.u32() != kBankMagic) throw FormatError("bad bank magic");
  const std::uint32_t n = r.u32();
  const double delta = r.f64();
  const std::uint32_t rounds = r.u32();
  std::array<std::uint64_t, 4> seed_words{};
  for (auto& word : seed_words) word = r.u64();
  AgmParams params;
  try {
    params = agm_params(n, delta);
  } catch (const ParameterError& e) {
    throw FormatError(std::string("invalid bank parameters: ") + e.what());
  }
  if (params.rounds != rounds) throw FormatError("bank round count inconsistent with parameters");

  VertexSketchBank bank(params, Seed(seed_words));
  std::size_t offset = r.position();
  for (Vertex u = 0; u < n; ++u) {
    for (std::uint32_t round = 0; round < rounds; ++round) {
      std::size_t used = 0;
      bank.sketches_[bank.index(u, round)] =
          SupportFindSketch::deserialize(in.subspan(offset), &used, bank.contexts_[round]);
      offset += used;
    }
  }
  if (offset != in.size()) throw FormatError("trailing bytes after bank");
  return bank;
}

bool VertexSketchBank::operator==(const VertexSketchBank& other) const {
  return params_ == other.params_ && seed_ == other.seed_ && sketches_ == other.sketches_;
}

namespace {

struct Candidate {
  bool has_edge = false;
  bool failed = false;
  bool rejected = false;
  Edge edge;
};

Candidate find_cut_edge(const VertexSketchBank& bank, const std::vector<Vertex>& members,
                        const std::vector<Vertex>& component_of, std::uint32_t component, std::uint32_t round) {
  Candidate c;
  const SupportResult result = bank.component_sketch(members, round).query();
  if (result.is_fail()) {
    c.failed = true;
    return c;
  }
  if (result.indices().empty()) return c;
  const Edge e = edge_from_index(bank.n(), result.indices().front());
  const bool u_inside = component_of[e.u] == component;
  const bool v_inside = component_of[e.v] == component;
  if (u_inside == v_inside) {
    c.rejected = true;
    return c;
  }
  c.has_edge = true;
  c.edge = e;
  return c;
}

// Serial reference for one round.
void round_candidates_serial(const VertexSketchBank& bank, const Partition& parts,
                             const std::vector<Vertex>& component_of, std::uint32_t round,
                             std::vector<Candidate>& out) {
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out[i] = find_cut_edge(bank, parts[i], component_of, static_cast<std::uint32_t>(i), round);
  }
}

void round_candidates_parallel(const VertexSketchBank& bank, const Partition& parts,
                               const std::vector<Vertex>& component_of, std::uint32_t round,
                               std::vector<Candidate>& out) {
  const auto count = static_cast<std::int64_t>(parts.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < count; ++i) {
    out[i] = find_cut_edge(bank, parts[i], component_of, static_cast<std::uint32_t>(i), round);
  }
}

}  // namespace

SpanningForest agm_query(const VertexSketchBank& bank, Execution exec, QueryTrace* trace) {
  const std::uint32_t n = bank.n();
  DisjointSets dsu(n);
  std::vector<Edge> forest;
  QueryTrace local;
  std::vector<Vertex> component_of(n);
  std::vector<Candidate> candidates;

  for (std::uint32_t r = 0; r < bank.rounds(); ++r) {
    const Partition parts = dsu.classes();
    for (std::size_t i = 0; i < parts.size(); ++i) {
      for (Vertex w : parts[i]) component_of[w] = static_cast<Vertex>(i);
    }
    candidates.assign(parts.size(), Candidate{});
    if (exec == Execution::kParallel) {
      round_candidates_parallel(bank, parts, component_of, r, candidates);
    } else {
      round_candidates_serial(bank, parts, component_of, r, candidates);
    }
    std::uint32_t merges = 0;
    for (const Candidate& c : candidates) {
      local.failed_queries += c.failed;
      local.rejected_edges += c.rejected;
      if (c.has_edge && dsu.unite(c.edge.u, c.edge.v)) {
        forest.push_back(c.edge);
        ++merges;
      }
    }
    local.merges_per_round.push_back(merges);
    if (merges > 0) local.completed_round = r + 1;
  }
  if (trace) *trace = std::move(local);
  return SpanningForest::from_edges(n, std::move(forest));
}

}  // namespace sketchspan
