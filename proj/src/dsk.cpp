#include "sketchspan/dsk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sketchspan/errors.hpp"

namespace sketchspan {

DskLayout dsk_layout(std::uint64_t n) {
  std::uint64_t b = static_cast<std::uint64_t>(std::llround(std::pow(static_cast<double>(n), 0.2)));
  auto fifth = [](std::uint64_t x) { return x * x * x * x * x; };
  while (b > 0 && fifth(b) > n) --b;
  while (fifth(b + 1) <= n) ++b;
  if (fifth(b) != n) throw SizeError("n = " + std::to_string(n) + " is not a perfect fifth power");
  if (b < 4) throw SizeError("need n^(1/5) >= 4 so every group is nonempty");
  if (b > 64) throw SizeError("n too large for desk-scale D_sk graphs");
  DskLayout l;
  l.ambient_n = n;
  l.base = static_cast<std::uint32_t>(b);
  l.vertex_count = static_cast<std::uint32_t>(b * b * b * b);
  l.hubs = static_cast<std::uint32_t>(b * b * b / 2);
  l.block_size = l.base;
  l.right_size = l.base;
  return l;
}

namespace {

void check_ur_fits(const DskLayout& l, const UrParams& ur) {
  if (ur.universe != l.base) {
    throw SizeError("UR universe " + std::to_string(ur.universe) + " must equal n^(1/5) = " + std::to_string(l.base));
  }
}

std::vector<Vertex> shuffled_vertices(std::uint32_t count, std::mt19937_64& rng) {
  std::vector<Vertex> v(count);
  std::iota(v.begin(), v.end(), Vertex{0});
  std::shuffle(v.begin(), v.end(), rng);
  return v;
}

std::vector<Vertex> pick(const std::vector<Vertex>& from, std::uint32_t k, std::mt19937_64& rng) {
  std::vector<Vertex> out;
  for (Element i : random_subset(static_cast<std::uint32_t>(from.size()), k, rng)) out.push_back(from[i]);
  return out;
}

void assign_roles(DskGraph& g) {
  g.role.assign(g.layout.vertex_count, Role::kIsolated);
  g.owner.assign(g.layout.vertex_count, 0);
  for (std::uint32_t j = 0; j < g.hubs.size(); ++j) {
    g.role[g.hubs[j]] = Role::kHub;
    g.owner[g.hubs[j]] = j;
    for (Vertex x : g.blocks[j]) {
      g.role[x] = Role::kBlock;
      g.owner[x] = j;
    }
  }
  for (Vertex y : g.right) g.role[y] = Role::kRight;
}

// Step 3 for hub j: |T_j| random block vertices, |S_j \ T_j| random V_r vertices.
void connect_hub(DskGraph& g, std::uint32_t j, std::mt19937_64& rng) {
  const UrInstance& inst = g.instances[j];
  const auto t_size = static_cast<std::uint32_t>(inst.t.size());
  const auto rest = static_cast<std::uint32_t>(inst.s.size() - inst.t.size());
  for (Vertex x : pick(g.blocks[j], t_size, rng)) g.graph.insert(g.hubs[j], x);
  for (Vertex y : pick(g.right, rest, rng)) g.graph.insert(g.hubs[j], y);
}

}  // namespace

DskGraph sample_d_sk(std::uint64_t n, const UrParams& ur, std::mt19937_64& rng) {
  DskGraph g;
  g.layout = dsk_layout(n);
  check_ur_fits(g.layout, ur);
  const DskLayout& l = g.layout;
  g.graph = ExactGraph(l.vertex_count);

  const auto order = shuffled_vertices(l.vertex_count, rng);
  auto it = order.begin();
  g.hubs.assign(it, it + l.hubs);
  it += l.hubs;
  g.right.assign(it, it + l.right_size);
  it += l.right_size;
  g.blocks.resize(l.hubs);
  for (auto& block : g.blocks) {
    block.assign(it, it + l.block_size);
    it += l.block_size;
  }
  g.isolated.assign(it, order.end());
  assign_roles(g);

  g.instances.reserve(l.hubs);
  for (std::uint32_t j = 0; j < l.hubs; ++j) g.instances.push_back(sample_d_ur(ur, rng));
  for (std::uint32_t j = 0; j < l.hubs; ++j) connect_hub(g, j, rng);
  return g;
}

DskStructureCheck check_dsk_structure(const DskGraph& g) {
  DskStructureCheck check;
  for (const Edge& e : g.graph.edges()) {
    const Role a = g.role[e.u], b = g.role[e.v];
    const bool hub_right = (a == Role::kHub && b == Role::kRight) || (a == Role::kRight && b == Role::kHub);
    const bool hub_block = (a == Role::kHub && b == Role::kBlock) || (a == Role::kBlock && b == Role::kHub);
    const bool ok = hub_right || (hub_block && g.owner[e.u] == g.owner[e.v]);
    if (!ok) ++check.edge_type_violations;
  }
  const auto adj = g.graph.adjacency();
  for (std::uint32_t j = 0; j < g.blocks.size(); ++j) {
    std::vector<bool> in_block(g.layout.vertex_count, false);
    for (Vertex x : g.blocks[j]) in_block[x] = true;
    // Cut of V_j: every crossing edge ends at v_j.
    for (Vertex x : g.blocks[j]) {
      for (Vertex y : adj[x]) {
        if (!in_block[y] && y != g.hubs[j]) ++check.block_isolation_violations;
      }
    }
    // Cut of V_j + v_j: every crossing edge is (v_j, V_r).
    for (Vertex y : adj[g.hubs[j]]) {
      if (!in_block[y] && g.role[y] != Role::kRight) ++check.block_isolation_violations;
    }
  }
  return check;
}

std::uint32_t sample_hub_degree(std::uint64_t n, const UrParams& ur, std::mt19937_64& rng) {
  const DskGraph g = sample_d_sk(n, ur, rng);
  const Vertex v = g.hubs[std::uniform_int_distribution<std::size_t>(0, g.hubs.size() - 1)(rng)];
  return static_cast<std::uint32_t>(g.graph.adjacency()[v].size());
}

std::uint32_t sample_right_degree(std::uint64_t n, const UrParams& ur, std::mt19937_64& rng) {
  const DskGraph g = sample_d_sk(n, ur, rng);
  const Vertex v = g.right[std::uniform_int_distribution<std::size_t>(0, g.right.size() - 1)(rng)];
  return static_cast<std::uint32_t>(g.graph.adjacency()[v].size());
}

DskPrimeSample sample_d_sk_prime(std::uint64_t n, const UrParams& ur, std::mt19937_64& rng) {
  const DskLayout l = dsk_layout(n);
  check_ur_fits(l, ur);
  DskPrimeSample out;
  out.which = static_cast<DskPrimeCase>(std::uniform_int_distribution<int>(0, 2)(rng));
  if (out.which == DskPrimeCase::kDsk) {
    out.dsk = sample_d_sk(n, ur, rng);
    out.graph = out.dsk->graph;
    return out;
  }
  out.graph = ExactGraph(l.vertex_count);
  const auto order = shuffled_vertices(l.vertex_count, rng);
  const std::uint32_t half = l.vertex_count / 2;
  out.u1.assign(order.begin(), order.begin() + half);
  out.u2.assign(order.begin() + half, order.begin() + 2 * half);
  for (Vertex x : out.u1) {
    const std::uint32_t d = out.which == DskPrimeCase::kMiddleDegrees ? sample_hub_degree(n, ur, rng)
                                                                      : sample_right_degree(n, ur, rng);
    out.u1_degrees.push_back(d);
    for (Vertex y : pick(out.u2, std::min<std::uint32_t>(d, half), rng)) out.graph.insert(x, y);
  }
  return out;
}

Embedding embed_ur_in_dsk(const ElementSet& s, const ElementSet& t, std::uint64_t n, const UrParams& ur,
                          std::mt19937_64& rng) {
  check_ur_pair(s, t);
  Embedding e;
  DskGraph& g = e.dsk;
  g.layout = dsk_layout(n);
  check_ur_fits(g.layout, ur);
  const DskLayout& l = g.layout;
  if (!s.empty() && s.back() >= l.base) throw ParameterError("S must lie inside [n^(1/5)]");
  g.graph = ExactGraph(l.vertex_count);

  // 1. V_m, injection beta into V \ V_m, hub v_i.
  const auto order = shuffled_vertices(l.vertex_count, rng);
  g.hubs.assign(order.begin(), order.begin() + l.hubs);
  std::vector<Vertex> rest(order.begin() + l.hubs, order.end());
  std::shuffle(rest.begin(), rest.end(), rng);
  e.beta.assign(rest.begin(), rest.begin() + l.base);
  std::vector<Vertex> pool(rest.begin() + l.base, rest.end());
  e.hub_index = std::uniform_int_distribution<std::uint32_t>(0, l.hubs - 1)(rng);
  e.hub = g.hubs[e.hub_index];

  // 2. Blocks and V_r conditioned on beta(T) in V_i and beta([U] \ T) in V_r.
  auto take = [&](std::size_t k) {
    std::vector<Vertex> out(pool.end() - static_cast<std::ptrdiff_t>(k), pool.end());
    pool.resize(pool.size() - k);
    return out;
  };
  g.blocks.resize(l.hubs);
  std::vector<Vertex>& planted = g.blocks[e.hub_index];
  for (Element x = 0; x < l.base; ++x) {
    (contains(t, x) ? planted : g.right).push_back(e.beta[x]);
  }
  for (Vertex v : take(l.block_size - planted.size())) planted.push_back(v);
  for (Vertex v : take(l.right_size - g.right.size())) g.right.push_back(v);
  for (std::uint32_t j = 0; j < l.hubs; ++j) {
    if (j != e.hub_index) g.blocks[j] = take(l.block_size);
  }
  g.isolated = std::move(pool);
  assign_roles(g);

  // 3. v_i's neighborhood is beta(S).
  for (Element x : s) g.graph.insert(e.hub, e.beta[x]);
  // 4. Fresh D_ur instances everywhere else.
  g.instances.resize(l.hubs);
  g.instances[e.hub_index] = UrInstance{s, t, ur.stage_of(static_cast<std::uint32_t>(t.size())).value_or(0)};
  for (std::uint32_t j = 0; j < l.hubs; ++j) {
    if (j == e.hub_index) continue;
    g.instances[j] = sample_d_ur(ur, rng);
    connect_hub(g, j, rng);
  }
  return e;
}

std::optional<Element> recover_element(const Embedding& e, const SpanningForest& forest) {
  for (const Edge& edge : forest.edges) {
    if (edge.u != e.hub && edge.v != e.hub) continue;
    const Vertex other = edge.u == e.hub ? edge.v : edge.u;
    if (e.dsk.role[other] != Role::kRight) continue;
    auto it = std::find(e.beta.begin(), e.beta.end(), other);
    if (it == e.beta.end()) return std::nullopt;  // a V_r vertex outside beta: arbitrary output
    return static_cast<Element>(it - e.beta.begin());
  }
  return std::nullopt;
}

ExactGraph disconnected_copies(const std::vector<ExactGraph>& graphs) {
  if (graphs.empty()) return ExactGraph(0);
  const std::uint32_t size = graphs.front().n();
  for (const auto& g : graphs) {
    if (g.n() != size) throw ParameterError("copies must have the same vertex count");
  }
  ExactGraph out(size * static_cast<std::uint32_t>(graphs.size()));
  for (std::uint32_t c = 0; c < graphs.size(); ++c) {
    for (const Edge& e : graphs[c].edges()) out.insert(e.u + c * size, e.v + c * size);
  }
  return out;
}

SpanningForest restrict_to_copy(const SpanningForest& forest, std::uint32_t copy_size, std::uint32_t copy) {
  const Vertex lo = copy * copy_size, hi = lo + copy_size;
  std::vector<Edge> edges;
  for (const Edge& e : forest.edges) {
    if (e.u >= lo && e.u < hi && e.v >= lo && e.v < hi) edges.push_back(Edge{e.u - lo, e.v - lo});
  }
  return SpanningForest::from_edges(copy_size, std::move(edges));
}

}  // namespace sketchspan
