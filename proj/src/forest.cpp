#include "sketchspan/forest.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sketchspan/errors.hpp"

namespace sketchspan {

std::uint64_t edge_index(std::uint64_t n, Vertex u, Vertex v) {
  if (u >= v || v >= n) throw RangeError("edge_index requires u < v < n");
  // Pairs starting below u: sum_{a<u} (n - 1 - a).
  return std::uint64_t{u} * (2 * n - u - 1) / 2 + (v - u - 1);
}

Edge edge_from_index(std::uint64_t n, std::uint64_t index) {
  if (index >= edge_universe(n)) throw RangeError("edge index out of range");
  // Largest u with start(u) <= index, start(u) = u(2n-u-1)/2.
  auto start = [n](std::uint64_t u) { return u * (2 * n - u - 1) / 2; };
  const double nn = static_cast<double>(n);
  double guess = ((2 * nn - 1) - std::sqrt((2 * nn - 1) * (2 * nn - 1) - 8.0 * static_cast<double>(index))) / 2;
  std::uint64_t u = guess <= 0 ? 0 : static_cast<std::uint64_t>(guess);
  if (u > n - 2) u = n - 2;
  while (u > 0 && start(u) > index) --u;
  while (u + 1 <= n - 2 && start(u + 1) <= index) ++u;
  const std::uint64_t v = index - start(u) + u + 1;
  return Edge{static_cast<Vertex>(u), static_cast<Vertex>(v)};
}

std::vector<std::vector<Vertex>> DisjointSets::classes() {
  std::map<Vertex, std::size_t> slot_of_root;
  std::vector<std::vector<Vertex>> out;
  for (Vertex x = 0; x < parent_.size(); ++x) {
    const Vertex r = find(x);
    auto [it, inserted] = slot_of_root.try_emplace(r, out.size());
    if (inserted) out.emplace_back();
    out[it->second].push_back(x);
  }
  // Scanning x upward already orders classes by smallest member.
  return out;
}

SpanningForest SpanningForest::from_edges(std::uint32_t n, std::vector<Edge> edges) {
  DisjointSets dsu(n);
  for (const Edge& e : edges) {
    if (e.v >= n) throw RangeError("forest edge outside vertex range");
    dsu.unite(e.u, e.v);
  }
  SpanningForest f;
  f.n = n;
  f.edges = std::move(edges);
  f.components = dsu.classes();
  return f;
}

}  // namespace sketchspan
