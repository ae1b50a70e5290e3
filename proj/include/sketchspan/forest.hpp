#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace sketchspan {

using Vertex = std::uint32_t;

/// Undirected edge stored with u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  static Edge make(Vertex a, Vertex b) { return a < b ? Edge{a, b} : Edge{b, a}; }

  auto operator<=>(const Edge&) const = default;
};

/// Number of unordered pairs on n vertices, n(n-1)/2.
inline std::uint64_t edge_universe(std::uint64_t n) { return n * (n - 1) / 2; }

/// Position of pair (u, v), u < v, in the lexicographic enumeration of pairs.
std::uint64_t edge_index(std::uint64_t n, Vertex u, Vertex v);
Edge edge_from_index(std::uint64_t n, std::uint64_t index);

/// Sign of edge (u, v) in the incidence vector of endpoint w: +1 for the
/// smaller endpoint, -1 for the larger.
inline int edge_sign(const Edge& e, Vertex w) { return w == e.u ? 1 : -1; }

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), Vertex{0}); }

  Vertex find(Vertex x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(Vertex a, Vertex b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

  std::size_t size() const { return parent_.size(); }

  /// Classes sorted internally and ordered by smallest member.
  std::vector<std::vector<Vertex>> classes();

 private:
  std::vector<Vertex> parent_;
  std::vector<std::size_t> size_;
};

using Partition = std::vector<std::vector<Vertex>>;

/// Output of a spanning-forest query: an edge list plus the partition of
/// [0, n) it induces.
struct SpanningForest {
  std::uint32_t n = 0;
  std::vector<Edge> edges;
  Partition components;

  /// Builds the partition from `edges`; edges are kept in the given order.
  static SpanningForest from_edges(std::uint32_t n, std::vector<Edge> edges);

  bool operator==(const SpanningForest&) const = default;
};

}  // namespace sketchspan
