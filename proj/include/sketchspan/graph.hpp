#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sketchspan/agm.hpp"
#include "sketchspan/forest.hpp"

namespace sketchspan {

/// Exact simple graph on [0, n); the ground-truth oracle.
class ExactGraph {
 public:
  explicit ExactGraph(std::uint32_t n = 0) : n_(n) {}

  std::uint32_t n() const { return n_; }
  const std::set<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  bool contains(Vertex u, Vertex v) const { return u != v && edges_.contains(Edge::make(u, v)); }
  /// Returns false if the edge was already present.
  bool insert(Vertex u, Vertex v);
  /// Returns false if the edge was absent.
  bool erase(Vertex u, Vertex v);

  std::vector<std::vector<Vertex>> adjacency() const;

 private:
  void check(Vertex u, Vertex v) const;

  std::uint32_t n_;
  std::set<Edge> edges_;
};

struct StreamOp {
  enum class Kind { kInsert, kDelete, kQuery };
  Kind kind = Kind::kQuery;
  Vertex u = 0;
  Vertex v = 0;
  std::size_t line = 0;

  static StreamOp insert(Vertex u, Vertex v) { return {Kind::kInsert, u, v, 0}; }
  static StreamOp erase(Vertex u, Vertex v) { return {Kind::kDelete, u, v, 0}; }
  static StreamOp query() { return {Kind::kQuery, 0, 0, 0}; }

  bool same_op(const StreamOp& o) const { return kind == o.kind && u == o.u && v == o.v; }
};

struct Stream {
  std::optional<std::uint32_t> n;  // from the "n <N>" header, when present
  std::vector<StreamOp> ops;
};

/// Parses "n <N>" / "+ u v" / "- u v" / "?" lines; '#' starts a comment.
/// Throws ParseError with the 1-based line and column of the problem.
Stream parse_stream(std::string_view text);

std::string format_stream(const Stream& stream);

/// Connected components, each sorted, ordered by smallest member.
Partition oracle_components(const ExactGraph& g);

enum class Violation { kEdgeNotInGraph, kCycle, kWrongEdgeCount, kComponentsMismatch };
std::string_view to_string(Violation v);

struct VerificationReport {
  bool is_valid = true;
  std::vector<Violation> reasons;

  bool has(Violation v) const;
};

VerificationReport verify_forest(const SpanningForest& f, const ExactGraph& g);

struct QueryOutcome {
  SpanningForest forest;
  VerificationReport report;
};

/// Applies ops to the bank and the oracle in lockstep. Every Query yields the
/// bank's forest and its verification against the oracle. Throws
/// MultiplicityError on an insert of a present edge or delete of an absent one.
std::vector<QueryOutcome> apply_stream(VertexSketchBank& bank, ExactGraph& oracle, const std::vector<StreamOp>& ops,
                                       Execution exec = Execution::kParallel);

/// Insert-only spanning forest: keep an edge iff it joins two trees.
/// Throws UnsupportedOpError on a Delete.
SpanningForest incremental_baseline(std::uint32_t n, const std::vector<StreamOp>& ops);

/// Random simple-graph-respecting turnstile stream on n vertices: `inserts`
/// insertions interleaved with `deletes` deletions of present edges, ending
/// with a single Query.
std::vector<StreamOp> random_turnstile_stream(std::uint32_t n, std::size_t inserts, std::size_t deletes,
                                              std::mt19937_64& rng);

/// Erdos-Renyi style graph with the given expected average degree.
ExactGraph random_graph(std::uint32_t n, double average_degree, std::mt19937_64& rng);

}  // namespace sketchspan
