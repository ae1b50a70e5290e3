#include "sketchspan/graph.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "sketchspan/errors.hpp"

namespace sketchspan {

void ExactGraph::check(Vertex u, Vertex v) const {
  if (u == v) throw SelfLoopError("self-loop on vertex " + std::to_string(u));
  if (u >= n_ || v >= n_) throw RangeError("vertex outside [0, n)");
}

bool ExactGraph::insert(Vertex u, Vertex v) {
  check(u, v);
  return edges_.insert(Edge::make(u, v)).second;
}

bool ExactGraph::erase(Vertex u, Vertex v) {
  check(u, v);
  return edges_.erase(Edge::make(u, v)) == 1;
}

std::vector<std::vector<Vertex>> ExactGraph::adjacency() const {
  std::vector<std::vector<Vertex>> adj(n_);
  for (const Edge& e : edges_) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

namespace {

struct Cursor {
  std::string_view line;
  std::size_t line_no;
  std::size_t pos = 0;

  void skip_space() {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
  }
  bool at_end() {
    skip_space();
    return pos >= line.size();
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_no, pos + 1, what); }

  std::uint64_t number() {
    skip_space();
    if (pos >= line.size()) fail("expected a vertex id");
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + line.size(), value);
    if (ec != std::errc() || ptr == line.data() + pos) fail("expected a non-negative integer");
    pos = static_cast<std::size_t>(ptr - line.data());
    if (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r') fail("unexpected character");
    return value;
  }
};

}  // namespace

Stream parse_stream(std::string_view text) {
  Stream stream;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);

    Cursor c{raw, line_no};
    if (c.at_end()) {
      if (end == text.size()) break;
      continue;
    }
    const char tag = raw[c.pos];
    const std::size_t tag_col = c.pos;
    ++c.pos;
    if (tag == 'n') {
      if (stream.n || !stream.ops.empty()) throw ParseError(line_no, tag_col + 1, "header must precede all operations");
      const std::uint64_t n = c.number();
      if (n < 2 || n > 0xffffffffULL) c.fail("vertex count must be in [2, 2^32)");
      stream.n = static_cast<std::uint32_t>(n);
    } else if (tag == '+' || tag == '-') {
      const std::size_t u_col = c.pos;
      const std::uint64_t u = c.number();
      const std::uint64_t v = c.number();
      if (u == v) throw ParseError(line_no, u_col + 1, "self-loop");
      if (stream.n && (u >= *stream.n || v >= *stream.n)) throw ParseError(line_no, u_col + 1, "vertex id outside [0, n)");
      if (u > 0xffffffffULL || v > 0xffffffffULL) throw ParseError(line_no, u_col + 1, "vertex id too large");
      StreamOp op = tag == '+' ? StreamOp::insert(static_cast<Vertex>(u), static_cast<Vertex>(v))
                               : StreamOp::erase(static_cast<Vertex>(u), static_cast<Vertex>(v));
      op.line = line_no;
      stream.ops.push_back(op);
    } else if (tag == '?') {
      StreamOp op = StreamOp::query();
      op.line = line_no;
      stream.ops.push_back(op);
    } else {
      throw ParseError(line_no, tag_col + 1, std::string("unknown operation '") + tag + "'");
    }
    if (!c.at_end()) c.fail("trailing characters");
    if (end == text.size()) break;
  }
  return stream;
}

std::string format_stream(const Stream& stream) {
  std::ostringstream out;
  if (stream.n) out << "n " << *stream.n << '\n';
  for (const StreamOp& op : stream.ops) {
    switch (op.kind) {
      case StreamOp::Kind::kInsert: out << "+ " << op.u << ' ' << op.v << '\n'; break;
      case StreamOp::Kind::kDelete: out << "- " << op.u << ' ' << op.v << '\n'; break;
      case StreamOp::Kind::kQuery: out << "?\n"; break;
    }
  }
  return out.str();
}

Partition oracle_components(const ExactGraph& g) {
  DisjointSets dsu(g.n());
  for (const Edge& e : g.edges()) dsu.unite(e.u, e.v);
  return dsu.classes();
}

std::string_view to_string(Violation v) {
  switch (v) {
    case Violation::kEdgeNotInGraph: return "edge-not-in-graph";
    case Violation::kCycle: return "cycle";
    case Violation::kWrongEdgeCount: return "wrong-edge-count";
    case Violation::kComponentsMismatch: return "components-mismatch";
  }
  return "unknown";
}

bool VerificationReport::has(Violation v) const { return std::find(reasons.begin(), reasons.end(), v) != reasons.end(); }

VerificationReport verify_forest(const SpanningForest& f, const ExactGraph& g) {
  VerificationReport report;
  auto add = [&](Violation v) {
    if (!report.has(v)) report.reasons.push_back(v);
  };
  DisjointSets dsu(g.n());
  for (const Edge& e : f.edges) {
    if (e.u >= e.v || e.v >= g.n() || !g.contains(e.u, e.v)) add(Violation::kEdgeNotInGraph);
    if (e.u < e.v && e.v < g.n() && !dsu.unite(e.u, e.v)) add(Violation::kCycle);
  }
  const Partition truth = oracle_components(g);
  if (f.edges.size() != g.n() - truth.size()) add(Violation::kWrongEdgeCount);
  if (dsu.classes() != truth) add(Violation::kComponentsMismatch);
  report.is_valid = report.reasons.empty();
  return report;
}

std::vector<QueryOutcome> apply_stream(VertexSketchBank& bank, ExactGraph& oracle, const std::vector<StreamOp>& ops,
                                       Execution exec) {
  if (bank.n() != oracle.n()) throw ParameterError("bank and oracle disagree on n");
  std::vector<QueryOutcome> outcomes;
  for (const StreamOp& op : ops) {
    switch (op.kind) {
      case StreamOp::Kind::kInsert:
        if (oracle.contains(op.u, op.v)) throw MultiplicityError(op.line, "insert of present edge");
        oracle.insert(op.u, op.v);
        bank.update(op.u, op.v, +1);
        break;
      case StreamOp::Kind::kDelete:
        if (!oracle.contains(op.u, op.v)) throw MultiplicityError(op.line, "delete of absent edge");
        oracle.erase(op.u, op.v);
        bank.update(op.u, op.v, -1);
        break;
      case StreamOp::Kind::kQuery: {
        SpanningForest forest = agm_query(bank, exec);
        VerificationReport report = verify_forest(forest, oracle);
        outcomes.push_back({std::move(forest), std::move(report)});
        break;
      }
    }
  }
  return outcomes;
}

SpanningForest incremental_baseline(std::uint32_t n, const std::vector<StreamOp>& ops) {
  DisjointSets dsu(n);
  std::vector<Edge> edges;
  for (const StreamOp& op : ops) {
    if (op.kind == StreamOp::Kind::kDelete) {
      throw UnsupportedOpError("the insert-only baseline cannot process deletions (line " + std::to_string(op.line) + ")");
    }
    if (op.kind != StreamOp::Kind::kInsert) continue;
    if (op.u == op.v) throw SelfLoopError("self-loop");
    if (op.u >= n || op.v >= n) throw RangeError("vertex outside [0, n)");
    if (dsu.unite(op.u, op.v)) edges.push_back(Edge::make(op.u, op.v));
  }
  return SpanningForest::from_edges(n, std::move(edges));
}

std::vector<StreamOp> random_turnstile_stream(std::uint32_t n, std::size_t inserts, std::size_t deletes,
                                              std::mt19937_64& rng) {
  if (n < 2) throw ParameterError("need at least two vertices");
  if (inserts > edge_universe(n)) throw ParameterError("more inserts than vertex pairs");
  std::vector<StreamOp> ops;
  std::vector<Edge> present;
  std::set<Edge> present_set;
  std::uniform_int_distribution<Vertex> pick_vertex(0, n - 1);
  std::size_t ins_left = inserts, del_left = deletes;
  while (ins_left + del_left > 0) {
    const bool can_delete = del_left > 0 && !present.empty();
    const bool do_insert =
        ins_left > 0 && (!can_delete || std::uniform_int_distribution<std::size_t>(0, ins_left + del_left - 1)(rng) < ins_left);
    if (do_insert) {
      Edge e;
      do {
        Vertex a = pick_vertex(rng), b = pick_vertex(rng);
        if (a == b) continue;
        e = Edge::make(a, b);
      } while (e.u == e.v || present_set.contains(e));
      present.push_back(e);
      present_set.insert(e);
      ops.push_back(StreamOp::insert(e.u, e.v));
      --ins_left;
    } else if (can_delete) {
      std::size_t i = std::uniform_int_distribution<std::size_t>(0, present.size() - 1)(rng);
      const Edge e = present[i];
      present[i] = present.back();
      present.pop_back();
      present_set.erase(e);
      ops.push_back(StreamOp::erase(e.u, e.v));
      --del_left;
    } else {
      break;  // nothing to delete yet and no inserts left
    }
  }
  ops.push_back(StreamOp::query());
  for (std::size_t i = 0; i < ops.size(); ++i) ops[i].line = i + 1;
  return ops;
}

ExactGraph random_graph(std::uint32_t n, double average_degree, std::mt19937_64& rng) {
  ExactGraph g(n);
  if (n < 2) return g;
  const double p = std::min(1.0, average_degree / static_cast<double>(n - 1));
  std::bernoulli_distribution coin(p);
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) {
      if (coin(rng)) g.insert(u, v);
    }
  }
  return g;
}

}  // namespace sketchspan
