#include "sketchspan/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <sstream>

#include "sketchspan/agm.hpp"
#include "sketchspan/codec.hpp"
#include "sketchspan/distributed.hpp"
#include "sketchspan/dsk.hpp"
#include "sketchspan/errors.hpp"
#include "sketchspan/graph.hpp"
#include "sketchspan/reduction.hpp"
#include "sketchspan/seed.hpp"
#include "sketchspan/ur.hpp"

namespace sketchspan {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}
std::string num(std::uint64_t x) { return std::to_string(x); }
std::string num(std::uint32_t x) { return std::to_string(x); }
std::string flag(bool b) { return b ? "true" : "false"; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view key, std::string_view v) {
  try {
    std::size_t used = 0;
    const std::string s(v);
    const double x = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ParameterError("bad number for " + std::string(key) + ": '" + std::string(v) + "'");
  }
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
  try {
    std::size_t used = 0;
    const std::string s(v);
    if (s.empty() || s.front() == '-') throw std::invalid_argument("sign");
    const std::uint64_t x = std::stoull(s, &used, 0);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ParameterError("bad integer for " + std::string(key) + ": '" + std::string(v) + "'");
  }
}

std::uint32_t parse_u32(std::string_view key, std::string_view v) {
  const std::uint64_t x = parse_u64(key, v);
  if (x > 0xffffffffULL) throw ParameterError(std::string(key) + " out of range");
  return static_cast<std::uint32_t>(x);
}

Seed trial_seed(const ExperimentConfig& cfg, std::uint64_t trial) {
  return Seed::from_u64(cfg.seed).derive(seed_tag::kTrial, trial);
}

// Runs body(i) for every trial across threads; rows come back in trial order.
// Exceptions are rethrown on the calling thread, lowest trial first.
template <typename Row>
std::vector<Row> run_trials(std::uint32_t trials, const std::function<Row(std::uint32_t)>& body) {
  std::vector<Row> rows(trials);
  std::vector<std::exception_ptr> errors(trials);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(trials); ++i) {
    try {
      rows[i] = body(static_cast<std::uint32_t>(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::uint32_t require_n(const ExperimentConfig& cfg, std::uint32_t fallback) {
  return cfg.n_list.empty() ? fallback : cfg.n_list.front();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw ParameterError("trials must be >= 1");
  if (!(delta > 0 && delta < 1)) throw ParameterError("delta must lie in (0, 1)");
  if (ur_delta && !(*ur_delta > 0 && *ur_delta < 1)) throw ParameterError("ur_delta must lie in (0, 1)");
  if ((c_size && !(*c_size > 0)) || (c_r && !(*c_r > 0))) throw ParameterError("lab constants must be positive");
}

std::vector<std::uint32_t> parse_n_list(std::string_view text) {
  std::vector<std::uint32_t> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    out.push_back(parse_u32("n", item));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ParameterError("empty n list");
  return out;
}

void apply_config_text(ExperimentConfig& cfg, std::string_view text) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key == "n") cfg.n_list = parse_n_list(value);
    else if (key == "delta") cfg.delta = parse_double(key, value);
    else if (key == "trials") cfg.trials = parse_u32(key, value);
    else if (key == "seed") cfg.seed = parse_u64(key, value);
    else if (key == "out") cfg.out = std::string(value);
    else if (key == "c_size") cfg.c_size = parse_double(key, value);
    else if (key == "c_r") cfg.c_r = parse_double(key, value);
    else if (key == "ur_delta") cfg.ur_delta = parse_double(key, value);
    else if (key == "universe") cfg.universe = parse_u32(key, value);
    else if (key == "protocol") cfg.protocol = std::string(value);
    else if (key == "graph") cfg.graph_path = std::string(value);
    else if (key == "avg_degree") cfg.avg_degree = parse_double(key, value);
    else if (key == "fixed_delta") cfg.fixed_delta = value == "true" || value == "1";
    else throw ParameterError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
}

std::string Table::to_csv() const {
  std::ostringstream os;
  auto put = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
      if (!quote) {
        os << cells[i];
        continue;
      }
      os << '"';
      for (char c : cells[i]) os << (c == '"' ? "\"\"" : std::string(1, c));
      os << '"';
    }
    os << '\n';
  };
  put(columns);
  for (const auto& r : rows) put(r);
  return os.str();
}

ExperimentResult run_stream_experiment(std::string_view text, double delta, std::uint64_t seed) {
  const Stream stream = parse_stream(text);
  std::uint32_t n = stream.n.value_or(0);
  if (!stream.n) {
    for (const auto& op : stream.ops) {
      if (op.kind != StreamOp::Kind::kQuery) n = std::max({n, op.u + 1, op.v + 1});
    }
  }
  n = std::max<std::uint32_t>(n, 2);
  VertexSketchBank bank(agm_params(n, delta), Seed::from_u64(seed).derive(seed_tag::kBank));
  ExactGraph oracle(n);
  const auto outcomes = apply_stream(bank, oracle, stream.ops);

  ExperimentResult res;
  res.table.columns = {"seed", "n", "delta", "query_index", "line", "valid", "forest_edge_count", "component_count", "reasons"};
  std::size_t q = 0, invalid = 0;
  for (const auto& op : stream.ops) {
    if (op.kind != StreamOp::Kind::kQuery) continue;
    const auto& o = outcomes[q];
    std::string reasons;
    for (Violation v : o.report.reasons) reasons += (reasons.empty() ? "" : ";") + std::string(to_string(v));
    res.table.rows.push_back({num(seed), num(n), num(delta), num(static_cast<std::uint64_t>(q)),
                              num(static_cast<std::uint64_t>(op.line)), flag(o.report.is_valid),
                              num(static_cast<std::uint64_t>(o.forest.edges.size())),
                              num(static_cast<std::uint64_t>(o.forest.components.size())), reasons});
    if (!o.report.is_valid) ++invalid;
    ++q;
  }
  res.threshold_breached = invalid > 0;
  res.summary = std::to_string(q) + " queries, " + std::to_string(invalid) + " invalid";
  return res;
}

ExperimentResult failure_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::uint32_t n = require_n(cfg, 256);
  const AgmParams params = agm_params(n, cfg.delta);
  const auto valid = run_trials<char>(cfg.trials, [&](std::uint32_t trial) -> char {
    const Seed s = trial_seed(cfg, trial);
    auto rng = s.derive(seed_tag::kStream).rng();
    const auto ops = random_turnstile_stream(n, 2 * static_cast<std::size_t>(n), n / 2, rng);
    VertexSketchBank bank(params, s.derive(seed_tag::kBank));
    ExactGraph oracle(n);
    const auto outcomes = apply_stream(bank, oracle, ops, Execution::kSerial);
    return outcomes.back().report.is_valid;
  });
  ExperimentResult res;
  res.table.columns = {"seed", "n", "delta", "trial", "valid"};
  std::uint32_t failures = 0;
  for (std::uint32_t i = 0; i < cfg.trials; ++i) {
    res.table.rows.push_back({num(cfg.seed), num(n), num(cfg.delta), num(i), flag(valid[i])});
    failures += valid[i] ? 0 : 1;
  }
  const double rate = static_cast<double>(failures) / cfg.trials;
  res.threshold_breached = rate > 2 * cfg.delta;
  res.summary = "failure_rate=" + num(rate) + " (" + std::to_string(failures) + "/" + std::to_string(cfg.trials) +
                "), threshold=" + num(2 * cfg.delta);
  return res;
}

ExperimentResult scaling_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<std::uint32_t> ns = cfg.n_list.empty() ? std::vector<std::uint32_t>{256, 512, 1024, 2048} : cfg.n_list;
  ExperimentResult res;
  res.table.columns = {"seed", "n", "delta", "rounds", "total_bits", "avg_msg_bits", "max_msg_bits", "ratio"};
  double lo = INFINITY, hi = 0;
  for (std::uint32_t n : ns) {
    const double delta = cfg.fixed_delta ? cfg.delta : 1.0 / n;
    const AgmParams params = agm_params(n, delta);
    const Seed s = Seed::from_u64(cfg.seed).derive(seed_tag::kGraph, n);
    const VertexSketchBank bank(params, s);
    const std::uint64_t total = bank.total_size_bits();
    auto rng = s.rng();
    const ExactGraph g = random_graph(n, cfg.avg_degree, rng);
    const SimReport sim = simulate(g, delta, s, Transport::kInMemory);
    const double ln = std::log2(static_cast<double>(n));
    const double ratio = static_cast<double>(total) / (n * std::log2(n / delta) * ln * ln);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    res.table.rows.push_back({num(cfg.seed), num(n), num(delta), num(params.rounds), num(total),
                              num(sim.avg_message_bits), num(sim.max_message_bits), num(ratio)});
  }
  res.threshold_breached = hi > 4 * lo;
  res.summary = "ratio spread=" + num(hi / lo) + " (max/min), threshold=4";
  return res;
}

namespace {

ExactGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open graph file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  // An edge list is a stream made only of inserts.
  std::string text;
  std::istringstream lines(buf.str());
  std::string line;
  bool header = true;
  while (std::getline(lines, line)) {
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') {
      text += "\n";
      continue;
    }
    if (header && t.front() == 'n') {
      text += std::string(t) + "\n";
    } else {
      text += "+ " + std::string(t) + "\n";
    }
    header = false;
  }
  const Stream s = parse_stream(text);
  if (!s.n) throw ParameterError("graph file must start with an 'n <N>' header");
  ExactGraph g(*s.n);
  for (const auto& op : s.ops) {
    if (!g.insert(op.u, op.v)) throw MultiplicityError(op.line, "duplicate edge");
  }
  return g;
}

}  // namespace

ExperimentResult distributed_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::optional<ExactGraph> fixed;
  if (!cfg.graph_path.empty()) fixed = load_edge_list(cfg.graph_path);
  const std::uint32_t n = fixed ? fixed->n() : require_n(cfg, 256);
  struct Row {
    bool valid = false;
    double avg = 0;
    std::uint64_t max = 0, total = 0;
    std::size_t edges = 0;
  };
  const auto rows = run_trials<Row>(cfg.trials, [&](std::uint32_t trial) {
    const Seed s = trial_seed(cfg, trial);
    ExactGraph g = fixed ? *fixed : [&] {
      auto rng = s.derive(seed_tag::kGraph).rng();
      return random_graph(n, cfg.avg_degree, rng);
    }();
    const SimReport r = simulate(g, cfg.delta, s.derive(seed_tag::kBank), Transport::kSerialized, Execution::kSerial);
    return Row{r.valid, r.avg_message_bits, r.max_message_bits, r.total_message_bits, g.edge_count()};
  });
  ExperimentResult res;
  res.table.columns = {"seed", "n", "delta", "trial", "edges", "valid", "avg_bits", "max_bits", "total_bits"};
  std::uint32_t failures = 0;
  for (std::uint32_t i = 0; i < cfg.trials; ++i) {
    const Row& r = rows[i];
    res.table.rows.push_back({num(cfg.seed), num(n), num(cfg.delta), num(i), num(static_cast<std::uint64_t>(r.edges)),
                              flag(r.valid), num(r.avg), num(r.max), num(r.total)});
    failures += r.valid ? 0 : 1;
  }
  const double rate = static_cast<double>(failures) / cfg.trials;
  res.threshold_breached = rate > 2 * cfg.delta;
  res.summary = "failure_rate=" + num(rate) + ", threshold=" + num(2 * cfg.delta);
  return res;
}

ExperimentResult encdec_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::uint32_t universe = cfg.universe.value_or(require_n(cfg, 256));
  const double ur_delta = cfg.ur_delta.value_or(std::ldexp(1.0, -8));
  const UrParams p = ur_params(universe, ur_delta, cfg.c_size.value_or(2), cfg.c_r.value_or(2));

  std::vector<std::pair<std::string, std::shared_ptr<const UrProtocol>>> protocols;
  auto want = [&](const char* name) { return cfg.protocol == "all" || cfg.protocol == name; };
  if (want("fail")) protocols.emplace_back("fail", std::make_shared<AlwaysFailProtocol>());
  if (want("wrong")) protocols.emplace_back("wrong", std::make_shared<AlwaysWrongProtocol>(universe));
  if (want("sketch")) protocols.emplace_back("sketch", std::make_shared<SketchUrProtocol>(universe, cfg.delta, cfg.delta));
  if (protocols.empty()) throw ParameterError("unknown protocol '" + cfg.protocol + "' (fail, wrong, sketch, all)");

  struct Row {
    bool ok = false;
    EncodeStats stats;
    std::size_t bytes = 0;
  };
  ExperimentResult res;
  res.table.columns = {"seed", "n", "delta", "ur_delta", "protocol", "trial", "success", "first_stage", "accepted",
                       "stages", "record_bytes"};
  std::uint32_t lost = 0;
  std::ostringstream summary;
  for (std::size_t k = 0; k < protocols.size(); ++k) {
    const auto& [name, proto] = protocols[k];
    const auto rows = run_trials<Row>(cfg.trials, [&](std::uint32_t trial) {
      const Seed s = trial_seed(cfg, trial).derive(seed_tag::kInstance, k);
      auto rng = s.rng();
      const ElementSet set = random_subset(universe, p.m, rng);
      const Seed shared = s.derive(seed_tag::kPermutation), priv = s.derive(seed_tag::kPrivate);
      Row row;
      const EncRecord rec = encode(set, p, *proto, shared, priv, &row.stats);
      const auto bytes = rec.serialize();
      row.bytes = bytes.size();
      row.ok = decode(EncRecord::deserialize(bytes), p, *proto, shared) == set;
      return row;
    });
    std::uint32_t ok = 0;
    double accepted = 0;
    for (std::uint32_t i = 0; i < cfg.trials; ++i) {
      const Row& r = rows[i];
      res.table.rows.push_back({num(cfg.seed), num(universe), num(cfg.delta), num(ur_delta), name, num(i), flag(r.ok),
                                num(r.stats.first_stage), num(r.stats.accepted), num(r.stats.stages),
                                num(static_cast<std::uint64_t>(r.bytes))});
      ok += r.ok;
      accepted += r.stats.accepted;
    }
    lost += cfg.trials - ok;
    summary << (k ? "; " : "") << name << ": " << ok << "/" << cfg.trials << " round trips, mean |A|="
            << num(accepted / cfg.trials);
  }
  res.threshold_breached = lost > 0;
  res.summary = summary.str();
  return res;
}

ExperimentResult nfold_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::uint32_t n = require_n(cfg, 32);
  const auto rows = run_trials<NfoldResult>(cfg.trials, [&](std::uint32_t trial) {
    const Seed s = trial_seed(cfg, trial);
    auto rng = s.derive(seed_tag::kInstance).rng();
    return nfold_reduction(random_ur_instances(n, rng), cfg.delta, s.derive(seed_tag::kBank));
  });
  ExperimentResult res;
  res.table.columns = {"seed", "n", "delta", "trial", "all_correct", "forest_valid", "communicated_bits", "memory_bits"};
  std::uint32_t correct = 0, implication_broken = 0;
  for (std::uint32_t i = 0; i < cfg.trials; ++i) {
    const NfoldResult& r = rows[i];
    res.table.rows.push_back({num(cfg.seed), num(n), num(cfg.delta), num(i), flag(r.all_correct), flag(r.forest_valid),
                              num(8 * r.communicated_bytes), num(r.memory_bits)});
    correct += r.all_correct;
    implication_broken += r.forest_valid && !r.all_correct;
  }
  const double rate = static_cast<double>(correct) / cfg.trials;
  res.threshold_breached = rate < 1 - 2 * cfg.delta || implication_broken > 0;
  res.summary = "all_correct_rate=" + num(rate) + ", valid-but-wrong=" + std::to_string(implication_broken) +
                ", threshold=" + num(1 - 2 * cfg.delta);
  return res;
}

namespace {

// Desk-scale UR defaults for graph experiments: universe n^{1/5}.
UrParams graph_ur_params(const ExperimentConfig& cfg, std::uint32_t base) {
  return ur_params(base, cfg.ur_delta.value_or(1.0 / 16), cfg.c_size.value_or(2), cfg.c_r.value_or(1));
}

}  // namespace

ExperimentResult embed_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::uint64_t n = require_n(cfg, 8 * 8 * 8 * 8 * 8);
  const DskLayout layout = dsk_layout(n);
  const UrParams ur = graph_ur_params(cfg, layout.base);
  struct Row {
    bool valid = false;
    std::optional<Element> got;
    bool correct = false;
    std::uint32_t s_size = 0, t_size = 0;
  };
  const auto rows = run_trials<Row>(cfg.trials, [&](std::uint32_t trial) {
    const Seed s = trial_seed(cfg, trial);
    auto rng = s.derive(seed_tag::kInstance).rng();
    const UrInstance inst = sample_d_ur(ur, rng);
    const Embedding e = embed_ur_in_dsk(inst.s, inst.t, n, ur, rng);
    const SimReport sim = simulate(e.dsk.graph, cfg.delta, s.derive(seed_tag::kBank), Transport::kInMemory,
                                   Execution::kSerial);
    Row row;
    row.valid = sim.valid;
    row.got = recover_element(e, sim.forest);
    row.correct = row.got && contains(set_difference(inst.s, inst.t), *row.got);
    row.s_size = static_cast<std::uint32_t>(inst.s.size());
    row.t_size = static_cast<std::uint32_t>(inst.t.size());
    return row;
  });
  ExperimentResult res;
  res.table.columns = {"seed", "n", "delta", "trial", "s_size", "t_size", "forest_valid", "recovered", "correct"};
  std::uint32_t valid = 0, sound = 0;
  for (std::uint32_t i = 0; i < cfg.trials; ++i) {
    const Row& r = rows[i];
    res.table.rows.push_back({num(cfg.seed), num(n), num(cfg.delta), num(i), num(r.s_size), num(r.t_size),
                              flag(r.valid), r.got ? num(*r.got) : "", flag(r.correct)});
    valid += r.valid;
    sound += r.valid && r.correct;
  }
  res.threshold_breached = sound != valid;
  res.summary = "valid forests=" + std::to_string(valid) + "/" + std::to_string(cfg.trials) +
                ", correct given valid=" + std::to_string(sound) + "/" + std::to_string(valid);
  return res;
}

ExperimentResult dsk_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::uint64_t n = require_n(cfg, 4 * 4 * 4 * 4 * 4);
  const DskLayout layout = dsk_layout(n);
  const UrParams ur = graph_ur_params(cfg, layout.base);
  const auto rows = run_trials<std::pair<DskStructureCheck, std::size_t>>(cfg.trials, [&](std::uint32_t trial) {
    auto rng = trial_seed(cfg, trial).derive(seed_tag::kGraph).rng();
    const DskGraph g = sample_d_sk(n, ur, rng);
    return std::make_pair(check_dsk_structure(g), g.graph.edge_count());
  });
  ExperimentResult res;
  res.table.columns = {"seed", "n", "delta", "trial", "edges", "edge_type_violations", "block_isolation_violations"};
  std::uint64_t bad = 0;
  for (std::uint32_t i = 0; i < cfg.trials; ++i) {
    const auto& [check, edges] = rows[i];
    res.table.rows.push_back({num(cfg.seed), num(n), num(ur.delta), num(i), num(static_cast<std::uint64_t>(edges)),
                              num(check.edge_type_violations), num(check.block_isolation_violations)});
    bad += !check.ok();
  }
  res.threshold_breached = bad > 0;
  res.summary = std::to_string(bad) + " of " + std::to_string(cfg.trials) + " samples violate the structure";
  return res;
}

}  // namespace sketchspan
