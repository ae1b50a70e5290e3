// Command-line driver: streams, referee simulations and the lab experiments.
// Exit codes: 0 success, 1 experiment threshold breached, 2 usage or input error.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sketchspan/errors.hpp"
#include "sketchspan/experiments.hpp"

namespace {

using sketchspan::ExperimentConfig;
using sketchspan::ExperimentResult;

constexpr int kBreached = 1;
constexpr int kUsage = 2;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SKETCHSPAN_SEED")) {
    try {
      return std::stoull(env, nullptr, 0);
    } catch (const std::exception&) {
      throw sketchspan::ParameterError(std::string("SKETCHSPAN_SEED is not an integer: ") + env);
    }
  }
  return 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sketchspan::ParameterError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Raw flag values; only flags actually given override the config file.
struct Flags {
  std::string n, config, out, protocol, graph;
  double delta = 0, c_size = 0, c_r = 0, ur_delta = 0, avg_degree = 0;
  std::uint32_t trials = 0, universe = 0;
  std::uint64_t seed = 0;
  bool fixed_delta = false;
  std::map<std::string, CLI::Option*> given;

  void attach(CLI::App* app) {
    given["n"] = app->add_option("--n", n, "vertex count, or a comma-separated list");
    given["delta"] = app->add_option("--delta", delta, "failure probability");
    given["trials"] = app->add_option("--trials", trials, "number of trials");
    given["seed"] = app->add_option("--seed", seed, "master seed (default $SKETCHSPAN_SEED, else 1)");
    given["out"] = app->add_option("--out", out, "CSV output path (default stdout)");
    given["config"] = app->add_option("--config", config, "flat key = value file; flags override it");
    given["c_size"] = app->add_option("--c-size", c_size, "UR size constant");
    given["c_r"] = app->add_option("--c-r", c_r, "UR round constant");
    given["ur_delta"] = app->add_option("--ur-delta", ur_delta, "delta of the hard UR distribution");
    given["universe"] = app->add_option("--universe", universe, "UR universe size");
    given["protocol"] = app->add_option("--protocol", protocol, "encdec protocol: fail, wrong, sketch or all");
    given["graph"] = app->add_option("--graph", graph, "edge-list file ('n N' header, then 'u v' lines)");
    given["avg_degree"] = app->add_option("--avg-degree", avg_degree, "random graph average degree");
    given["fixed_delta"] = app->add_flag("--fixed-delta", fixed_delta, "scaling: keep delta fixed instead of 1/n");
  }

  bool has(const std::string& key) const { return given.at(key)->count() > 0; }

  ExperimentConfig build(std::string name, std::uint32_t trials_default) const {
    ExperimentConfig cfg;
    cfg.name = std::move(name);
    cfg.trials = trials_default;
    cfg.seed = default_seed();
    if (has("config")) sketchspan::apply_config_text(cfg, read_file(config));
    if (has("n")) cfg.n_list = sketchspan::parse_n_list(n);
    if (has("delta")) cfg.delta = delta;
    if (has("trials")) cfg.trials = trials;
    if (has("seed")) cfg.seed = seed;
    if (has("out")) cfg.out = out;
    if (has("c_size")) cfg.c_size = c_size;
    if (has("c_r")) cfg.c_r = c_r;
    if (has("ur_delta")) cfg.ur_delta = ur_delta;
    if (has("universe")) cfg.universe = universe;
    if (has("protocol")) cfg.protocol = protocol;
    if (has("graph")) cfg.graph_path = graph;
    if (has("avg_degree")) cfg.avg_degree = avg_degree;
    if (has("fixed_delta")) cfg.fixed_delta = fixed_delta;
    cfg.validate();
    return cfg;
  }
};

int emit(const ExperimentResult& res, const std::string& out) {
  const std::string csv = res.table.to_csv();
  if (out.empty()) {
    std::cout << csv;
    std::cerr << res.summary << '\n';
  } else {
    std::ofstream f(out);
    if (!f) throw sketchspan::ParameterError("cannot write '" + out + "'");
    f << csv;
    std::cout << res.summary << '\n';
  }
  return res.threshold_breached ? kBreached : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear-sketch spanning forests, referee simulation and lower-bound lab"};
  app.require_subcommand(1);

  std::function<int()> action;
  std::vector<std::unique_ptr<Flags>> all_flags;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, std::uint32_t trials,
                  std::function<ExperimentResult(const ExperimentConfig&)> run) {
    CLI::App* sub = parent->add_subcommand(name, help);
    auto& flags = *all_flags.emplace_back(std::make_unique<Flags>());
    flags.attach(sub);
    sub->callback([&flags, &action, name, trials, run] {
      action = [&flags, name, trials, run] {
        const ExperimentConfig cfg = flags.build(name, trials);
        return emit(run(cfg), cfg.out);
      };
    });
  };

  // run <stream-file>
  std::string stream_path, run_out;
  double run_delta = 0.05;
  std::uint64_t run_seed = 0;
  CLI::App* run = app.add_subcommand("run", "apply a turnstile stream file and verify every query");
  run->add_option("stream", stream_path, "stream file")->required();
  run->add_option("--delta", run_delta, "failure probability");
  auto* run_seed_opt = run->add_option("--seed", run_seed, "bank seed (default $SKETCHSPAN_SEED, else 1)");
  run->add_option("--out", run_out, "CSV output path (default stdout)");
  run->callback([&] {
    action = [&] {
      const std::uint64_t seed = run_seed_opt->count() ? run_seed : default_seed();
      return emit(sketchspan::run_stream_experiment(read_file(stream_path), run_delta, seed), run_out);
    };
  });

  CLI::App* exp = app.add_subcommand("exp", "streaming experiments");
  exp->require_subcommand(1);
  leaf(exp, "failure", "failure rate over random dynamic streams", 500, sketchspan::failure_experiment);
  leaf(exp, "scaling", "sketch size and message length across n", 1, sketchspan::scaling_experiment);

  CLI::App* sim = app.add_subcommand("sim", "distributed simulations");
  sim->require_subcommand(1);
  leaf(sim, "dist", "referee model on a graph file or a random graph", 1, sketchspan::distributed_experiment);

  CLI::App* lab = app.add_subcommand("lab", "lower-bound constructions");
  lab->require_subcommand(1);
  leaf(lab, "encdec", "UR encoder/decoder round trips", 500, sketchspan::encdec_experiment);
  leaf(lab, "nfold", "n-fold UR through one spanning forest bank", 200, sketchspan::nfold_experiment);
  leaf(lab, "embed", "UR instance planted in a D_sk graph", 200, sketchspan::embed_experiment);
  leaf(lab, "dsk", "D_sk structural checks", 1000, sketchspan::dsk_experiment);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return action ? action() : kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kUsage;
}
