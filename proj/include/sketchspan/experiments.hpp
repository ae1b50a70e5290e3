#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sketchspan {

struct ExperimentConfig {
  std::string name;
  std::vector<std::uint32_t> n_list;  // most experiments use only the first entry
  double delta = 0.05;
  std::uint32_t trials = 1;
  std::uint64_t seed = 1;
  std::string out;  // empty means stdout
  // UR lab overrides. Unset means the lab's desk-scale default: the
  // asymptotic constants (20, 20) leave no valid schedule at small universes.
  std::optional<double> c_size;
  std::optional<double> c_r;
  std::optional<double> ur_delta;
  std::optional<std::uint32_t> universe;
  std::string protocol = "all";   // encdec: fail | wrong | sketch | all
  std::string graph_path;         // sim dist: edge-list file
  double avg_degree = 4;          // sim dist: random graph density
  bool fixed_delta = false;       // exp scaling: use delta as given instead of 1/n

  std::uint32_t n() const { return n_list.empty() ? 0 : n_list.front(); }
  /// Throws ParameterError on trials == 0 or a delta outside (0, 1).
  void validate() const;
};

/// Flat "key = value" text; '#' starts a comment. Unknown keys and malformed
/// lines throw ParameterError. Keys: n, delta, trials, seed, out, c_size, c_r,
/// ur_delta, universe, protocol, graph, avg_degree, fixed_delta.
void apply_config_text(ExperimentConfig& cfg, std::string_view text);
std::vector<std::uint32_t> parse_n_list(std::string_view text);

/// CSV table with a fixed header. Every experiment's header starts seed,n,delta.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::string to_csv() const;
};

struct ExperimentResult {
  Table table;
  std::string summary;  // one human-readable line, not part of the CSV
  bool threshold_breached = false;
};

/// Runs the stream in `text` through a fresh bank; one row per query.
ExperimentResult run_stream_experiment(std::string_view text, double delta, std::uint64_t seed);

/// Random dynamic streams (2n inserts, n/2 deletes, final query) at n.
/// Breach: failure rate above 2 delta.
ExperimentResult failure_experiment(const ExperimentConfig& cfg);

/// total_size_bits and per-vertex message bits across n_list, delta = 1/n
/// unless fixed_delta. Breach: normalized size ratio varies by more than 4x.
ExperimentResult scaling_experiment(const ExperimentConfig& cfg);

/// Referee simulation on an edge-list file or a random graph.
/// Breach: failure rate above 2 delta.
ExperimentResult distributed_experiment(const ExperimentConfig& cfg);

/// Encoder/decoder round trips. Breach: any round trip that loses S.
ExperimentResult encdec_experiment(const ExperimentConfig& cfg);
/// n-fold UR through one bank. Breach: all-correct rate below 1 - 2 delta, or
/// a valid forest with a wrong answer.
ExperimentResult nfold_experiment(const ExperimentConfig& cfg);
/// Planted UR instance in a D_sk graph. Breach: a valid forest whose
/// recovered element is outside S \ T.
ExperimentResult embed_experiment(const ExperimentConfig& cfg);
/// D_sk structural checks. Breach: any violation.
ExperimentResult dsk_experiment(const ExperimentConfig& cfg);

}  // namespace sketchspan
