#pragma once

// Experiment configuration, orchestration and summaries.
//
// Configs are JSON documents with "schema_version": 1. See README.md for
// the full key list.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mirrorvi/problems.hpp"
#include "mirrorvi/solver.hpp"

namespace mirrorvi {

inline constexpr int kConfigSchemaVersion = 1;

enum class SolverKind { Adaptive, AdaptiveInexact, Fixed };

std::string to_string(SolverKind kind);

struct InstanceSpec {
  std::string family;  // bilinear | affine | holder
  std::uint64_t seed = 0;
  // bilinear
  Index m = 0;
  Index n = 0;
  double entry_scale = 1.0;
  std::optional<Matrix> matrix;
  // affine (M, b inline, or random monotone of size n from seed)
  std::optional<Matrix> M;
  std::optional<Vector> b;
  std::string geometry = "euclidean";  // euclidean | entropy
  // affine and holder
  std::optional<FeasibleSet> set;
  double nu = 1.0;
  std::optional<Vector> center;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  InstanceSpec instance;
  SolverKind solver = SolverKind::Adaptive;
  SolverConfig solver_config;
  /// When set, L0 = L0_times_known_L * known_L (overrides solver_config.L0).
  std::optional<double> L0_times_known_L;
  double delta_u = 0.0;
  std::uint64_t noise_seed = 0;
  /// Fixed-step baseline; nullopt means "use known_L" / "use the
  /// Lipschitz iteration bound".
  std::optional<double> L_fixed;
  std::optional<std::size_t> fixed_iterations;
  std::size_t repetitions = 1;
  std::string trace_path;
  std::string iterates_path;
  std::string summary_path;
  /// Where the config came from, for error messages.
  std::string source = "<inline>";
};

ExperimentConfig parse_config(const nlohmann::json& j, const std::string& source = "<inline>");
ExperimentConfig load_config(const std::string& path);
nlohmann::json load_config_json(const std::string& path);

ProblemInstance build_instance(const InstanceSpec& spec);
FeasibleSet parse_set(const nlohmann::json& j, const std::string& where);

struct RunSummary {
  std::string instance;
  std::string solver;
  SolveStatus status = SolveStatus::MaxOuterReached;
  std::size_t N = 0;
  double S_N = 0.0;
  std::uint64_t total_oracle_calls = 0;  // solver loop only
  std::uint64_t l0_oracle_calls = 0;      // automatic L0 estimation
  std::uint64_t total_prox_calls = 0;
  double max_accepted_L = 0.0;
  double min_accepted_L = 0.0;
  double weighted_gap = 0.0;
  double weak_gap_at_probes = 0.0;
  std::optional<double> saddle_gap;
  double certificate_lhs_max = 0.0;
  double wall_time = 0.0;
  std::optional<std::uint64_t> theoretical_N_bound;
  double epsilon = 0.0;
  double delta_u = 0.0;
  double L0_used = 0.0;
  std::optional<double> known_L;
  double R_sq = 0.0;
  double R_sq_pairwise = 0.0;
};

nlohmann::json to_json(const RunSummary& s);

struct TheoreticalBound {
  std::optional<std::uint64_t> N;
  /// Constant L the bound is built from (known_L, or half the effective
  /// Hölder constant 2L).
  std::optional<double> L;
  double R_sq = 0.0;
};

/// Iteration bound for the configured solver: ceil(2 L R^2 / eps) for the
/// exact method, ceil(4 L R^2 / eps) for the inexact one, the Hölder bound
/// when only Hölder constants are known.
TheoreticalBound theoretical_bound(const ExperimentConfig& config, const ProblemInstance& inst);

struct ExperimentRun {
  RunSummary summary;
  SolveResult result;
};

/// Builds the instance, runs the solver, certifies gaps and writes the
/// trace, iterate sidecar and summary files that are configured.
/// `path_suffix` is appended to every output path.
ExperimentRun run_experiment_full(const ExperimentConfig& config, const std::string& path_suffix = "");

RunSummary run_experiment(const ExperimentConfig& config);

/// Runs config.repetitions independent copies in parallel; outputs of
/// repetition i get the suffix ".rep<i>" when there is more than one.
std::vector<RunSummary> run_repetitions(const ExperimentConfig& config);

struct Variant {
  std::string label;
  nlohmann::json overrides;  // merged over the top level of the base config
};

/// Parses "solver[:key=value,key=value]". Values are read as JSON when
/// possible and as strings otherwise.
Variant parse_variant(const std::string& token);

struct ComparisonRow {
  std::string label;
  RunSummary summary;
};

/// Runs every variant on the identical instance (same seeds), in parallel.
/// Output files of variant i get the suffix ".v<i>".
std::vector<ComparisonRow> compare_solvers(const nlohmann::json& base_config,
                                           const std::vector<Variant>& variants,
                                           const std::string& source = "<inline>");

/// CSV table: label,solver,status,N,oracle_calls,prox_calls,max_L,min_L,
/// weighted_gap,saddle_gap,theoretical_N_bound
std::string comparison_table(const std::vector<ComparisonRow>& rows);

}  // namespace mirrorvi
