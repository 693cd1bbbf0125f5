// Command-line front end:
//   mirrorvi solve <config>
//   mirrorvi bench <config> --variants adaptive fixed:L_fixed=known ...
//   mirrorvi certify <trace> <config> [--iterates <file>]
//   mirrorvi bound <config>

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mirrorvi/errors.hpp"
#include "mirrorvi/harness.hpp"
#include "mirrorvi/trace_io.hpp"

namespace {

using mirrorvi::SolveStatus;
using nlohmann::json;

int cmd_solve(const std::string& config_path) {
  const mirrorvi::ExperimentConfig cfg = mirrorvi::load_config(config_path);
  const auto summaries = mirrorvi::run_repetitions(cfg);
  bool all_converged = true;
  json out = json::array();
  for (const auto& s : summaries) {
    out.push_back(mirrorvi::to_json(s));
    all_converged = all_converged && s.status == SolveStatus::Converged;
  }
  std::cout << (summaries.size() == 1 ? out[0] : out).dump(2) << '\n';
  return all_converged ? 0 : 1;
}

int cmd_bench(const std::string& config_path, const std::vector<std::string>& tokens) {
  const json base = mirrorvi::load_config_json(config_path);
  std::vector<mirrorvi::Variant> variants;
  for (const auto& t : tokens) variants.push_back(mirrorvi::parse_variant(t));
  const auto rows = mirrorvi::compare_solvers(base, variants, config_path);
  std::cout << mirrorvi::comparison_table(rows);
  for (const auto& row : rows) {
    if (row.summary.status != SolveStatus::Converged) return 1;
  }
  return 0;
}

int cmd_certify(const std::string& trace_path, const std::string& config_path,
                std::string iterates_path) {
  const mirrorvi::ExperimentConfig cfg = mirrorvi::load_config(config_path);
  if (iterates_path.empty()) iterates_path = cfg.iterates_path;
  if (iterates_path.empty()) {
    throw mirrorvi::ConfigError("certify: no iterate sidecar given (--iterates or output.iterates)");
  }
  const mirrorvi::ProblemInstance inst = mirrorvi::build_instance(cfg.instance);
  const auto rows = mirrorvi::read_trace_file(trace_path);
  const auto side = mirrorvi::read_iterates_file(iterates_path);
  const mirrorvi::SolveResult res = mirrorvi::result_from_trace(rows, side, inst.setup);
  const mirrorvi::GapReport gaps = mirrorvi::certify_gap(res, inst);
  const auto probes = mirrorvi::probe_points(inst.setup.set(), cfg.solver_config.certificate_probes,
                                             cfg.solver_config.probe_seed);
  const double eps = cfg.solver_config.epsilon;
  const double target =
      eps + (cfg.solver == mirrorvi::SolverKind::AdaptiveInexact ? cfg.delta_u : 0.0);
  json out;
  out["N"] = res.N;
  out["S_N"] = res.S_N;
  out["weighted_gap"] = gaps.weighted_gap;
  out["weak_gap_at_probes"] = gaps.weak_gap_at_probes;
  out["saddle_gap"] = gaps.saddle_gap ? json(*gaps.saddle_gap) : json(nullptr);
  out["certificate_lhs_max"] = mirrorvi::certificate_violation(res, inst.setup, probes);
  out["target"] = target;
  out["certified"] = gaps.weighted_gap <= target + 1e-9;
  std::cout << out.dump(2) << '\n';
  return out["certified"].get<bool>() ? 0 : 1;
}

int cmd_bound(const std::string& config_path) {
  const mirrorvi::ExperimentConfig cfg = mirrorvi::load_config(config_path);
  const mirrorvi::ProblemInstance inst = mirrorvi::build_instance(cfg.instance);
  const mirrorvi::TheoreticalBound b = mirrorvi::theoretical_bound(cfg, inst);
  json out;
  out["instance"] = inst.name;
  out["solver"] = mirrorvi::to_string(cfg.solver);
  out["epsilon"] = cfg.solver_config.epsilon;
  out["R_sq"] = b.R_sq;
  out["L"] = b.L ? json(*b.L) : json(nullptr);
  out["N_bound"] = b.N ? json(*b.N) : json(nullptr);
  if (!inst.oracle.holder.empty()) {
    json hs = json::array();
    for (const auto& p : inst.oracle.holder) {
      hs.push_back({{"nu", p.nu}, {"L_nu", p.constant}});
    }
    out["holder"] = hs;
    const auto hb = mirrorvi::holder_iteration_bound(inst.oracle.holder, std::sqrt(b.R_sq),
                                                     cfg.solver_config.epsilon);
    out["holder_N"] = hb.N;
    out["two_L_effective"] = hb.two_L_effective;
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive Mirror-Prox solver and benchmark harness for variational inequalities"};
  app.require_subcommand(1);

  std::string config_path;
  std::string trace_path;
  std::string iterates_path;
  std::vector<std::string> variants;

  auto* solve = app.add_subcommand("solve", "Run one experiment and print its summary");
  solve->add_option("config", config_path, "Experiment config (JSON)")->required();

  auto* bench = app.add_subcommand("bench", "Run several solver variants on the same instance");
  bench->add_option("config", config_path, "Experiment config (JSON)")->required();
  bench->add_option("--variants", variants,
                    "Variants as solver[:key=value,...], e.g. adaptive fixed:L_fixed=known")
      ->required()
      ->expected(2, -1);

  auto* certify = app.add_subcommand("certify", "Recompute gap certificates from a stored trace");
  certify->add_option("trace", trace_path, "Trace CSV")->required();
  certify->add_option("config", config_path, "Experiment config (JSON)")->required();
  certify->add_option("--iterates", iterates_path, "Iterate sidecar (defaults to output.iterates)");

  auto* bound = app.add_subcommand("bound", "Print the theoretical iteration bound");
  bound->add_option("config", config_path, "Experiment config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(config_path);
    if (*bench) return cmd_bench(config_path, variants);
    if (*certify) return cmd_certify(trace_path, config_path, iterates_path);
    if (*bound) return cmd_bound(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
