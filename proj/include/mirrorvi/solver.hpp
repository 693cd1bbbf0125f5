#pragma once

// Adaptive Mirror-Prox for variational inequalities.
//
// Each outer iteration halves the previous accepted constant, computes
//   y = prox(g(x), x, L),  x_next = prox(g(y), x, L),
// and doubles L until
//   <g(y) - g(x), y - x_next> <= L V(y, x) + L V(x_next, y) + slack.
// The run stops once S_N = sum 1/L_k reaches R^2/eps (exact oracle,
// slack 0) or 2R^2/eps (inexact oracle, slack eps/2 + delta_u).

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mirrorvi/field.hpp"
#include "mirrorvi/geometry.hpp"

namespace mirrorvi {

struct SolverConfig {
  double epsilon = 1e-3;
  /// Initial constant; nullopt estimates it with estimate_L0(L0_seed).
  std::optional<double> L0;
  std::uint64_t L0_seed = 0;
  std::size_t max_outer = 10'000'000;
  int max_backtracks_per_iter = 60;
  double L_floor = 1e-12;
  /// Keep y, x_next and g(y) of every iteration in the trace.
  bool record_trace = true;
  /// Random probes (besides enumerable vertices) for certificate_lhs_max.
  std::size_t certificate_probes = 100;
  std::uint64_t probe_seed = 20180007;

  void validate() const;
};

struct IterationRecord {
  std::size_t k = 0;
  double L_accepted = 0.0;
  int inner_trials = 0;
  double weight = 0.0;  // exactly 1 / L_accepted
  double S_cumulative = 0.0;
  std::uint64_t oracle_calls_so_far = 0;
  // Empty unless SolverConfig::record_trace.
  Vector y_next;
  Vector x_next;
  Vector g_y;
};

enum class SolveStatus { Converged, MaxOuterReached, BacktrackExhausted };

std::string to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::MaxOuterReached;
  std::size_t N = 0;
  double S_N = 0.0;
  Vector x0;
  Vector x_final;
  /// sum_k w_k y_k / S_N.
  Vector y_tilde;
  std::vector<IterationRecord> trace;
  double R_sq_used = 0.0;
  /// max over x, y in Q of V(x, y); reported next to R_sq_used.
  double R_sq_pairwise = 0.0;
  double L0_used = 0.0;
  /// Slack added to the acceptance criterion (0 for the exact method).
  double slack = 0.0;
  /// max over the probe set of sum_k w_k <g(y_k), y_k - x> - (V(x, x0) - V(x, x_N)).
  double certificate_lhs_max = 0.0;

  // Running aggregates of the field values the method saw; these determine
  // sum_k w_k <g(y_k), y_k - x> = field_dot_sum - <field_sum, x> for all x.
  Vector field_sum;            // sum_k w_k g(y_k)
  double field_dot_sum = 0.0;  // sum_k w_k <g(y_k), y_k>

  std::uint64_t oracle_calls = 0;  // inside the main loop
  std::uint64_t prox_calls = 0;
  std::uint64_t l0_oracle_calls = 0;  // spent by automatic L0 estimation
  double max_accepted_L = 0.0;
  double min_accepted_L = 0.0;
};

/// Step acceptance test
///   <g_y - g_x, y - x_next> <= L V(y, x) + L V(x_next, y) + slack
/// with a 1e-12 relative tolerance on the right side plus a roundoff term
/// 64 u (|g_y|_* + |g_x|_*) |y - x_next|.
bool check_criterion(const ProxSetup& setup, const Vector& g_y, const Vector& g_x,
                     const Vector& y, const Vector& x_next, const Vector& x_anchor,
                     double L, double slack);

/// Adaptive Mirror-Prox with an exact field.
SolveResult adaptive_mirror_prox(const FieldOracle& oracle, const ProxSetup& setup,
                                 const SolverConfig& config);

/// Adaptive Mirror-Prox with an inexact field: slack eps/2 + delta_u and the
/// 2R^2/eps stopping rule. Automatic L0 estimation uses the exact inner field.
SolveResult inexact_adaptive_mirror_prox(const InexactOracle& oracle,
                                         const ProxSetup& setup,
                                         const SolverConfig& config);

/// Non-adaptive Mirror-Prox: N iterations with constant L_fixed, no
/// acceptance test, uniform averaging. Status is Converged once all N
/// iterations have run; no accuracy is claimed.
SolveResult fixed_mirror_prox(const FieldOracle& oracle, const ProxSetup& setup,
                              double L_fixed, std::size_t N,
                              bool record_trace = true);

/// ceil(2 L R^2 / eps), ignoring rounding noise below 1e-9 relative.
std::uint64_t lipschitz_iteration_bound(double L, double R_sq, double epsilon);

struct HolderBound {
  std::uint64_t N;
  /// 2 inf_nu L_nu (2 L_nu / eps)^((1 - nu) / (1 + nu)).
  double two_L_effective;
  double best_nu;
};

/// N = ceil(inf_nu (2 L_nu R^(1+nu) / eps)^(2/(1+nu))) over the supplied
/// entries; entries with an infinite constant are skipped.
HolderBound holder_iteration_bound(const std::vector<HolderParam>& params, double R,
                                   double epsilon);

/// Same, with L_nu given as a function sampled on a uniform grid of nu in
/// [0, 1] (grid_points >= 2).
HolderBound holder_iteration_bound(const std::function<double(double)>& L_of_nu,
                                   double R, double epsilon, int grid_points = 101);

/// Largest violation of the summed certificate
///   sum_k w_k <g(y_k), y_k - x> <= V(x, x0) - V(x, x_N)
/// over the probes, i.e. max of LHS - RHS. Uses the aggregates only.
double certificate_violation(const SolveResult& result, const ProxSetup& setup,
                             const std::vector<Vector>& probes);

/// Largest violation of the per-iteration certificate
///   w_k <g(y_k), y_k - x> <= V(x, x_k) - V(x, x_{k+1})
/// over probes and iterations. Requires a recorded trace.
double per_iteration_violation(const SolveResult& result, const ProxSetup& setup,
                               const std::vector<Vector>& probes);

/// max over the probes of (1/S_N) sum_k w_k <g(y_k), y_k - x>.
double averaged_products_max(const SolveResult& result, const std::vector<Vector>& probes);

}  // namespace mirrorvi
