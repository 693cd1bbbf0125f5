#include "mirrorvi/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mirrorvi/errors.hpp"

namespace mirrorvi {
namespace {

using EvalFn = std::function<Vector(const Vector&)>;

constexpr double kCriterionRelTol = 1e-12;
constexpr double kCriterionRoundoff = 64.0 * std::numeric_limits<double>::epsilon();

struct LoopParams {
  double L0;
  double slack;
  double stop_threshold;  // stop once S_N >= this
};

void require_compatible(Index field_dim, const ProxSetup& setup) {
  if (field_dim != setup.dim()) {
    throw ShapeError("solver: field dimension " + std::to_string(field_dim) +
                     " does not match setup dimension " + std::to_string(setup.dim()));
  }
}

class RunState {
 public:
  RunState(const ProxSetup& setup, const SolverConfig& config, double slack)
      : setup_(setup), config_(config) {
    result_.x0 = prox_center(setup);
    result_.x_final = result_.x0;
    result_.field_sum = Vector::Zero(setup.dim());
    result_.R_sq_used = prox_radius_sq(setup);
    result_.R_sq_pairwise = bregman_diameter_sq(setup);
    result_.slack = slack;
    y_sum_ = Vector::Zero(setup.dim());
  }

  SolveResult& result() { return result_; }

  void accept(double L, int trials, const Vector& y, const Vector& x_next, const Vector& g_y) {
    const double w = 1.0 / L;
    result_.S_N += w;
    y_sum_ += w * y;
    result_.field_sum += w * g_y;
    result_.field_dot_sum += w * g_y.dot(y);
    if (result_.N == 0) {
      result_.max_accepted_L = result_.min_accepted_L = L;
    } else {
      result_.max_accepted_L = std::max(result_.max_accepted_L, L);
      result_.min_accepted_L = std::min(result_.min_accepted_L, L);
    }
    IterationRecord rec;
    rec.k = result_.N;
    rec.L_accepted = L;
    rec.inner_trials = trials;
    rec.weight = w;
    rec.S_cumulative = result_.S_N;
    rec.oracle_calls_so_far = result_.oracle_calls;
    if (config_.record_trace) {
      rec.y_next = y;
      rec.x_next = x_next;
      rec.g_y = g_y;
    }
    result_.trace.push_back(std::move(rec));
    result_.x_final = x_next;
    ++result_.N;
  }

  SolveResult finish(SolveStatus status) {
    result_.status = status;
    result_.y_tilde = result_.N > 0 ? Vector(y_sum_ / result_.S_N) : result_.x0;
    const auto probes =
        probe_points(setup_.set(), config_.certificate_probes, config_.probe_seed);
    result_.certificate_lhs_max = certificate_violation(result_, setup_, probes);
    return std::move(result_);
  }

 private:
  const ProxSetup& setup_;
  const SolverConfig& config_;
  SolveResult result_;
  Vector y_sum_;
};

SolveResult run_adaptive(const EvalFn& eval, const ProxSetup& setup,
                         const SolverConfig& config, const LoopParams& params) {
  RunState state(setup, config, params.slack);
  SolveResult& res = state.result();
  res.L0_used = params.L0;

  auto g = [&](const Vector& p) {
    ++res.oracle_calls;
    return eval(p);
  };
  auto prox = [&](const Vector& dir, const Vector& anchor, double L) {
    ++res.prox_calls;
    return prox_map(setup, dir, anchor, L);
  };

  Vector x = res.x0;
  double L_prev = params.L0;
  while (res.N < config.max_outer) {
    double L = std::max(L_prev / 2.0, config.L_floor);
    // x is fixed within the iteration, so g(x) is shared by all trials.
    const Vector g_x = g(x);
    int trials = 0;
    for (;;) {
      ++trials;
      Vector y = prox(g_x, x, L);
      Vector g_y = g(y);
      Vector x_next = prox(g_y, x, L);
      if (check_criterion(setup, g_y, g_x, y, x_next, x, L, params.slack)) {
        state.accept(L, trials, y, x_next, g_y);
        x = std::move(x_next);
        break;
      }
      if (trials >= config.max_backtracks_per_iter) {
        return state.finish(SolveStatus::BacktrackExhausted);
      }
      L *= 2.0;
    }
    L_prev = L;
    if (res.S_N >= params.stop_threshold) return state.finish(SolveStatus::Converged);
  }
  return state.finish(SolveStatus::MaxOuterReached);
}

std::uint64_t guarded_ceil(double v) {
  if (!std::isfinite(v) || v < 0.0) throw InputError("iteration bound: non-finite or negative value");
  const double r = std::round(v);
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v))) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(v));
}

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:
      return "Converged";
    case SolveStatus::MaxOuterReached:
      return "MaxOuterReached";
    case SolveStatus::BacktrackExhausted:
      return "BacktrackExhausted";
  }
  return "Unknown";
}

void SolverConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InputError("SolverConfig: epsilon must be > 0");
  if (L0 && (!(*L0 > 0.0) || !std::isfinite(*L0))) throw InputError("SolverConfig: L0 must be > 0");
  if (max_outer < 1) throw InputError("SolverConfig: max_outer must be >= 1");
  if (max_backtracks_per_iter < 1) throw InputError("SolverConfig: max_backtracks_per_iter must be >= 1");
  if (!(L_floor > 0.0)) throw InputError("SolverConfig: L_floor must be > 0");
}

bool check_criterion(const ProxSetup& setup, const Vector& g_y, const Vector& g_x,
                     const Vector& y, const Vector& x_next, const Vector& x_anchor,
                     double L, double slack) {
  const double lhs = (g_y - g_x).dot(y - x_next);
  const double rhs = L * bregman(setup, y, x_anchor) + L * bregman(setup, x_next, y) + slack;
  // Rounding in g_y - g_x is not covered by a tolerance relative to rhs once
  // the steps shrink to roundoff size.
  const double rounding = kCriterionRoundoff * (dual_norm(setup, g_y) + dual_norm(setup, g_x)) *
                          primal_norm(setup, y - x_next);
  return lhs <= rhs + kCriterionRelTol * std::abs(rhs) + rounding;
}

SolveResult adaptive_mirror_prox(const FieldOracle& oracle, const ProxSetup& setup,
                                 const SolverConfig& config) {
  config.validate();
  require_compatible(oracle.dim(), setup);
  double L0 = 0.0;
  std::uint64_t l0_calls = 0;
  if (config.L0) {
    L0 = *config.L0;
  } else {
    const L0Estimate est = estimate_L0(oracle, setup, config.L0_seed);
    L0 = est.value;
    l0_calls = est.oracle_calls;
  }
  const double R_sq = prox_radius_sq(setup);
  SolveResult res = run_adaptive([&](const Vector& p) { return oracle.eval(p); }, setup, config,
                                 {L0, 0.0, R_sq / config.epsilon});
  res.l0_oracle_calls = l0_calls;
  return res;
}

SolveResult inexact_adaptive_mirror_prox(const InexactOracle& oracle, const ProxSetup& setup,
                                         const SolverConfig& config) {
  config.validate();
  require_compatible(oracle.dim(), setup);
  double L0 = 0.0;
  std::uint64_t l0_calls = 0;
  if (config.L0) {
    L0 = *config.L0;
  } else {
    const L0Estimate est = estimate_L0(oracle.inner(), setup, config.L0_seed);
    L0 = est.value;
    l0_calls = est.oracle_calls;
  }
  const double R_sq = prox_radius_sq(setup);
  const double slack = config.epsilon / 2.0 + oracle.delta_u();
  SolveResult res = run_adaptive([&](const Vector& p) { return oracle.eval(p); }, setup, config,
                                 {L0, slack, 2.0 * R_sq / config.epsilon});
  res.l0_oracle_calls = l0_calls;
  return res;
}

SolveResult fixed_mirror_prox(const FieldOracle& oracle, const ProxSetup& setup, double L_fixed,
                              std::size_t N, bool record_trace) {
  require_compatible(oracle.dim(), setup);
  if (!(L_fixed > 0.0) || !std::isfinite(L_fixed)) throw InputError("fixed_mirror_prox: L_fixed must be > 0");
  SolverConfig config;
  config.record_trace = record_trace;
  RunState state(setup, config, 0.0);
  SolveResult& res = state.result();
  res.L0_used = L_fixed;
  Vector x = res.x0;
  for (std::size_t k = 0; k < N; ++k) {
    ++res.oracle_calls;
    const Vector g_x = oracle.eval(x);
    ++res.prox_calls;
    Vector y = prox_map(setup, g_x, x, L_fixed);
    ++res.oracle_calls;
    Vector g_y = oracle.eval(y);
    ++res.prox_calls;
    Vector x_next = prox_map(setup, g_y, x, L_fixed);
    state.accept(L_fixed, 1, y, x_next, g_y);
    x = std::move(x_next);
  }
  return state.finish(SolveStatus::Converged);
}

std::uint64_t lipschitz_iteration_bound(double L, double R_sq, double epsilon) {
  if (!(L > 0.0) || !(R_sq >= 0.0) || !(epsilon > 0.0)) {
    throw InputError("lipschitz_iteration_bound: arguments must be positive");
  }
  return guarded_ceil(2.0 * L * R_sq / epsilon);
}

HolderBound holder_iteration_bound(const std::vector<HolderParam>& params, double R,
                                   double epsilon) {
  if (!(R >= 0.0) || !(epsilon > 0.0)) throw InputError("holder_iteration_bound: R >= 0 and eps > 0 required");
  bool any = false;
  double best_N = std::numeric_limits<double>::infinity();
  double best_L = std::numeric_limits<double>::infinity();
  double best_nu = 0.0;
  for (const HolderParam& p : params) {
    if (!(p.nu >= 0.0 && p.nu <= 1.0)) throw InputError("holder_iteration_bound: nu must lie in [0, 1]");
    if (!std::isfinite(p.constant)) continue;
    if (!(p.constant > 0.0)) throw InputError("holder_iteration_bound: L_nu must be > 0");
    any = true;
    const double n_nu = std::pow(2.0 * p.constant * std::pow(R, 1.0 + p.nu) / epsilon,
                                 2.0 / (1.0 + p.nu));
    const double l_nu =
        p.constant * std::pow(2.0 * p.constant / epsilon, (1.0 - p.nu) / (1.0 + p.nu));
    if (n_nu < best_N) {
      best_N = n_nu;
      best_nu = p.nu;
    }
    best_L = std::min(best_L, l_nu);
  }
  if (!any) throw InputError("holder_iteration_bound: every L_nu is infinite");
  return {guarded_ceil(best_N), 2.0 * best_L, best_nu};
}

HolderBound holder_iteration_bound(const std::function<double(double)>& L_of_nu, double R,
                                   double epsilon, int grid_points) {
  if (grid_points < 2) throw InputError("holder_iteration_bound: grid_points must be >= 2");
  std::vector<HolderParam> params;
  params.reserve(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i) {
    const double nu = static_cast<double>(i) / static_cast<double>(grid_points - 1);
    params.push_back({nu, L_of_nu(nu)});
  }
  return holder_iteration_bound(params, R, epsilon);
}

double certificate_violation(const SolveResult& result, const ProxSetup& setup,
                             const std::vector<Vector>& probes) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const Vector& x : probes) {
    const double lhs = result.field_dot_sum - result.field_sum.dot(x);
    const double rhs = bregman(setup, x, result.x0) - bregman(setup, x, result.x_final);
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

double per_iteration_violation(const SolveResult& result, const ProxSetup& setup,
                               const std::vector<Vector>& probes) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const Vector& x : probes) {
    Vector x_k = result.x0;
    double v_prev = bregman(setup, x, x_k);
    for (const IterationRecord& rec : result.trace) {
      if (rec.y_next.size() == 0) throw InputError("per_iteration_violation: trace has no iterates");
      const double lhs = rec.weight * rec.g_y.dot(rec.y_next - x);
      const double v_next = bregman(setup, x, rec.x_next);
      worst = std::max(worst, lhs - (v_prev - v_next));
      v_prev = v_next;
    }
  }
  return worst;
}

double averaged_products_max(const SolveResult& result, const std::vector<Vector>& probes) {
  if (!(result.S_N > 0.0)) throw InputError("averaged_products_max: empty run");
  double best = -std::numeric_limits<double>::infinity();
  for (const Vector& x : probes) {
    best = std::max(best, (result.field_dot_sum - result.field_sum.dot(x)) / result.S_N);
  }
  return best;
}

}  // namespace mirrorvi
