#pragma once

// Benchmark VI instances and gap evaluators.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mirrorvi/field.hpp"
#include "mirrorvi/geometry.hpp"
#include "mirrorvi/solver.hpp"

namespace mirrorvi {

/// Payoff matrix of a bilinear saddle-point instance min_x max_y x^T A y.
struct BilinearData {
  Matrix A;
};

struct ProblemInstance {
  std::string name;
  FieldOracle oracle;
  ProxSetup setup;
  std::optional<double> known_L;
  std::optional<Vector> known_solution;
  std::uint64_t rng_seed = 0;
  std::optional<BilinearData> bilinear;
};

/// Matrix game on Simplex(m) x Simplex(n) with entropy blocks and
/// g(x, y) = (A y, -A^T x). known_L = max |A_ij| for the block norm
/// ||(x, y)||^2 = ||x||_1^2 + ||y||_1^2; unset for A = 0.
ProblemInstance make_bilinear_saddle(Matrix A, std::uint64_t seed = 0);

/// Same with A_ij ~ Uniform[-entry_scale, entry_scale] drawn from `seed`.
ProblemInstance make_bilinear_saddle(Index m, Index n, double entry_scale, std::uint64_t seed);

/// g(x) = M x + b over `setup`. known_L is the operator norm of M for the
/// setup's norm pair: largest singular value for l2, max |M_ij| for l1.
/// `monotone` is set iff M + M^T is positive semidefinite.
ProblemInstance make_affine_vi(const Matrix& M, const Vector& b, const ProxSetup& setup);

/// Euclidean setup over `set`.
ProblemInstance make_affine_vi(const Matrix& M, const Vector& b, const FeasibleSet& set);

/// Separable Hölder field g(x)_i = sign(x_i - c_i) |x_i - c_i|^nu with
/// Euclidean geometry. With the l2 norm its Hölder constant is
/// 2^(1-nu) n^((1-nu)/2): the scalar map t -> sign(t)|t|^nu has constant
/// 2^(1-nu) and summing n coordinates costs n^((1-nu)/2).
/// The default center is an interior point of the set (box midpoint, ball
/// center, simplex barycenter); it solves the VI when interior.
ProblemInstance make_holder_field(Index n, double nu, const FeasibleSet& set,
                                  std::optional<Vector> center = std::nullopt);

/// sum_k w_k y_k / sum_k w_k over a recorded trace.
Vector weighted_average(const std::vector<IterationRecord>& trace);

struct GapReport {
  /// max over Q of (1/S_N) sum_k w_k <g(y_k), y_k - x>, computed exactly.
  double weighted_gap = 0.0;
  /// max over the probe set of <g(x), y_tilde - x>; a lower bound on the
  /// weak-VI merit of y_tilde.
  double weak_gap_at_probes = 0.0;
  /// max_j (A^T x~)_j - min_i (A y~)_i, bilinear instances only.
  std::optional<double> saddle_gap;
};

/// Gap certificates of a finished run. The weighted gap uses the field
/// values recorded by the solver (noisy ones for the inexact method); the
/// weak gap evaluates the instance's exact field at the probes.
GapReport certify_gap(const SolveResult& result, const ProblemInstance& instance,
                      std::size_t random_probes = 100, std::uint64_t probe_seed = 20180011);

/// Duality gap of a strategy pair for the matrix game A.
double saddle_gap(const Matrix& A, const Vector& x, const Vector& y);

}  // namespace mirrorvi
