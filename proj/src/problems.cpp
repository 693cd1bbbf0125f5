#include "mirrorvi/problems.hpp"

#include <cmath>
#include <random>
#include <variant>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mirrorvi/errors.hpp"

namespace mirrorvi {

ProblemInstance make_bilinear_saddle(Matrix A, std::uint64_t seed) {
  const Index m = A.rows();
  const Index n = A.cols();
  if (m < 1 || n < 1) throw InputError("make_bilinear_saddle: m, n must be >= 1");
  if (!A.allFinite()) throw InputError("make_bilinear_saddle: non-finite matrix entry");
  const double known_L = A.cwiseAbs().maxCoeff();
  FieldOracle oracle(m + n, [A, m, n](const Vector& z) {
    Vector g(m + n);
    g.head(m) = A * z.tail(n);
    g.tail(n) = -A.transpose() * z.head(m);
    return g;
  });
  oracle.monotone = true;
  if (known_L > 0.0) {
    oracle.lipschitz = known_L;
    oracle.holder = {{1.0, known_L}};
  }
  ProblemInstance inst{
      "bilinear_" + std::to_string(m) + "x" + std::to_string(n),
      std::move(oracle),
      ProxSetup::product({ProxSetup::entropy(m), ProxSetup::entropy(n)}),
      known_L > 0.0 ? std::optional<double>(known_L) : std::nullopt,
      std::nullopt,
      seed,
      BilinearData{std::move(A)},
  };
  return inst;
}

ProblemInstance make_bilinear_saddle(Index m, Index n, double entry_scale, std::uint64_t seed) {
  if (m < 1 || n < 1) throw InputError("make_bilinear_saddle: m, n must be >= 1");
  if (!(entry_scale >= 0.0)) throw InputError("make_bilinear_saddle: entry_scale must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-entry_scale, entry_scale);
  Matrix A(m, n);
  // Row-major fill so the matrix for a given seed does not depend on storage order.
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) A(i, j) = entry_scale > 0.0 ? unif(rng) : 0.0;
  }
  return make_bilinear_saddle(std::move(A), seed);
}

ProblemInstance make_affine_vi(const Matrix& M, const Vector& b, const ProxSetup& setup) {
  const Index n = setup.dim();
  if (M.rows() != n || M.cols() != n || b.size() != n) {
    throw ShapeError("make_affine_vi: M must be n x n and b of length n, n = " + std::to_string(n));
  }
  double known_L = 0.0;
  switch (setup.norm()) {
    case NormKind::L2:
      known_L = Eigen::JacobiSVD<Matrix>(M).singularValues()(0);
      break;
    case NormKind::L1:
      known_L = M.cwiseAbs().maxCoeff();
      break;
    case NormKind::ProductL2OfBlockNorms:
      throw UnsupportedSet("make_affine_vi: operator norm for product geometries is not implemented");
  }
  const Matrix sym = M + M.transpose();
  const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(sym).eigenvalues().minCoeff();
  FieldOracle oracle(n, [M, b](const Vector& x) { return Vector(M * x + b); });
  oracle.monotone = min_eig >= -1e-12 * std::max(1.0, sym.norm());
  if (known_L > 0.0) {
    oracle.lipschitz = known_L;
    oracle.holder = {{1.0, known_L}};
  }
  ProblemInstance inst{"affine_" + std::to_string(n), std::move(oracle), setup,
                       known_L > 0.0 ? std::optional<double>(known_L) : std::nullopt,
                       std::nullopt, 0, std::nullopt};
  return inst;
}

ProblemInstance make_affine_vi(const Matrix& M, const Vector& b, const FeasibleSet& set) {
  return make_affine_vi(M, b, ProxSetup::euclidean(set));
}

namespace {

Vector interior_point(const FeasibleSet& set) {
  return std::visit(
      [&](const auto& s) -> Vector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Simplex>) {
          return Vector::Constant(s.n, 1.0 / static_cast<double>(s.n));
        } else if constexpr (std::is_same_v<T, Box>) {
          return 0.5 * (s.lower + s.upper);
        } else if constexpr (std::is_same_v<T, EuclideanBall>) {
          return s.center;
        } else {
          Vector out(set.dim());
          Index off = 0;
          for (const auto& f : s.factors) {
            out.segment(off, f.dim()) = interior_point(f);
            off += f.dim();
          }
          return out;
        }
      },
      set.variant());
}

}  // namespace

ProblemInstance make_holder_field(Index n, double nu, const FeasibleSet& set,
                                  std::optional<Vector> center) {
  if (!(nu >= 0.0 && nu <= 1.0)) throw InputError("make_holder_field: nu must lie in [0, 1]");
  if (set.dim() != n) throw ShapeError("make_holder_field: set dimension differs from n");
  Vector c = center ? *center : interior_point(set);
  if (c.size() != n) throw ShapeError("make_holder_field: center dimension differs from n");
  FieldOracle oracle(n, [c, nu](const Vector& x) {
    Vector g(x.size());
    for (Index i = 0; i < x.size(); ++i) {
      const double t = x[i] - c[i];
      g[i] = t == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(t), nu), t);
    }
    return g;
  });
  const double L_nu = std::pow(2.0, 1.0 - nu) * std::pow(static_cast<double>(n), (1.0 - nu) / 2.0);
  oracle.monotone = true;
  oracle.holder = {{nu, L_nu}};
  std::optional<double> known_L;
  if (nu == 1.0) {
    known_L = 1.0;
    oracle.lipschitz = 1.0;
  }
  std::optional<Vector> solution;
  if (set.contains(c, 0.0)) solution = c;
  ProblemInstance inst{"holder_" + std::to_string(n), std::move(oracle), ProxSetup::euclidean(set),
                       known_L, std::move(solution), 0, std::nullopt};
  return inst;
}

Vector weighted_average(const std::vector<IterationRecord>& trace) {
  if (trace.empty()) throw InputError("weighted_average: empty trace");
  const Index n = trace.front().y_next.size();
  if (n == 0) throw InputError("weighted_average: trace has no iterates");
  Vector sum = Vector::Zero(n);
  double total = 0.0;
  for (const IterationRecord& rec : trace) {
    if (rec.y_next.size() != n) throw ShapeError("weighted_average: inconsistent iterate sizes");
    sum += rec.weight * rec.y_next;
    total += rec.weight;
  }
  return sum / total;
}

double saddle_gap(const Matrix& A, const Vector& x, const Vector& y) {
  if (x.size() != A.rows() || y.size() != A.cols()) throw ShapeError("saddle_gap: shape mismatch");
  return (A.transpose() * x).maxCoeff() - (A * y).minCoeff();
}

GapReport certify_gap(const SolveResult& result, const ProblemInstance& instance,
                      std::size_t random_probes, std::uint64_t probe_seed) {
  const FeasibleSet& set = instance.setup.set();
  if (result.field_sum.size() != set.dim() || result.y_tilde.size() != set.dim()) {
    throw ShapeError("certify_gap: result does not belong to this instance");
  }
  if (!(result.S_N > 0.0)) throw InputError("certify_gap: run has no accepted iterations");
  GapReport report;
  // max_x [a - <c, x>] / S = [a + max_x <-c, x>] / S.
  const LinearMax lm = linear_max(set, -result.field_sum);
  report.weighted_gap = (result.field_dot_sum + lm.value) / result.S_N;

  double weak = -std::numeric_limits<double>::infinity();
  for (const Vector& x : probe_points(set, random_probes, probe_seed)) {
    weak = std::max(weak, instance.oracle.eval(x).dot(result.y_tilde - x));
  }
  report.weak_gap_at_probes = weak;

  if (instance.bilinear) {
    const Matrix& A = instance.bilinear->A;
    report.saddle_gap =
        saddle_gap(A, result.y_tilde.head(A.rows()), result.y_tilde.tail(A.cols()));
  }
  return report;
}

}  // namespace mirrorvi
