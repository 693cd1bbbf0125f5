#pragma once

// Feasible sets, norms, distance-generating functions and prox-mappings.
//
// Points of a product set are stored as one concatenated vector; block i
// occupies the contiguous segment following blocks 0..i-1.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace mirrorvi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

class FeasibleSet;

/// Probability simplex {x >= 0, sum x = 1} in R^n.
struct Simplex {
  Index n;
};

/// Axis-aligned box lower <= x <= upper.
struct Box {
  Vector lower;
  Vector upper;
};

struct EuclideanBall {
  Vector center;
  double radius;
};

struct ProductSet {
  std::vector<FeasibleSet> factors;
};

/// Convex compact set Q. Construct through the static factories, which
/// validate the variant invariants.
class FeasibleSet {
 public:
  using Variant = std::variant<Simplex, Box, EuclideanBall, ProductSet>;

  static FeasibleSet simplex(Index n);
  static FeasibleSet box(Vector lower, Vector upper);
  static FeasibleSet box(Index n, double lower, double upper);
  static FeasibleSet ball(Vector center, double radius);
  static FeasibleSet product(std::vector<FeasibleSet> factors);

  Index dim() const { return dim_; }
  const Variant& variant() const { return value_; }
  bool is_product() const { return std::holds_alternative<ProductSet>(value_); }

  bool contains(const Vector& x, double tol = 1e-9) const;

 private:
  explicit FeasibleSet(Variant value);

  Variant value_;
  Index dim_ = 0;
};

enum class NormKind { L2, L1, ProductL2OfBlockNorms };
enum class DgfKind { SquaredEuclidean, NegativeEntropy, ProductOfSetups };

/// Bregman geometry over a feasible set.
///
/// Leaf setups pair a non-product set with a distance-generating function
/// that is 1-strongly convex w.r.t. the declared norm:
///   - SquaredEuclidean d(x) = ||x||^2 / 2 with the l2 norm, any leaf set;
///   - NegativeEntropy d(x) = sum x_i ln x_i with the l1 norm, simplex only.
/// Product setups combine blocks: d is the sum of block d's and the norm is
/// ||(x_1, ..., x_k)||^2 = sum ||x_i||^2.
///
/// Entropy iterates are kept in the relative interior: after every
/// multiplicative update coordinates are floored at `interior_floor` and the
/// point is renormalized.
class ProxSetup {
 public:
  static constexpr double kDefaultInteriorFloor = 1e-12;

  /// Squared-Euclidean geometry. A product set yields a product of
  /// Euclidean blocks.
  static ProxSetup euclidean(const FeasibleSet& set);
  static ProxSetup entropy(Index n, double interior_floor = kDefaultInteriorFloor);
  static ProxSetup product(std::vector<ProxSetup> blocks);

  const FeasibleSet& set() const { return set_; }
  NormKind norm() const { return norm_; }
  DgfKind dgf() const { return dgf_; }
  double interior_floor() const { return interior_floor_; }
  std::span<const ProxSetup> blocks() const { return blocks_; }
  Index dim() const { return set_.dim(); }

 private:
  ProxSetup(FeasibleSet set, NormKind norm, DgfKind dgf, double floor,
            std::vector<ProxSetup> blocks);

  FeasibleSet set_;
  NormKind norm_;
  DgfKind dgf_;
  double interior_floor_ = 0.0;
  std::vector<ProxSetup> blocks_;
};

/// V(x, y) = d(x) - d(y) - <grad d(y), x - y>.
double bregman(const ProxSetup& setup, const Vector& x, const Vector& y);

double dgf_value(const ProxSetup& setup, const Vector& x);
Vector dgf_gradient(const ProxSetup& setup, const Vector& x);

/// argmin over Q of <g, x - anchor> + L * V(x, anchor). The minimizer is
/// unique (strictly convex objective), so no tie-breaking is involved.
Vector prox_map(const ProxSetup& setup, const Vector& g, const Vector& anchor,
                double L);

/// x0 = argmin over Q of d.
Vector prox_center(const ProxSetup& setup);

/// R^2 = max over Q of V(x, x0). Exact for every supported setup.
double prox_radius_sq(const ProxSetup& setup);

/// max over x, y in Q of V(x, y). Infinite for entropy blocks.
double bregman_diameter_sq(const ProxSetup& setup);

double primal_norm(const ProxSetup& setup, const Vector& v);
double dual_norm(const ProxSetup& setup, const Vector& v);

/// Euclidean projection onto the simplex, sort-and-threshold, O(n log n).
Vector project_simplex(const Vector& v);

/// Euclidean projection onto a feasible set (blockwise for products).
Vector project_euclidean(const FeasibleSet& set, const Vector& v);

struct LinearMax {
  double value;
  Vector argmax;
};

/// Exact maximization of <c, x> over Q: best vertex on a simplex,
/// coordinatewise on a box, radial formula on a ball, blockwise on products.
LinearMax linear_max(const FeasibleSet& set, const Vector& c);

/// Random feasible point. Simplex points are Dirichlet(1) draws and thus
/// strictly interior almost surely.
Vector sample_point(const FeasibleSet& set, std::mt19937_64& rng);

/// All extreme points of a polytope (simplex, box, products of those) when
/// there are at most `limit` of them; nullopt otherwise or for balls.
std::optional<std::vector<Vector>> extreme_points(const FeasibleSet& set,
                                                  std::size_t limit = 4096);

/// Deterministic probe set: every extreme point (when enumerable within
/// `vertex_limit`) followed by `random_count` sampled feasible points.
std::vector<Vector> probe_points(const FeasibleSet& set, std::size_t random_count,
                                 std::uint64_t seed,
                                 std::size_t vertex_limit = 4096);

}  // namespace mirrorvi
