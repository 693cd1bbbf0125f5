#include "mirrorvi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "mirrorvi/errors.hpp"

namespace mirrorvi {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dim(const Vector& v, Index n, const char* what) {
  if (v.size() != n) {
    throw ShapeError(std::string(what) + ": expected dimension " +
                     std::to_string(n) + ", got " + std::to_string(v.size()));
  }
}

// Calls fn(block, offset) for every block of a product setup.
void for_each_block(const ProxSetup& setup,
                    const std::function<void(const ProxSetup&, Index)>& fn) {
  Index offset = 0;
  for (const ProxSetup& block : setup.blocks()) {
    fn(block, offset);
    offset += block.dim();
  }
}

void for_each_factor(const ProductSet& p,
                     const std::function<void(const FeasibleSet&, Index)>& fn) {
  Index offset = 0;
  for (const FeasibleSet& f : p.factors) {
    fn(f, offset);
    offset += f.dim();
  }
}

double entropy_value(const Vector& x) {
  double sum = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0) throw DomainError("entropy: negative coordinate");
    if (x[i] > 0.0) sum += x[i] * std::log(x[i]);
  }
  return sum;
}

// Multiplicative-weights step x_i ~ anchor_i * exp(-g_i / L), computed in
// log space, then floored and renormalized.
Vector entropy_prox(const Vector& g, const Vector& anchor, double L, double floor) {
  const Index n = anchor.size();
  Vector logw(n);
  double top = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    if (anchor[i] < 0.0) throw DomainError("entropy prox: negative anchor coordinate");
    logw[i] = anchor[i] > 0.0 ? std::log(anchor[i]) - g[i] / L
                              : -std::numeric_limits<double>::infinity();
    top = std::max(top, logw[i]);
  }
  if (!std::isfinite(top)) throw DomainError("entropy prox: anchor has no positive mass");
  Vector x = (logw.array() - top).exp().matrix();
  x /= x.sum();
  if (floor > 0.0) {
    x = x.cwiseMax(floor);
    x /= x.sum();
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------- FeasibleSet

FeasibleSet::FeasibleSet(Variant value) : value_(std::move(value)) {
  dim_ = std::visit(Overloaded{
                        [](const Simplex& s) { return s.n; },
                        [](const Box& b) { return b.lower.size(); },
                        [](const EuclideanBall& b) { return b.center.size(); },
                        [](const ProductSet& p) {
                          Index d = 0;
                          for (const auto& f : p.factors) d += f.dim();
                          return d;
                        },
                    },
                    value_);
}

FeasibleSet FeasibleSet::simplex(Index n) {
  if (n < 1) throw InputError("simplex: dimension must be >= 1");
  return FeasibleSet(Simplex{n});
}

FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size() || lower.size() < 1) {
    throw ShapeError("box: lower/upper dimension mismatch");
  }
  if (!lower.allFinite() || !upper.allFinite()) throw InputError("box: bounds must be finite");
  if ((lower.array() > upper.array()).any()) throw InputError("box: lower > upper");
  return FeasibleSet(Box{std::move(lower), std::move(upper)});
}

FeasibleSet FeasibleSet::box(Index n, double lower, double upper) {
  return box(Vector::Constant(n, lower), Vector::Constant(n, upper));
}

FeasibleSet FeasibleSet::ball(Vector center, double radius) {
  if (center.size() < 1) throw ShapeError("ball: empty center");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("ball: radius must be > 0");
  return FeasibleSet(EuclideanBall{std::move(center), radius});
}

FeasibleSet FeasibleSet::product(std::vector<FeasibleSet> factors) {
  if (factors.empty()) throw InputError("product: no factors");
  return FeasibleSet(ProductSet{std::move(factors)});
}

bool FeasibleSet::contains(const Vector& x, double tol) const {
  if (x.size() != dim_ || !x.allFinite()) return false;
  return std::visit(
      Overloaded{
          [&](const Simplex&) {
            return (x.array() >= -tol).all() && std::abs(x.sum() - 1.0) <= tol;
          },
          [&](const Box& b) {
            return (x.array() >= b.lower.array() - tol).all() &&
                   (x.array() <= b.upper.array() + tol).all();
          },
          [&](const EuclideanBall& b) { return (x - b.center).norm() <= b.radius + tol; },
          [&](const ProductSet& p) {
            bool ok = true;
            for_each_factor(p, [&](const FeasibleSet& f, Index off) {
              ok = ok && f.contains(x.segment(off, f.dim()), tol);
            });
            return ok;
          },
      },
      value_);
}

// ----------------------------------------------------------------- ProxSetup

ProxSetup::ProxSetup(FeasibleSet set, NormKind norm, DgfKind dgf, double floor,
                     std::vector<ProxSetup> blocks)
    : set_(std::move(set)),
      norm_(norm),
      dgf_(dgf),
      interior_floor_(floor),
      blocks_(std::move(blocks)) {}

ProxSetup ProxSetup::euclidean(const FeasibleSet& set) {
  if (const auto* p = std::get_if<ProductSet>(&set.variant())) {
    std::vector<ProxSetup> blocks;
    blocks.reserve(p->factors.size());
    for (const auto& f : p->factors) blocks.push_back(euclidean(f));
    return product(std::move(blocks));
  }
  return ProxSetup(set, NormKind::L2, DgfKind::SquaredEuclidean, 0.0, {});
}

ProxSetup ProxSetup::entropy(Index n, double interior_floor) {
  if (!(interior_floor >= 0.0) || interior_floor * static_cast<double>(n) >= 1.0) {
    throw InputError("entropy: interior_floor must be in [0, 1/n)");
  }
  return ProxSetup(FeasibleSet::simplex(n), NormKind::L1, DgfKind::NegativeEntropy,
                   interior_floor, {});
}

ProxSetup ProxSetup::product(std::vector<ProxSetup> blocks) {
  if (blocks.empty()) throw InputError("product setup: no blocks");
  std::vector<FeasibleSet> factors;
  factors.reserve(blocks.size());
  for (const auto& b : blocks) factors.push_back(b.set());
  return ProxSetup(FeasibleSet::product(std::move(factors)),
                   NormKind::ProductL2OfBlockNorms, DgfKind::ProductOfSetups, 0.0,
                   std::move(blocks));
}

// ------------------------------------------------------------ d, grad d, V

double dgf_value(const ProxSetup& setup, const Vector& x) {
  require_dim(x, setup.dim(), "dgf_value");
  switch (setup.dgf()) {
    case DgfKind::SquaredEuclidean:
      return 0.5 * x.squaredNorm();
    case DgfKind::NegativeEntropy:
      return entropy_value(x);
    case DgfKind::ProductOfSetups: {
      double sum = 0.0;
      for_each_block(setup, [&](const ProxSetup& b, Index off) {
        sum += dgf_value(b, x.segment(off, b.dim()));
      });
      return sum;
    }
  }
  return 0.0;
}

Vector dgf_gradient(const ProxSetup& setup, const Vector& x) {
  require_dim(x, setup.dim(), "dgf_gradient");
  switch (setup.dgf()) {
    case DgfKind::SquaredEuclidean:
      return x;
    case DgfKind::NegativeEntropy:
      if ((x.array() <= 0.0).any()) {
        throw DomainError("entropy gradient: non-positive coordinate");
      }
      return (x.array().log() + 1.0).matrix();
    case DgfKind::ProductOfSetups: {
      Vector out(x.size());
      for_each_block(setup, [&](const ProxSetup& b, Index off) {
        out.segment(off, b.dim()) = dgf_gradient(b, x.segment(off, b.dim()));
      });
      return out;
    }
  }
  return x;
}

double bregman(const ProxSetup& setup, const Vector& x, const Vector& y) {
  require_dim(x, setup.dim(), "bregman(x)");
  require_dim(y, setup.dim(), "bregman(y)");
  switch (setup.dgf()) {
    case DgfKind::SquaredEuclidean:
      return 0.5 * (x - y).squaredNorm();
    case DgfKind::NegativeEntropy: {
      // sum x ln(x/y) - x + y, with 0 ln 0 = 0.
      double v = 0.0;
      for (Index i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0.0)) throw DomainError("bregman: entropy needs y > 0");
        if (x[i] < 0.0) throw DomainError("bregman: negative coordinate in x");
        if (x[i] > 0.0) v += x[i] * std::log(x[i] / y[i]);
        v += y[i] - x[i];
      }
      return std::max(v, 0.0);
    }
    case DgfKind::ProductOfSetups: {
      double sum = 0.0;
      for_each_block(setup, [&](const ProxSetup& b, Index off) {
        sum += bregman(b, x.segment(off, b.dim()), y.segment(off, b.dim()));
      });
      return sum;
    }
  }
  return 0.0;
}

// ------------------------------------------------------------- projections

Vector project_simplex(const Vector& v) {
  const Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Index j = 0; j < n; ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

Vector project_euclidean(const FeasibleSet& set, const Vector& v) {
  require_dim(v, set.dim(), "project_euclidean");
  return std::visit(
      Overloaded{
          [&](const Simplex&) { return project_simplex(v); },
          [&](const Box& b) -> Vector { return v.cwiseMax(b.lower).cwiseMin(b.upper); },
          [&](const EuclideanBall& b) -> Vector {
            const Vector d = v - b.center;
            const double r = d.norm();
            if (r <= b.radius) return v;
            return b.center + (b.radius / r) * d;
          },
          [&](const ProductSet& p) {
            Vector out(v.size());
            for_each_factor(p, [&](const FeasibleSet& f, Index off) {
              out.segment(off, f.dim()) = project_euclidean(f, v.segment(off, f.dim()));
            });
            return out;
          },
      },
      set.variant());
}

// --------------------------------------------------------------- prox map

Vector prox_map(const ProxSetup& setup, const Vector& g, const Vector& anchor, double L) {
  require_dim(g, setup.dim(), "prox_map(g)");
  require_dim(anchor, setup.dim(), "prox_map(anchor)");
  if (!g.allFinite()) throw InputError("prox_map: non-finite dual vector");
  if (!(L > 0.0) || !std::isfinite(L)) throw InputError("prox_map: L must be finite and > 0");
  switch (setup.dgf()) {
    case DgfKind::SquaredEuclidean:
      return project_euclidean(setup.set(), anchor - g / L);
    case DgfKind::NegativeEntropy:
      return entropy_prox(g, anchor, L, setup.interior_floor());
    case DgfKind::ProductOfSetups: {
      Vector out(anchor.size());
      for_each_block(setup, [&](const ProxSetup& b, Index off) {
        out.segment(off, b.dim()) =
            prox_map(b, g.segment(off, b.dim()), anchor.segment(off, b.dim()), L);
      });
      return out;
    }
  }
  return anchor;
}

Vector prox_center(const ProxSetup& setup) {
  switch (setup.dgf()) {
    case DgfKind::SquaredEuclidean:
      return project_euclidean(setup.set(), Vector::Zero(setup.dim()));
    case DgfKind::NegativeEntropy:
      return Vector::Constant(setup.dim(), 1.0 / static_cast<double>(setup.dim()));
    case DgfKind::ProductOfSetups: {
      Vector out(setup.dim());
      for_each_block(setup, [&](const ProxSetup& b, Index off) {
        out.segment(off, b.dim()) = prox_center(b);
      });
      return out;
    }
  }
  return Vector();
}

double prox_radius_sq(const ProxSetup& setup) {
  switch (setup.dgf()) {
    case DgfKind::NegativeEntropy:
      // KL(x || uniform) is maximized at a vertex.
      return std::log(static_cast<double>(setup.dim()));
    case DgfKind::SquaredEuclidean: {
      const Vector x0 = prox_center(setup);
      return std::visit(
          Overloaded{
              [&](const Simplex&) {
                // ||e_i - x0||^2 is maximized at the vertex with smallest x0_i.
                return 0.5 * (x0.squaredNorm() - 2.0 * x0.minCoeff() + 1.0);
              },
              [&](const Box& b) {
                return 0.5 * (b.lower - x0).cwiseAbs().cwiseMax((b.upper - x0).cwiseAbs())
                                 .squaredNorm();
              },
              [&](const EuclideanBall& b) {
                const double far = (b.center - x0).norm() + b.radius;
                return 0.5 * far * far;
              },
              [&](const ProductSet&) -> double {
                throw UnsupportedSet("prox_radius_sq: unexpected product leaf");
              },
          },
          setup.set().variant());
    }
    case DgfKind::ProductOfSetups: {
      double sum = 0.0;
      for (const auto& b : setup.blocks()) sum += prox_radius_sq(b);
      return sum;
    }
  }
  return 0.0;
}

double bregman_diameter_sq(const ProxSetup& setup) {
  switch (setup.dgf()) {
    case DgfKind::NegativeEntropy:
      return setup.dim() > 1 ? std::numeric_limits<double>::infinity() : 0.0;
    case DgfKind::SquaredEuclidean:
      return std::visit(
          Overloaded{
              [](const Simplex& s) { return s.n > 1 ? 1.0 : 0.0; },
              [](const Box& b) { return 0.5 * (b.upper - b.lower).squaredNorm(); },
              [](const EuclideanBall& b) { return 2.0 * b.radius * b.radius; },
              [](const ProductSet&) -> double {
                throw UnsupportedSet("bregman_diameter_sq: unexpected product leaf");
              },
          },
          setup.set().variant());
    case DgfKind::ProductOfSetups: {
      double sum = 0.0;
      for (const auto& b : setup.blocks()) sum += bregman_diameter_sq(b);
      return sum;
    }
  }
  return 0.0;
}

// ------------------------------------------------------------------- norms

double primal_norm(const ProxSetup& setup, const Vector& v) {
  require_dim(v, setup.dim(), "primal_norm");
  switch (setup.norm()) {
    case NormKind::L2:
      return v.norm();
    case NormKind::L1:
      return v.lpNorm<1>();
    case NormKind::ProductL2OfBlockNorms: {
      double sq = 0.0;
      for_each_block(setup, [&](const ProxSetup& b, Index off) {
        const double nb = primal_norm(b, v.segment(off, b.dim()));
        sq += nb * nb;
      });
      return std::sqrt(sq);
    }
  }
  return 0.0;
}

double dual_norm(const ProxSetup& setup, const Vector& v) {
  require_dim(v, setup.dim(), "dual_norm");
  switch (setup.norm()) {
    case NormKind::L2:
      return v.norm();
    case NormKind::L1:
      return v.lpNorm<Eigen::Infinity>();
    case NormKind::ProductL2OfBlockNorms: {
      double sq = 0.0;
      for_each_block(setup, [&](const ProxSetup& b, Index off) {
        const double nb = dual_norm(b, v.segment(off, b.dim()));
        sq += nb * nb;
      });
      return std::sqrt(sq);
    }
  }
  return 0.0;
}

// ---------------------------------------------------- linear maximization

LinearMax linear_max(const FeasibleSet& set, const Vector& c) {
  require_dim(c, set.dim(), "linear_max");
  return std::visit(
      Overloaded{
          [&](const Simplex& s) {
            Index best = 0;
            const double value = c.maxCoeff(&best);
            Vector x = Vector::Zero(s.n);
            x[best] = 1.0;
            return LinearMax{value, std::move(x)};
          },
          [&](const Box& b) {
            Vector x(c.size());
            double value = 0.0;
            for (Index i = 0; i < c.size(); ++i) {
              x[i] = c[i] >= 0.0 ? b.upper[i] : b.lower[i];
              value += c[i] * x[i];
            }
            return LinearMax{value, std::move(x)};
          },
          [&](const EuclideanBall& b) {
            const double cn = c.norm();
            Vector x = cn > 0.0 ? Vector(b.center + (b.radius / cn) * c) : b.center;
            return LinearMax{c.dot(b.center) + b.radius * cn, std::move(x)};
          },
          [&](const ProductSet& p) {
            LinearMax out{0.0, Vector(c.size())};
            for_each_factor(p, [&](const FeasibleSet& f, Index off) {
              LinearMax part = linear_max(f, c.segment(off, f.dim()));
              out.value += part.value;
              out.argmax.segment(off, f.dim()) = part.argmax;
            });
            return out;
          },
      },
      set.variant());
}

// ---------------------------------------------------------------- sampling

Vector sample_point(const FeasibleSet& set, std::mt19937_64& rng) {
  return std::visit(
      Overloaded{
          [&](const Simplex& s) {
            std::exponential_distribution<double> expo(1.0);
            Vector x(s.n);
            for (Index i = 0; i < s.n; ++i) x[i] = expo(rng);
            return Vector(x / x.sum());
          },
          [&](const Box& b) {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            Vector x(b.lower.size());
            for (Index i = 0; i < x.size(); ++i) {
              x[i] = b.lower[i] + unif(rng) * (b.upper[i] - b.lower[i]);
            }
            return x;
          },
          [&](const EuclideanBall& b) {
            std::normal_distribution<double> normal(0.0, 1.0);
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            const Index n = b.center.size();
            Vector d(n);
            do {
              for (Index i = 0; i < n; ++i) d[i] = normal(rng);
            } while (d.norm() == 0.0);
            const double r = b.radius * std::pow(unif(rng), 1.0 / static_cast<double>(n));
            return Vector(b.center + (r / d.norm()) * d);
          },
          [&](const ProductSet& p) {
            Vector x(set.dim());
            for_each_factor(p, [&](const FeasibleSet& f, Index off) {
              x.segment(off, f.dim()) = sample_point(f, rng);
            });
            return x;
          },
      },
      set.variant());
}

std::optional<std::vector<Vector>> extreme_points(const FeasibleSet& set,
                                                  std::size_t limit) {
  using Result = std::optional<std::vector<Vector>>;
  return std::visit(
      Overloaded{
          [&](const Simplex& s) -> Result {
            if (static_cast<std::size_t>(s.n) > limit) return std::nullopt;
            std::vector<Vector> out;
            for (Index i = 0; i < s.n; ++i) out.push_back(Vector::Unit(s.n, i));
            return out;
          },
          [&](const Box& b) -> Result {
            const Index n = b.lower.size();
            if (n >= 63 || (std::size_t{1} << n) > limit) return std::nullopt;
            std::vector<Vector> out;
            for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
              Vector v(n);
              for (Index i = 0; i < n; ++i) v[i] = (mask >> i) & 1U ? b.upper[i] : b.lower[i];
              out.push_back(std::move(v));
            }
            return out;
          },
          [](const EuclideanBall&) -> Result { return std::nullopt; },
          [&](const ProductSet& p) -> Result {
            std::vector<Vector> acc{Vector(0)};
            for (const FeasibleSet& f : p.factors) {
              auto pts = extreme_points(f, limit);
              if (!pts || acc.size() * pts->size() > limit) return std::nullopt;
              std::vector<Vector> next;
              next.reserve(acc.size() * pts->size());
              for (const Vector& head : acc) {
                for (const Vector& tail : *pts) {
                  Vector v(head.size() + tail.size());
                  v << head, tail;
                  next.push_back(std::move(v));
                }
              }
              acc = std::move(next);
            }
            return acc;
          },
      },
      set.variant());
}

std::vector<Vector> probe_points(const FeasibleSet& set, std::size_t random_count,
                                 std::uint64_t seed, std::size_t vertex_limit) {
  std::vector<Vector> probes;
  if (auto verts = extreme_points(set, vertex_limit)) probes = std::move(*verts);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < random_count; ++i) probes.push_back(sample_point(set, rng));
  return probes;
}

}  // namespace mirrorvi
