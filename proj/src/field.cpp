#include "mirrorvi/field.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <string>

#include "mirrorvi/errors.hpp"

namespace mirrorvi {
namespace {

// FNV-1a over the bit patterns of seed and x, so the noise depends on the
// exact point and not on its printed representation.
std::uint64_t hash_point(std::uint64_t seed, const Vector& x) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t word) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (word >> (8 * byte)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(seed);
  for (Index i = 0; i < x.size(); ++i) {
    // Fold -0.0 onto +0.0.
    mix(std::bit_cast<std::uint64_t>(x[i] == 0.0 ? 0.0 : x[i]));
  }
  return h;
}

}  // namespace

FieldOracle::FieldOracle(Index dim, Map map)
    : dim_(dim), map_(std::move(map)), calls_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  if (dim < 1) throw InputError("FieldOracle: dimension must be >= 1");
  if (!map_) throw InputError("FieldOracle: empty map");
}

Vector FieldOracle::eval(const Vector& x) const {
  if (x.size() != dim_) {
    throw ShapeError("FieldOracle::eval: expected dimension " + std::to_string(dim_) +
                     ", got " + std::to_string(x.size()));
  }
  calls_->fetch_add(1, std::memory_order_relaxed);
  Vector g = map_(x);
  if (g.size() != dim_) throw ShapeError("FieldOracle::eval: field returned wrong dimension");
  if (!g.allFinite()) throw OracleFault("FieldOracle::eval: non-finite field value", x);
  return g;
}

InexactOracle::InexactOracle(FieldOracle inner, ProxSetup setup, double delta_u,
                             std::uint64_t noise_seed, double delta_c)
    : inner_(std::move(inner)),
      setup_(std::move(setup)),
      delta_u_(delta_u),
      noise_seed_(noise_seed),
      delta_c_(delta_c) {
  if (inner_.dim() != setup_.dim()) throw ShapeError("InexactOracle: field/setup dimension mismatch");
  if (!(delta_u >= 0.0) || !std::isfinite(delta_u)) throw InputError("InexactOracle: delta_u must be >= 0");
  if (!(delta_c >= 0.0)) throw InputError("InexactOracle: delta_c must be >= 0");
}

Vector InexactOracle::noise(const Vector& x) const {
  if (delta_u_ == 0.0) return Vector::Zero(x.size());
  std::mt19937_64 rng(hash_point(noise_seed_, x));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector dir(x.size());
  double scale = 0.0;
  do {
    for (Index i = 0; i < dir.size(); ++i) dir[i] = normal(rng);
    scale = dual_norm(setup_, dir);
  } while (scale == 0.0);
  const double magnitude = delta_u_ * unif(rng);
  return dir * (magnitude / scale);
}

Vector InexactOracle::eval(const Vector& x) const {
  Vector g = inner_.eval(x);
  if (delta_u_ > 0.0) g += noise(x);
  return g;
}

L0Estimate estimate_L0(const FieldOracle& oracle, const ProxSetup& setup,
                       std::uint64_t seed, int pairs) {
  if (oracle.dim() != setup.dim()) throw ShapeError("estimate_L0: field/setup dimension mismatch");
  if (pairs < 1) throw InputError("estimate_L0: need at least one pair");
  std::mt19937_64 rng(seed);
  double best = 0.0;
  std::uint64_t calls = 0;
  for (int p = 0; p < pairs; ++p) {
    const Vector x = sample_point(setup.set(), rng);
    const Vector y = sample_point(setup.set(), rng);
    const double dist = primal_norm(setup, x - y);
    if (dist == 0.0) continue;
    const Vector diff = oracle.eval(x) - oracle.eval(y);
    calls += 2;
    const double num = dual_norm(setup, diff);
    if (num > 0.0) best = std::max(best, num / dist);
  }
  if (!(best > 0.0)) {
    throw EstimationFailed(
        "estimate_L0: g(x) == g(y) on every sampled pair; supply L0 explicitly");
  }
  return {best, calls};
}

}  // namespace mirrorvi
