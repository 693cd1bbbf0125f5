#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "mirrorvi/geometry.hpp"

namespace mirrorvi {

/// Hölder continuity ||g(x) - g(y)||_* <= constant * ||x - y||^nu.
/// An infinite constant means the field is not nu-Hölder.
struct HolderParam {
  double nu;
  double constant;
};

/// VI field g: Q -> R^n with smoothness metadata.
///
/// The oracle is immutable after construction apart from a call counter.
/// Copies share the counter, so the harness can observe the total number of
/// evaluations made through any copy. The counter is atomic; solvers also
/// keep their own per-run counts.
class FieldOracle {
 public:
  using Map = std::function<Vector(const Vector&)>;

  FieldOracle(Index dim, Map map);

  Index dim() const { return dim_; }

  /// g(x). Throws OracleFault when the result is non-finite.
  Vector eval(const Vector& x) const;

  std::uint64_t calls() const { return calls_->load(std::memory_order_relaxed); }
  void reset_calls() const { calls_->store(0, std::memory_order_relaxed); }

  bool monotone = false;
  std::optional<double> lipschitz;
  std::vector<HolderParam> holder;

 private:
  Index dim_;
  Map map_;
  std::shared_ptr<std::atomic<std::uint64_t>> calls_;
};

enum class NoiseModel { AdditiveBoundedDual };

/// Field with bounded additive noise: g~(x) = g(x) + eta(x) where
/// ||eta(x)||_* <= delta_u in the dual norm of `setup`.
///
/// eta is a deterministic function of (noise_seed, x): a seeded Gaussian
/// direction normalized to unit dual norm and scaled by delta_u * u with
/// u ~ Uniform[0, 1]. The noise model has no controllable part, so
/// `delta_c` is carried as metadata only.
class InexactOracle {
 public:
  InexactOracle(FieldOracle inner, ProxSetup setup, double delta_u,
                std::uint64_t noise_seed, double delta_c = 0.0);

  const FieldOracle& inner() const { return inner_; }
  const ProxSetup& setup() const { return setup_; }
  Index dim() const { return inner_.dim(); }
  double delta_u() const { return delta_u_; }
  double delta_c() const { return delta_c_; }
  std::uint64_t noise_seed() const { return noise_seed_; }
  NoiseModel noise_model() const { return NoiseModel::AdditiveBoundedDual; }

  Vector eval(const Vector& x) const;
  Vector noise(const Vector& x) const;

 private:
  FieldOracle inner_;
  ProxSetup setup_;
  double delta_u_;
  std::uint64_t noise_seed_;
  double delta_c_;
};

struct L0Estimate {
  double value;
  std::uint64_t oracle_calls;
};

/// Secant-slope estimate of the Lipschitz constant: the maximum over
/// `pairs` seeded feasible pairs of ||g(x) - g(y)||_* / ||x - y||.
/// Never exceeds the true Lipschitz constant.
/// Throws EstimationFailed when g(x) == g(y) on every pair.
L0Estimate estimate_L0(const FieldOracle& oracle, const ProxSetup& setup,
                       std::uint64_t seed, int pairs = 8);

}  // namespace mirrorvi
