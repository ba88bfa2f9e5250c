#pragma once

#include <cmath>
#include <random>

#include "core/bench.hpp"
#include "core/cloud.hpp"
#include "core/config.hpp"
#include "core/kinetic.hpp"

namespace testsupport {

// Deterministic uniform doubles from the top 53 bits; identical streams on
// every platform for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : rng_(seed) {}
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
  std::uint64_t bits() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

// Random thermodynamically valid state with Mach number in [0, mach_max].
inline lskum::PrimitiveState random_state(Rng& rng, double mach_max = 3.0,
                                          double gamma = 1.4) {
  const double rho = rng.range(0.2, 3.0);
  const double p = rng.range(0.2, 3.0);
  const double mach = rng.range(0.0, mach_max);
  const double theta = rng.range(0.0, 2.0 * M_PI);
  const double a = std::sqrt(gamma * p / rho);
  return {rho, mach * a * std::cos(theta), mach * a * std::sin(theta), p};
}

inline double rel_err(double got, double want) {
  const double scale = std::max(std::abs(want), 1.0);
  return std::abs(got - want) / scale;
}

// The standard convergence exercise: the free stream of the acceptance
// conditions with a +5% Gaussian density/pressure bump in the middle of
// the unit square (sigma = 0.1).
inline void apply_center_bump(lskum::PointCloud& cloud, double amplitude = 0.05,
                              double sigma = 0.1) {
  lskum::FieldStore& store = cloud.store();
  for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
    const double dx = cloud.x(i) - 0.5;
    const double dy = cloud.y(i) - 0.5;
    const double factor =
        1.0 + amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    store.at(i, lskum::slot::prim + 0) *= factor;
    store.at(i, lskum::slot::prim + 3) *= factor;
  }
}

inline lskum::PointCloud bump_cloud() {
  return lskum::generate_rect_cloud(40, 40, lskum::RectBounds{}, 0.1, 7, 8);
}

inline lskum::SolverConfig bump_config() {
  lskum::SolverConfig cfg;
  cfg.mach = 0.63;
  cfg.aoa_deg = 2.0;
  cfg.iters = 2000;
  cfg.n_inner = 3;
  cfg.cfl = 0.5;
  return cfg;
}

// Free stream + bump, ready to run under the requested layout.
inline void init_bump_problem(lskum::PointCloud& cloud, const lskum::SolverConfig& cfg) {
  cloud.reset_store(cfg.layout);
  lskum::freestream_init(cloud, cfg.mach, cfg.aoa_deg, lskum::GasModel{cfg.gamma});
  apply_center_bump(cloud);
}

}  // namespace testsupport
