#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "core/bench.hpp"
#include "core/cloud.hpp"
#include "core/error.hpp"
#include "core/kernels.hpp"
#include "core/kinetic.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace lskum;
using testsupport::rel_err;

namespace {

std::vector<std::int32_t> all_ids(const PointCloud& cloud) {
  std::vector<std::int32_t> ids(cloud.n_points());
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

// q_variables plus n_inner derivative sweeps on the whole cloud, mirroring
// the beginning of one solver iteration.
void prime_fields(PointCloud& cloud, const KernelParams& params, int n_inner) {
  const auto ids = all_ids(cloud);
  FieldStore& store = cloud.store();
  q_variables_kernel(cloud, store, ids, params);
  std::vector<double> scratch(static_cast<std::size_t>(cloud.n_points()) * 8);
  for (int sweep = 0; sweep < n_inner; ++sweep) {
    q_derivatives_kernel(cloud, store, ids, params, scratch.data());
    publish_q_derivatives(store, ids, scratch.data());
  }
}

KernelParams params_for(const PointCloud& cloud, double gamma = 1.4,
                        double cfl = 0.5) {
  const ValidationReport report = validate_cloud(cloud);
  REQUIRE(report.clean());
  return KernelParams{GasModel{gamma}, cfl, report.det_tol};
}

// A four-point cloud with one well-surrounded target point, for single-point
// kernel checks.  Every point lists the other three as neighbours.
PointCloud tiny_cloud(PointKind kind0 = PointKind::interior, double nx = 0.0,
                      double ny = 0.0) {
  std::vector<PointRecord> recs(4);
  const double xs[4] = {0.0, 0.01, 0.0, 0.03};
  const double ys[4] = {0.0, 0.0, 0.02, 0.03};
  for (std::int32_t i = 0; i < 4; ++i) {
    recs[i].id = i;
    recs[i].x = xs[i];
    recs[i].y = ys[i];
    for (std::int32_t j = 0; j < 4; ++j) {
      if (j != i) recs[i].nbhs.push_back(j);
    }
  }
  recs[0].kind = kind0;
  recs[0].nx = nx;
  recs[0].ny = ny;
  return PointCloud(std::move(recs));
}

void set_prim(FieldStore& store, std::int32_t i, const PrimitiveState& s) {
  store.at(i, slot::prim + 0) = s.rho;
  store.at(i, slot::prim + 1) = s.u1;
  store.at(i, slot::prim + 2) = s.u2;
  store.at(i, slot::prim + 3) = s.p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Independent transcription oracle: the full second-order residual spelled
// out from scratch (transform, defect correction, split fluxes, least
// squares), sharing no helper code with the library.  Agreement with the
// kernel pins down every sign and ordering choice in the production path.
namespace oracle {

std::array<double, 4> state_of_q(const std::array<double, 4>& q, double g) {
  const double beta = -0.5 * q[3];
  const double u1 = q[1] / (2.0 * beta);
  const double u2 = q[2] / (2.0 * beta);
  const double lnrho = q[0] - std::log(beta) / (g - 1.0) + beta * (u1 * u1 + u2 * u2);
  const double rho = std::exp(lnrho);
  return {rho, u1, u2, rho / (2.0 * beta)};
}

std::array<double, 4> half_flux(const std::array<double, 4>& s, int axis, int sgn,
                                double g) {
  const double rho = s[0], u1 = s[1], u2 = s[2], p = s[3];
  const double beta = rho / (2.0 * p);
  const double un = (axis == 0) ? u1 : u2;
  const double ut = (axis == 0) ? u2 : u1;
  const double sn = un * std::sqrt(beta);
  const double A = 0.5 * (1.0 + sgn * std::erf(sn));
  const double B = sgn * std::exp(-sn * sn) / (2.0 * std::sqrt(M_PI * beta));
  const double rhoE = p / (g - 1.0) + 0.5 * rho * (u1 * u1 + u2 * u2);
  const double mass = rho * (un * A + B);
  const double momn = (p + rho * un * un) * A + rho * un * B;
  const double momt = rho * ut * (un * A + B);
  const double erg = (rhoE + p) * un * A + (rhoE + 0.5 * p) * B;
  if (axis == 0) return {mass, momn, momt, erg};
  return {mass, momt, momn, erg};
}

std::array<double, 4> corrected_q(const FieldStore& store, std::int32_t i,
                                  double dx, double dy) {
  std::array<double, 4> q;
  for (int c = 0; c < 4; ++c) {
    q[c] = store.at(i, slot::q + c) - 0.5 * (dx * store.at(i, slot::qx + c) +
                                             dy * store.at(i, slot::qy + c));
  }
  return q;
}

std::array<double, 4> residual_at(const PointCloud& cloud, const FieldStore& store,
                                  std::int32_t i, double g) {
  std::array<double, 4> res{0.0, 0.0, 0.0, 0.0};
  for (int axis : {0, 1}) {
    for (int sgn : {+1, -1}) {
      double sxx = 0.0, sxy = 0.0, syy = 0.0;
      double bx[4] = {0, 0, 0, 0}, by[4] = {0, 0, 0, 0};
      for (std::int32_t nb : cloud.nbhs(i)) {
        const double dx = cloud.x(nb) - cloud.x(i);
        const double dy = cloud.y(nb) - cloud.y(i);
        const double d = (axis == 0) ? dx : dy;
        // The plus flux transports from below, so its derivative is built
        // from the d <= 0 half of the stencil (and vice versa).
        if (sgn > 0 ? d > 0.0 : d < 0.0) continue;
        const auto si = state_of_q(corrected_q(store, i, dx, dy), g);
        const auto sn = state_of_q(corrected_q(store, nb, dx, dy), g);
        const auto gi = half_flux(si, axis, sgn, g);
        const auto gn = half_flux(sn, axis, sgn, g);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
        for (int c = 0; c < 4; ++c) {
          bx[c] += dx * (gn[c] - gi[c]);
          by[c] += dy * (gn[c] - gi[c]);
        }
      }
      const double det = sxx * syy - sxy * sxy;
      for (int c = 0; c < 4; ++c) {
        const double deriv = (axis == 0) ? (syy * bx[c] - sxy * by[c]) / det
                                         : (sxx * by[c] - sxy * bx[c]) / det;
        res[c] += deriv;
      }
    }
  }
  return res;
}

}  // namespace oracle

TEST_CASE("uniform free stream yields exactly zero residual and zero derivatives") {
  PointCloud cloud = generate_rect_cloud(20, 20, RectBounds{}, 0.1, 11, 8);
  cloud.reset_store(Layout::aos);
  const KernelParams params = params_for(cloud);
  freestream_init(cloud, 0.63, 2.0, params.gas);
  prime_fields(cloud, params, 3);

  FieldStore& store = cloud.store();
  for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
    for (int c = 0; c < 4; ++c) {
      CHECK(store.at(i, slot::qx + c) == 0.0);
      CHECK(store.at(i, slot::qy + c) == 0.0);
    }
  }
  flux_residual_fused_kernel(cloud, store, all_ids(cloud), params);
  for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
    for (int c = 0; c < 4; ++c) {
      CHECK(store.at(i, slot::flux_res + c) == 0.0);
    }
  }

  // The update leaves the stream untouched and the mass norm at zero.
  local_timestep_kernel(cloud, store, all_ids(cloud), params);
  state_update_kernel(cloud, store, all_ids(cloud), params);
  for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
    CHECK(mass_update_magnitude(store, i) == 0.0);
  }
}

TEST_CASE("fused and split4 residuals agree bitwise") {
  PointCloud cloud = generate_rect_cloud(16, 16, RectBounds{}, 0.08, 5, 8);
  const auto ids = all_ids(cloud);

  auto compare_modes = [&](const KernelParams& params) {
    FieldStore& store = cloud.store();
    flux_residual_fused_kernel(cloud, store, ids, params);
    std::vector<double> fused;
    for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
      for (int c = 0; c < 4; ++c) fused.push_back(store.at(i, slot::flux_res + c));
    }
    flux_residual_direction_kernel(cloud, store, ids, params, Axis::x, FluxSign::plus, true);
    flux_residual_direction_kernel(cloud, store, ids, params, Axis::x, FluxSign::minus, false);
    flux_residual_direction_kernel(cloud, store, ids, params, Axis::y, FluxSign::plus, false);
    flux_residual_direction_kernel(cloud, store, ids, params, Axis::y, FluxSign::minus, false);
    std::size_t k = 0;
    bool identical = true;
    for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
      for (int c = 0; c < 4; ++c) {
        identical = identical && (store.at(i, slot::flux_res + c) == fused[k++]);
      }
    }
    CHECK(identical);
  };

  SUBCASE("independent random states, first order") {
    cloud.reset_store(Layout::aos);
    const KernelParams params = params_for(cloud);
    testsupport::Rng rng(31);
    for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
      set_prim(cloud.store(), i, testsupport::random_state(rng, 1.5));
    }
    q_variables_kernel(cloud, cloud.store(), ids, params);
    compare_modes(params);
  }

  SUBCASE("smooth field, second order") {
    const SolverConfig cfg = testsupport::bump_config();
    testsupport::init_bump_problem(cloud, cfg);
    const KernelParams params = params_for(cloud);
    prime_fields(cloud, params, 3);
    compare_modes(params);
  }
}

TEST_CASE("residual matches an independent from-scratch evaluation") {
  PointCloud cloud = testsupport::bump_cloud();
  const SolverConfig cfg = testsupport::bump_config();
  testsupport::init_bump_problem(cloud, cfg);
  const KernelParams params = params_for(cloud);
  prime_fields(cloud, params, 3);
  FieldStore& store = cloud.store();
  flux_residual_fused_kernel(cloud, store, all_ids(cloud), params);

  int checked = 0;
  for (std::int32_t i = 0; i < cloud.n_points(); i += 97) {
    if (cloud.kind(i) != PointKind::interior) continue;
    const auto want = oracle::residual_at(cloud, store, i, params.gas.gamma);
    double scale = 1.0;
    for (int c = 0; c < 4; ++c) scale = std::max(scale, std::abs(want[c]));
    for (int c = 0; c < 4; ++c) {
      CHECK(std::abs(store.at(i, slot::flux_res + c) - want[c]) <= 1e-12 * scale);
    }
    ++checked;
  }
  CHECK(checked >= 10);

  // Also at a point inside the bump where the residual is clearly nonzero.
  std::int32_t center = 0;
  double best = 1e30;
  for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
    const double d2 = (cloud.x(i) - 0.5) * (cloud.x(i) - 0.5) +
                      (cloud.y(i) - 0.5) * (cloud.y(i) - 0.5);
    if (d2 < best) best = d2, center = i;
  }
  const auto want = oracle::residual_at(cloud, store, center, params.gas.gamma);
  double mag = 0.0;
  for (int c = 0; c < 4; ++c) mag = std::max(mag, std::abs(want[c]));
  CHECK(mag > 1e-4);
  for (int c = 0; c < 4; ++c) {
    CHECK(std::abs(store.at(center, slot::flux_res + c) - want[c]) <=
          1e-12 * std::max(1.0, mag));
  }
}

TEST_CASE("derivative sweep reproduces linear fields exactly") {
  PointCloud cloud = generate_rect_cloud(12, 12, RectBounds{}, 0.2, 3, 8);
  cloud.reset_store(Layout::aos);
  const KernelParams params = params_for(cloud);
  FieldStore& store = cloud.store();

  const double a[4] = {0.7, -0.3, 0.1, -1.2};
  const double b[4] = {0.4, 1.1, -0.8, 0.25};
  const double c[4] = {-0.6, 0.2, 0.9, -0.45};
  for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
    for (int k = 0; k < 4; ++k) {
      store.at(i, slot::q + k) = a[k] + b[k] * cloud.x(i) + c[k] * cloud.y(i);
    }
  }

  const auto ids = all_ids(cloud);
  std::vector<double> scratch(static_cast<std::size_t>(cloud.n_points()) * 8);
  q_derivatives_kernel(cloud, store, ids, params, scratch.data());
  publish_q_derivatives(store, ids, scratch.data());
  for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
    for (int k = 0; k < 4; ++k) {
      CHECK(rel_err(store.at(i, slot::qx + k), b[k]) < 1e-12);
      CHECK(rel_err(store.at(i, slot::qy + k), c[k]) < 1e-12);
    }
  }

  // Exact derivatives are a fixed point of the sweep.
  q_derivatives_kernel(cloud, store, ids, params, scratch.data());
  publish_q_derivatives(store, ids, scratch.data());
  for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
    for (int k = 0; k < 4; ++k) {
      CHECK(rel_err(store.at(i, slot::qx + k), b[k]) < 1e-12);
      CHECK(rel_err(store.at(i, slot::qy + k), c[k]) < 1e-12);
    }
  }
}

TEST_CASE("defect correction makes quadratics a fixed point of the sweep") {
  PointCloud cloud = generate_rect_cloud(12, 12, RectBounds{}, 0.15, 9, 8);
  cloud.reset_store(Layout::aos);
  const KernelParams params = params_for(cloud);
  FieldStore& store = cloud.store();

  for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
    const double x = cloud.x(i), y = cloud.y(i);
    store.at(i, slot::q + 0) = x * x;
    store.at(i, slot::q + 1) = x * y;
    store.at(i, slot::q + 2) = y * y;
    store.at(i, slot::q + 3) = x * x - y * y + 0.5 * x;
    const double dqx[4] = {2 * x, y, 0.0, 2 * x + 0.5};
    const double dqy[4] = {0.0, x, 2 * y, -2 * y};
    for (int k = 0; k < 4; ++k) {
      store.at(i, slot::qx + k) = dqx[k];
      store.at(i, slot::qy + k) = dqy[k];
    }
  }

  const auto ids = all_ids(cloud);
  std::vector<double> scratch(static_cast<std::size_t>(cloud.n_points()) * 8);
  q_derivatives_kernel(cloud, store, ids, params, scratch.data());
  publish_q_derivatives(store, ids, scratch.data());
  for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
    const double x = cloud.x(i), y = cloud.y(i);
    const double dqx[4] = {2 * x, y, 0.0, 2 * x + 0.5};
    const double dqy[4] = {0.0, x, 2 * y, -2 * y};
    for (int k = 0; k < 4; ++k) {
      CHECK(std::abs(store.at(i, slot::qx + k) - dqx[k]) < 1e-10);
      CHECK(std::abs(store.at(i, slot::qy + k) - dqy[k]) < 1e-10);
    }
  }
}

TEST_CASE("local timestep follows CFL over the nearest neighbour distance") {
  PointCloud cloud = tiny_cloud();
  cloud.reset_store(Layout::aos);
  FieldStore& store = cloud.store();
  for (std::int32_t i = 0; i < 4; ++i) {
    set_prim(store, i, PrimitiveState{1.0, 0.0, 0.0, 1.0});
  }
  KernelParams params;
  params.cfl = 0.5;
  const auto ids = all_ids(cloud);
  local_timestep_kernel(cloud, store, ids, params);

  // Point 0: nearest neighbour at distance 0.01, |u| = 0, a = sqrt(1.4).
  const double want = 0.5 * 0.01 / std::sqrt(1.4);
  CHECK(rel_err(store.at(0, slot::delta_t), want) < 1e-14);
  CHECK(store.at(0, slot::delta_t) == doctest::Approx(0.00422577127364).epsilon(1e-10));

  // Doubling the CFL number doubles every timestep.
  std::vector<double> half(4);
  for (std::int32_t i = 0; i < 4; ++i) half[i] = store.at(i, slot::delta_t);
  params.cfl = 1.0;
  local_timestep_kernel(cloud, store, ids, params);
  for (std::int32_t i = 0; i < 4; ++i) {
    CHECK(store.at(i, slot::delta_t) == 2.0 * half[i]);
  }

  // A moving state shortens the step: divisor |u| + a.
  set_prim(store, 0, PrimitiveState{1.0, 0.6, -0.8, 1.0});
  params.cfl = 0.5;
  local_timestep_kernel(cloud, store, ids, params);
  CHECK(rel_err(store.at(0, slot::delta_t), 0.5 * 0.01 / (1.0 + std::sqrt(1.4))) < 1e-14);
}

TEST_CASE("far-field points never advance") {
  PointCloud cloud = tiny_cloud(PointKind::outer, 1.0, 0.0);
  cloud.reset_store(Layout::aos);
  FieldStore& store = cloud.store();
  for (std::int32_t i = 0; i < 4; ++i) {
    set_prim(store, i, PrimitiveState{1.0, 0.1, 0.2, 1.0});
  }
  KernelParams params;
  const auto ids = all_ids(cloud);
  // Garbage in the residual slot of the outer point must be ignored.
  store.at(0, slot::flux_res + 0) = 99.0;
  local_timestep_kernel(cloud, store, ids, params);
  CHECK(store.at(0, slot::delta_t) == 0.0);
  CHECK(store.at(1, slot::delta_t) > 0.0);
  state_update_kernel(cloud, store, ids, params);
  CHECK(store.at(0, slot::prim + 0) == 1.0);
  CHECK(store.at(0, slot::prim + 1) == 0.1);
  CHECK(store.at(0, slot::prim + 3) == 1.0);
}

TEST_CASE("state update applies the forward-Euler conserved step") {
  PointCloud cloud = tiny_cloud();
  cloud.reset_store(Layout::aos);
  FieldStore& store = cloud.store();
  KernelParams params;
  const auto ids = all_ids(cloud);
  for (std::int32_t i = 0; i < 4; ++i) {
    set_prim(store, i, PrimitiveState{1.0, 0.0, 0.0, 1.0});
  }

  SUBCASE("zero residual is a fixed point") {
    state_update_kernel(cloud, store, ids, params);
    for (std::int32_t i = 0; i < 4; ++i) {
      CHECK(store.at(i, slot::prim + 0) == 1.0);
      CHECK(store.at(i, slot::prim + 1) == 0.0);
      CHECK(store.at(i, slot::prim + 2) == 0.0);
      CHECK(store.at(i, slot::prim + 3) == 1.0);
    }
  }

  SUBCASE("momentum residual shifts velocity and drains pressure") {
    // U = (1, 0, 0, 2.5), res = (0, 1, 0, 0), dt = 0.1:
    // U' = (1, -0.1, 0, 2.5) so u1 = -0.1 and p = 0.4*(2.5 - 0.005) = 0.998.
    store.at(0, slot::flux_res + 1) = 1.0;
    store.at(0, slot::delta_t) = 0.1;
    state_update_kernel(cloud, store, ids, params);
    CHECK(store.at(0, slot::prim + 0) == 1.0);
    CHECK(store.at(0, slot::prim + 1) == -0.1);
    CHECK(store.at(0, slot::prim + 3) == doctest::Approx(0.998).epsilon(1e-12));
  }

  SUBCASE("energy blow-up raises a positivity error naming the point") {
    store.at(0, slot::flux_res + 3) = 100.0;
    store.at(0, slot::delta_t) = 0.1;
    try {
      state_update_kernel(cloud, store, ids, params);
      FAIL("expected a positivity error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::positivity);
      CHECK(std::string(e.what()).find("point 0") != std::string::npos);
    }
  }
}

TEST_CASE("wall points keep only the tangential velocity") {
  PointCloud cloud = tiny_cloud(PointKind::wall, 0.0, 1.0);
  cloud.reset_store(Layout::aos);
  FieldStore& store = cloud.store();
  set_prim(store, 0, PrimitiveState{1.0, 0.3, 0.2, 1.0});
  for (std::int32_t i = 1; i < 4; ++i) {
    set_prim(store, i, PrimitiveState{1.0, 0.0, 0.0, 1.0});
  }
  KernelParams params;
  state_update_kernel(cloud, store, all_ids(cloud), params);
  CHECK(store.at(0, slot::prim + 1) == 0.3);
  CHECK(store.at(0, slot::prim + 2) == 0.0);
  CHECK(store.at(0, slot::prim + 3) == doctest::Approx(1.0).epsilon(1e-13));

  // An oblique normal removes exactly the normal component.
  PointCloud oblique = tiny_cloud(PointKind::wall, std::sqrt(0.5), std::sqrt(0.5));
  oblique.reset_store(Layout::aos);
  set_prim(oblique.store(), 0, PrimitiveState{1.0, 0.4, 0.0, 1.0});
  for (std::int32_t i = 1; i < 4; ++i) {
    set_prim(oblique.store(), i, PrimitiveState{1.0, 0.0, 0.0, 1.0});
  }
  state_update_kernel(oblique, oblique.store(), all_ids(oblique), params);
  const double u1 = oblique.store().at(0, slot::prim + 1);
  const double u2 = oblique.store().at(0, slot::prim + 2);
  CHECK(rel_err(u1, 0.2) < 1e-13);
  CHECK(rel_err(u2, -0.2) < 1e-13);
  CHECK(std::abs(u1 * std::sqrt(0.5) + u2 * std::sqrt(0.5)) < 1e-15);
}

TEST_CASE("second-order correction changes the residual on a curved field") {
  PointCloud cloud = testsupport::bump_cloud();
  const SolverConfig cfg = testsupport::bump_config();
  const auto ids = all_ids(cloud);

  testsupport::init_bump_problem(cloud, cfg);
  const KernelParams params = params_for(cloud);
  q_variables_kernel(cloud, cloud.store(), ids, params);
  flux_residual_fused_kernel(cloud, cloud.store(), ids, params);
  std::vector<double> first_order;
  for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
    first_order.push_back(cloud.store().at(i, slot::flux_res + 0));
  }

  testsupport::init_bump_problem(cloud, cfg);
  prime_fields(cloud, params, 3);
  flux_residual_fused_kernel(cloud, cloud.store(), ids, params);
  double max_diff = 0.0;
  for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
    max_diff = std::max(max_diff,
                        std::abs(cloud.store().at(i, slot::flux_res + 0) - first_order[i]));
  }
  CHECK(max_diff > 1e-8);
}

TEST_CASE("reconstruction failures name the offending edge") {
  PointCloud cloud = generate_rect_cloud(8, 8, RectBounds{}, 0.0, 1, 8);
  cloud.reset_store(Layout::aos);
  const KernelParams params = params_for(cloud);
  FieldStore& store = cloud.store();
  freestream_init(cloud, 0.63, 2.0, params.gas);
  const auto ids = all_ids(cloud);
  q_variables_kernel(cloud, store, ids, params);
  // A huge derivative drives the corrected q3 positive, which no valid
  // state can produce.
  store.at(27, slot::qx + 3) = 1e6;
  try {
    flux_residual_fused_kernel(cloud, store, ids, params);
    FAIL("expected a reconstruction error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::positivity);
    CHECK(std::string(e.what()).find("edge") != std::string::npos);
    CHECK(std::string(e.what()).find("27") != std::string::npos);
  }
}
