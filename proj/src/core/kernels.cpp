#include "core/kernels.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "core/error.hpp"

namespace lskum {

namespace {

QState load_q(const FieldStore& store, std::int32_t i) {
  return {store.at(i, slot::q + 0), store.at(i, slot::q + 1),
          store.at(i, slot::q + 2), store.at(i, slot::q + 3)};
}

// Defect-corrected q at point i, shifted to the midpoint of the (i, nb)
// pair: q~ = q - (dx*qx + dy*qy)/2 with the point's own derivatives.
QState corrected_q(const FieldStore& store, std::int32_t i, double dx, double dy) {
  QState q = load_q(store, i);
  q.q0 -= 0.5 * (dx * store.at(i, slot::qx + 0) + dy * store.at(i, slot::qy + 0));
  q.q1 -= 0.5 * (dx * store.at(i, slot::qx + 1) + dy * store.at(i, slot::qy + 1));
  q.q2 -= 0.5 * (dx * store.at(i, slot::qx + 2) + dy * store.at(i, slot::qy + 2));
  q.q3 -= 0.5 * (dx * store.at(i, slot::qx + 3) + dy * store.at(i, slot::qy + 3));
  return q;
}

// Upwind sub-stencil for one split flux: the positive flux carries
// information from upstream, so Gx+ differentiates over dx <= 0 and Gx-
// over dx >= 0 (likewise in y). Zero offsets land in both half stencils.
bool upwind_side(Axis axis, FluxSign sign, double dx, double dy) {
  const double d = (axis == Axis::x) ? dx : dy;
  return (sign == FluxSign::plus) ? d <= 0.0 : d >= 0.0;
}

Vec4 directional_term(const PointCloud& cloud, const FieldStore& store,
                      std::int32_t i, Axis axis, FluxSign sign,
                      const KernelParams& params) {
  LsSums sums;
  for (std::int32_t nb : cloud.nbhs(i)) {
    const double dx = cloud.x(nb) - cloud.x(i);
    const double dy = cloud.y(nb) - cloud.y(i);
    if (!upwind_side(axis, sign, dx, dy)) continue;
    PrimitiveState si, sn;
    try {
      si = primitives_from_q(corrected_q(store, i, dx, dy), params.gas);
      sn = primitives_from_q(corrected_q(store, nb, dx, dy), params.gas);
    } catch (const Error& e) {
      throw Error(ErrorCode::positivity,
                  "flux reconstruction failed on edge (" + std::to_string(i) + ", " +
                      std::to_string(nb) + "): " + e.what());
    }
    const Vec4 gi = kfvs_split_flux(si, axis, sign, params.gas);
    const Vec4 gn = kfvs_split_flux(sn, axis, sign, params.gas);
    sums.add(dx, dy, {gn[0] - gi[0], gn[1] - gi[1], gn[2] - gi[2], gn[3] - gi[3]});
  }
  try {
    const LsGradient grad = ls_derivatives(sums, params.det_tol);
    return (axis == Axis::x) ? grad.fx : grad.fy;
  } catch (const Error& e) {
    throw Error(e.code(), "split stencil of point " + std::to_string(i) + ": " + e.what());
  }
}

}  // namespace

void q_variables_kernel(const PointCloud& cloud, FieldStore& store,
                        std::span<const std::int32_t> ids,
                        const KernelParams& params) {
  for (std::int32_t i : ids) {
    const PrimitiveState s{store.at(i, slot::prim + 0), store.at(i, slot::prim + 1),
                           store.at(i, slot::prim + 2), store.at(i, slot::prim + 3)};
    const QState q = q_from_primitives(s, params.gas);
    store.at(i, slot::q + 0) = q.q0;
    store.at(i, slot::q + 1) = q.q1;
    store.at(i, slot::q + 2) = q.q2;
    store.at(i, slot::q + 3) = q.q3;
  }
}

void q_derivatives_kernel(const PointCloud& cloud, const FieldStore& store,
                          std::span<const std::int32_t> ids,
                          const KernelParams& params, double* scratch) {
  for (std::int32_t i : ids) {
    LsSums sums;
    for (std::int32_t nb : cloud.nbhs(i)) {
      const double dx = cloud.x(nb) - cloud.x(i);
      const double dy = cloud.y(nb) - cloud.y(i);
      const QState qi = corrected_q(store, i, dx, dy);
      const QState qn = corrected_q(store, nb, dx, dy);
      sums.add(dx, dy, {qn.q0 - qi.q0, qn.q1 - qi.q1, qn.q2 - qi.q2, qn.q3 - qi.q3});
    }
    LsGradient grad;
    try {
      grad = ls_derivatives(sums, params.det_tol);
    } catch (const Error& e) {
      throw Error(e.code(), "full stencil of point " + std::to_string(i) + ": " + e.what());
    }
    double* out = scratch + static_cast<std::size_t>(i) * 8;
    for (int c = 0; c < 4; ++c) {
      out[c] = grad.fx[c];
      out[4 + c] = grad.fy[c];
    }
  }
}

void publish_q_derivatives(FieldStore& store, std::span<const std::int32_t> ids,
                           const double* scratch) {
  for (std::int32_t i : ids) {
    const double* in = scratch + static_cast<std::size_t>(i) * 8;
    for (int c = 0; c < 4; ++c) {
      store.at(i, slot::qx + c) = in[c];
      store.at(i, slot::qy + c) = in[4 + c];
    }
  }
}

void flux_residual_fused_kernel(const PointCloud& cloud, FieldStore& store,
                                std::span<const std::int32_t> ids,
                                const KernelParams& params) {
  for (std::int32_t i : ids) {
    if (cloud.kind(i) == PointKind::outer) continue;
    for (int c = 0; c < 4; ++c) {
      store.at(i, slot::flux_res + c) = 0.0;
    }
    static constexpr std::pair<Axis, FluxSign> order[4] = {
        {Axis::x, FluxSign::plus},
        {Axis::x, FluxSign::minus},
        {Axis::y, FluxSign::plus},
        {Axis::y, FluxSign::minus},
    };
    for (const auto& [axis, sign] : order) {
      const Vec4 term = directional_term(cloud, store, i, axis, sign, params);
      for (int c = 0; c < 4; ++c) {
        store.at(i, slot::flux_res + c) += term[c];
      }
    }
  }
}

void flux_residual_direction_kernel(const PointCloud& cloud, FieldStore& store,
                                    std::span<const std::int32_t> ids,
                                    const KernelParams& params, Axis axis,
                                    FluxSign sign, bool first) {
  for (std::int32_t i : ids) {
    if (cloud.kind(i) == PointKind::outer) continue;
    if (first) {
      for (int c = 0; c < 4; ++c) {
        store.at(i, slot::flux_res + c) = 0.0;
      }
    }
    const Vec4 term = directional_term(cloud, store, i, axis, sign, params);
    for (int c = 0; c < 4; ++c) {
      store.at(i, slot::flux_res + c) += term[c];
    }
  }
}

void local_timestep_kernel(const PointCloud& cloud, FieldStore& store,
                           std::span<const std::int32_t> ids,
                           const KernelParams& params) {
  for (std::int32_t i : ids) {
    if (cloud.kind(i) == PointKind::outer) {
      store.at(i, slot::delta_t) = 0.0;
      continue;
    }
    double min_d = std::numeric_limits<double>::infinity();
    for (std::int32_t nb : cloud.nbhs(i)) {
      const double dx = cloud.x(nb) - cloud.x(i);
      const double dy = cloud.y(nb) - cloud.y(i);
      min_d = std::min(min_d, std::sqrt(dx * dx + dy * dy));
    }
    const double rho = store.at(i, slot::prim + 0);
    const double u1 = store.at(i, slot::prim + 1);
    const double u2 = store.at(i, slot::prim + 2);
    const double p = store.at(i, slot::prim + 3);
    const double speed = std::sqrt(u1 * u1 + u2 * u2);
    const double sound = std::sqrt(params.gas.gamma * p / rho);
    store.at(i, slot::delta_t) = params.cfl * min_d / (speed + sound);
  }
}

void state_update_kernel(const PointCloud& cloud, FieldStore& store,
                         std::span<const std::int32_t> ids,
                         const KernelParams& params) {
  for (std::int32_t i : ids) {
    const PointKind kind = cloud.kind(i);
    if (kind == PointKind::outer) continue;

    const PrimitiveState old_s{store.at(i, slot::prim + 0), store.at(i, slot::prim + 1),
                               store.at(i, slot::prim + 2), store.at(i, slot::prim + 3)};
    ConservedState u = conserved_from_primitives(old_s, params.gas);
    const double dt = store.at(i, slot::delta_t);
    u.mass -= dt * store.at(i, slot::flux_res + 0);
    u.mom_x -= dt * store.at(i, slot::flux_res + 1);
    u.mom_y -= dt * store.at(i, slot::flux_res + 2);
    u.energy -= dt * store.at(i, slot::flux_res + 3);

    PrimitiveState s;
    try {
      s = primitives_from_conserved(u, params.gas);
    } catch (const Error& e) {
      throw Error(ErrorCode::positivity,
                  "state update lost positivity at point " + std::to_string(i) + ": " +
                      e.what());
    }
    if (kind == PointKind::wall) {
      // Slip condition: remove the normal velocity component.
      const double un = s.u1 * cloud.normal_x(i) + s.u2 * cloud.normal_y(i);
      s.u1 -= un * cloud.normal_x(i);
      s.u2 -= un * cloud.normal_y(i);
    }
    store.at(i, slot::prim + 0) = s.rho;
    store.at(i, slot::prim + 1) = s.u1;
    store.at(i, slot::prim + 2) = s.u2;
    store.at(i, slot::prim + 3) = s.p;
  }
}

double mass_update_magnitude(const FieldStore& store, std::int32_t i) {
  return store.at(i, slot::delta_t) * store.at(i, slot::flux_res + 0);
}

}  // namespace lskum
