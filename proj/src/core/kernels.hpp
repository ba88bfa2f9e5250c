#pragma once

#include <cstdint>
#include <span>

#include "core/cloud.hpp"
#include "core/kinetic.hpp"
#include "core/layout.hpp"

namespace lskum {

enum class ResidualMode { fused = 0, split4 = 1 };

struct KernelParams {
  GasModel gas;
  double cfl = 0.5;
  double det_tol = 0.0;
};

// Each kernel walks a caller-supplied id list so the same code serves the
// serial path and per-partition workers. Boundary handling is internal:
// far-field (outer) points keep zero residual and timestep and are never
// advanced, which realises the frozen free-stream condition.

void q_variables_kernel(const PointCloud& cloud, FieldStore& store,
                        std::span<const std::int32_t> ids,
                        const KernelParams& params);

// One Jacobi sweep of the implicit defect-corrected derivative system.
// Reads the published qx/qy generation from the store and writes the next
// generation to `scratch` (8 doubles per point, indexed by point id);
// publish_q_derivatives copies it back once every partition has finished.
void q_derivatives_kernel(const PointCloud& cloud, const FieldStore& store,
                          std::span<const std::int32_t> ids,
                          const KernelParams& params, double* scratch);

void publish_q_derivatives(FieldStore& store, std::span<const std::int32_t> ids,
                           const double* scratch);

void flux_residual_fused_kernel(const PointCloud& cloud, FieldStore& store,
                                std::span<const std::int32_t> ids,
                                const KernelParams& params);

// One of the four directional passes of the split residual. `first` zeroes
// the accumulator slot so that the pass sequence reproduces the fused loop
// bit for bit: both start from 0.0 and add the directional terms in the
// fixed order Gx+, Gx-, Gy+, Gy-.
void flux_residual_direction_kernel(const PointCloud& cloud, FieldStore& store,
                                    std::span<const std::int32_t> ids,
                                    const KernelParams& params, Axis axis,
                                    FluxSign sign, bool first);

void local_timestep_kernel(const PointCloud& cloud, FieldStore& store,
                           std::span<const std::int32_t> ids,
                           const KernelParams& params);

void state_update_kernel(const PointCloud& cloud, FieldStore& store,
                         std::span<const std::int32_t> ids,
                         const KernelParams& params);

// Mass-equation update magnitude dt_i * res_i[0]; the convergence norm is
// the RMS of these over all points.
double mass_update_magnitude(const FieldStore& store, std::int32_t i);

}  // namespace lskum
