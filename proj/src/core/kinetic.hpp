#pragma once

#include <array>
#include <cstdint>

namespace lskum {

using Vec4 = std::array<double, 4>;

struct GasModel {
  double gamma = 1.4;
};

// Macroscopic state (rho, u1, u2, p); rho > 0 and p > 0 for a valid state.
struct PrimitiveState {
  double rho = 1.0;
  double u1 = 0.0;
  double u2 = 0.0;
  double p = 1.0;
};

// q-variable representation of the same state.  q3 = -2*beta < 0 with
// beta = rho / (2 p); the transform to/from primitives is a bijection on
// valid states.
struct QState {
  double q0 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = -1.0;
};

// Conserved vector (rho, rho u1, rho u2, rho E).
struct ConservedState {
  double mass = 1.0;
  double mom_x = 0.0;
  double mom_y = 0.0;
  double energy = 2.5;
};

enum class Axis : std::uint8_t { x = 0, y = 1 };
enum class FluxSign : std::uint8_t { plus = 0, minus = 1 };

QState q_from_primitives(const PrimitiveState& s, const GasModel& g);
PrimitiveState primitives_from_q(const QState& q, const GasModel& g);

ConservedState conserved_from_primitives(const PrimitiveState& s, const GasModel& g);
PrimitiveState primitives_from_conserved(const ConservedState& u, const GasModel& g);

// Inviscid flux vector Gx or Gy of the given state.
Vec4 full_flux(const PrimitiveState& s, Axis axis, const GasModel& g);

// Kinetic split flux: the half-range velocity moment of the Maxwellian over
// the upwind (sign) half of molecular-velocity space.  plus + minus
// reconstructs full_flux.
Vec4 kfvs_split_flux(const PrimitiveState& s, Axis axis, FluxSign sign, const GasModel& g);

// Accumulated least-squares sums for one stencil.  bx/by carry
// sum(dx * df) and sum(dy * df) per component.
struct LsSums {
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  Vec4 bx{0.0, 0.0, 0.0, 0.0};
  Vec4 by{0.0, 0.0, 0.0, 0.0};
  int count = 0;

  void add(double dx, double dy, const Vec4& df);
  double determinant() const { return sxx * syy - sxy * sxy; }
};

struct LsGradient {
  Vec4 fx;
  Vec4 fy;
};

// Solves the 2x2 normal equations.  Throws ErrorCode::singular when the
// stencil determinant is at or below det_tol.
LsGradient ls_derivatives(const LsSums& sums, double det_tol);

}  // namespace lskum
