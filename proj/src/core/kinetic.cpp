#include "core/kinetic.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace lskum {

namespace {

void require_valid(const PrimitiveState& s) {
  if (!(s.rho > 0.0) || !(s.p > 0.0)) {
    throw Error(ErrorCode::positivity,
                "invalid primitive state: rho=" + std::to_string(s.rho) +
                    " p=" + std::to_string(s.p));
  }
}

double total_energy(const PrimitiveState& s, const GasModel& g) {
  return s.p / (g.gamma - 1.0) + 0.5 * s.rho * (s.u1 * s.u1 + s.u2 * s.u2);
}

}  // namespace

QState q_from_primitives(const PrimitiveState& s, const GasModel& g) {
  require_valid(s);
  const double beta = 0.5 * s.rho / s.p;
  QState q;
  q.q0 = std::log(s.rho) + std::log(beta) / (g.gamma - 1.0) -
         beta * (s.u1 * s.u1 + s.u2 * s.u2);
  q.q1 = 2.0 * beta * s.u1;
  q.q2 = 2.0 * beta * s.u2;
  q.q3 = -2.0 * beta;
  return q;
}

PrimitiveState primitives_from_q(const QState& q, const GasModel& g) {
  if (!(q.q3 < 0.0)) {
    throw Error(ErrorCode::positivity,
                "q-state with q3 >= 0 (q3=" + std::to_string(q.q3) + ")");
  }
  const double beta = -0.5 * q.q3;
  PrimitiveState s;
  s.u1 = q.q1 / (2.0 * beta);
  s.u2 = q.q2 / (2.0 * beta);
  s.rho = std::exp(q.q0 - std::log(beta) / (g.gamma - 1.0) +
                   beta * (s.u1 * s.u1 + s.u2 * s.u2));
  s.p = 0.5 * s.rho / beta;
  return s;
}

ConservedState conserved_from_primitives(const PrimitiveState& s, const GasModel& g) {
  require_valid(s);
  ConservedState u;
  u.mass = s.rho;
  u.mom_x = s.rho * s.u1;
  u.mom_y = s.rho * s.u2;
  u.energy = total_energy(s, g);
  return u;
}

PrimitiveState primitives_from_conserved(const ConservedState& u, const GasModel& g) {
  if (!(u.mass > 0.0)) {
    throw Error(ErrorCode::positivity,
                "conserved state with non-positive density " + std::to_string(u.mass));
  }
  PrimitiveState s;
  s.rho = u.mass;
  s.u1 = u.mom_x / u.mass;
  s.u2 = u.mom_y / u.mass;
  s.p = (g.gamma - 1.0) * (u.energy - 0.5 * (u.mom_x * s.u1 + u.mom_y * s.u2));
  if (!(s.p > 0.0)) {
    throw Error(ErrorCode::positivity,
                "conserved state with non-positive pressure " + std::to_string(s.p));
  }
  return s;
}

Vec4 full_flux(const PrimitiveState& s, Axis axis, const GasModel& g) {
  require_valid(s);
  const double e = total_energy(s, g);
  if (axis == Axis::x) {
    return {s.rho * s.u1, s.p + s.rho * s.u1 * s.u1, s.rho * s.u1 * s.u2,
            (e + s.p) * s.u1};
  }
  return {s.rho * s.u2, s.rho * s.u1 * s.u2, s.p + s.rho * s.u2 * s.u2,
          (e + s.p) * s.u2};
}

Vec4 kfvs_split_flux(const PrimitiveState& s, Axis axis, FluxSign sign, const GasModel& g) {
  require_valid(s);
  const double beta = 0.5 * s.rho / s.p;
  const double un = (axis == Axis::x) ? s.u1 : s.u2;
  const double ut = (axis == Axis::x) ? s.u2 : s.u1;
  const double s1 = un * std::sqrt(beta);
  const double pm = (sign == FluxSign::plus) ? 1.0 : -1.0;
  const double a_half = 0.5 * (1.0 + pm * std::erf(s1));
  const double b = std::exp(-s1 * s1) / (2.0 * std::sqrt(M_PI * beta));
  const double e = total_energy(s, g);

  const double mass = s.rho * (un * a_half + pm * b);
  const double mom_n = (s.p + s.rho * un * un) * a_half + pm * s.rho * un * b;
  const double mom_t = s.rho * ut * (un * a_half + pm * b);
  const double erg = (e + s.p) * un * a_half + pm * (e + 0.5 * s.p) * b;

  if (axis == Axis::x) {
    return {mass, mom_n, mom_t, erg};
  }
  return {mass, mom_t, mom_n, erg};
}

void LsSums::add(double dx, double dy, const Vec4& df) {
  sxx += dx * dx;
  sxy += dx * dy;
  syy += dy * dy;
  for (int c = 0; c < 4; ++c) {
    bx[c] += dx * df[c];
    by[c] += dy * df[c];
  }
  ++count;
}

LsGradient ls_derivatives(const LsSums& sums, double det_tol) {
  const double det = sums.determinant();
  if (!(det > det_tol)) {
    throw Error(ErrorCode::singular,
                "singular least-squares stencil (det=" + std::to_string(det) +
                    ", n=" + std::to_string(sums.count) + ")");
  }
  LsGradient grad;
  for (int c = 0; c < 4; ++c) {
    grad.fx[c] = (sums.syy * sums.bx[c] - sums.sxy * sums.by[c]) / det;
    grad.fy[c] = (sums.sxx * sums.by[c] - sums.sxy * sums.bx[c]) / det;
  }
  return grad;
}

}  // namespace lskum
