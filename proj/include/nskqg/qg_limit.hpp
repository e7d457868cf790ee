#pragma once
// Two-dimensional limit dynamics for the horizontal scalar r on a planar grid.
//
// Both regimes are integrated as transport of q = r - Lap_h X(r) by the
// stream velocity grad_perp X(r):
//
//   d_t q + grad_perp X . grad q + (nu/2) Lap_h^2 X = 0
//
// with X(r) = r (vanishing capillarity, q = (Id - Lap_h) r) or
// X(r) = (Id - Lap_h) r (constant capillarity, q = (Id - Lap_h + Lap_h^2) r).

#include <array>

#include "nskqg/spectral_grid.hpp"

namespace nskqg {

enum class Regime { vanishing, constant };

struct QGState {
  ScalarField r;  // planar
  double time = 0.0;
  Regime regime = Regime::vanishing;
};

// Mean over x3 of a 3-D field, returned on the matching plane.
ScalarField vertical_average(const ScalarField& f);

// (Id - Lap_h) rbar = <r0 - omega3_0>_3
ScalarField qg_initial_vanishing(const ScalarField& omega3_0, const ScalarField& r0);
// (Id - Lap_h + Lap_h^2) rtilde = <r0 - omega3_0>_3
ScalarField qg_initial_constant(const ScalarField& omega3_0, const ScalarField& r0);
ScalarField qg_initial(const ScalarField& omega3_0, const ScalarField& r0, Regime regime);

// X(r) in spectral space
SpectralField stream_function(const SpectralField& rh, Regime regime);
// grad_perp X(r)
std::array<ScalarField, 2> stream_velocity(const ScalarField& r, Regime regime);

// potential-vorticity multiplier q/r per mode: 1 + |xi|^2 or 1 + |xi|^2 + |xi|^4
double pv_divisor(double xi2, Regime regime);

// d_t r from the stream (transport) form; the Jacobian is dealiased.
ScalarField qg_rhs(const ScalarField& r, Regime regime, double nu);
// d_t r from the expanded form:
//   vanishing: d_t (r - Lap r) - grad_perp r . grad Lap r + (nu/2) Lap^2 r = 0
//   constant:  d_t (r - Lap X) + grad_perp X . grad Lap^2 r + (nu/2) Lap^2 X = 0
ScalarField qg_rhs_expanded(const ScalarField& r, Regime regime, double nu);

// Dealiased transport term grad_perp X . grad q in spectral space.
SpectralField qg_jacobian(const SpectralField& rh, Regime regime);

// Integrating factor on the dissipation, Heun (RK2) on the Jacobian.
QGState qg_step(const QGState& s, double dt, double nu);

// Quadratic invariant of the inviscid dynamics:
//   vanishing  1/2 (|r|^2 + |grad r|^2)
//   constant   1/2 <X(r), (Id - Lap + Lap^2) r>
double qg_energy(const ScalarField& r, Regime regime);
// (nu/2) |Lap X(r)|^2, the dissipation matching qg_energy
double qg_dissipation(const ScalarField& r, Regime regime, double nu);
// <X(r), J> where J is the dealiased transport term: zero in exact arithmetic
double qg_jacobian_power(const ScalarField& r, Regime regime);

struct QGBudgetStep {
  double energy_before = 0.0;
  double energy_after = 0.0;
  double dissipation_mean = 0.0;  // per-mode logarithmic mean over the step
  double residual = 0.0;          // (E1 - E0)/dt + dissipation_mean
  double relative = 0.0;          // residual / max(|dE/dt|, dissipation_mean)
  double jacobian_relative = 0.0; // |<X, J>| / (|X| |J|)
};
QGBudgetStep qg_budget_step(const QGState& s, double dt, double nu, QGState* next = nullptr);

double qg_max_velocity(const ScalarField& r, Regime regime);

}  // namespace nskqg
