#pragma once
// Rotating Navier-Stokes-Korteweg system in the low Mach / low Rossby scaling,
// integrated in the variables r = (rho - 1)/eps and V = rho u:
//
//   eps dr/dt + div V = 0
//   eps dV/dt + e3 x V + grad (Id - eps^(2 alpha) Lap) r = eps f
//
// The linear part is propagated exactly per Fourier mode, f explicitly
// (Lawson RK2) with 2/3 dealiasing.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "nskqg/acoustic_spectrum.hpp"
#include "nskqg/spectral_grid.hpp"

namespace nskqg {

struct ScaledParams {
  double eps = 0.1;
  double alpha = 1.0;
  double nu = 0.05;
  double gamma = 2.0;

  double kappa() const;  // eps^(2 alpha)
  void validate() const;
};

struct FluidState {
  ScalarField rho;
  VectorField u;
  double time = 0.0;
};

class BreakdownError : public std::runtime_error {
 public:
  BreakdownError(const std::string& what, double t) : std::runtime_error(what), time(t) {}
  double time;
};

struct VacuumError : BreakdownError {
  using BreakdownError::BreakdownError;
};

struct CflError : BreakdownError {
  using BreakdownError::BreakdownError;
};

// Pieces of f; mass_nl is identically zero since the mass equation is linear in (r, V).
struct NonlinearTendency {
  SpectralField mass_nl;
  std::array<SpectralField, 3> transport;    // -div(rho u x u)
  std::array<SpectralField, 3> viscous;      // nu div(rho Du)
  std::array<SpectralField, 3> pressure;     // -eps^-2 grad(P(rho) - P(1) - P'(1)(rho-1))
  std::array<SpectralField, 3> capillarity;  // eps^(-2(1-alpha)) (rho-1) grad Lap rho
  std::array<SpectralField, 3> momentum_nl;  // sum of the above
};

double pressure(double rho, double gamma);
double internal_energy(double rho, double gamma);
// eps^-2 (P(1 + eps r) - P(1) - (eps r))
double pressure_remainder(double r, double eps, double gamma);

AcousticMode grid_mode(const Grid& g, std::size_t s);
Mat4 linear_symbol(const AcousticMode& mode, const ScaledParams& p);

FluidState initialize(const ScalarField& r0, const VectorField& u0, const ScaledParams& p);
FluidState rest_state(const Grid& g);

NonlinearTendency nonlinear_rhs(const FluidState& state, const ScaledParams& p, double density_floor = 1e-6);

struct SolverOptions {
  bool nonlinear = true;
  double density_floor = 1e-6;
  double max_courant = 1.0;
};

class NskSolver {
 public:
  using Spectral = std::array<SpectralField, 4>;  // (r, V1, V2, V3)

  NskSolver(const Grid& g, const ScaledParams& p, SolverOptions opt = {});

  void set_state(const FluidState& s);
  void set_spectral(const Spectral& x, double time);
  FluidState state() const;
  const Spectral& spectral() const { return x_; }
  double time() const { return time_; }
  const Grid& grid() const { return grid_; }
  const ScaledParams& params() const { return params_; }

  void step(double dt);
  // Exact linear flow only.
  void propagate_linear(double dt);

  double max_velocity() const;
  double min_density() const;
  // 0.25 * spacing / max|u|, also limited by explicit viscosity and dt_max.
  double default_dt(double dt_max) const;
  // 1/2 sum over modes of the symmetrizer norm, times the box volume.
  double symmetrizer_energy() const;

  // f(X) for a spectral state; throws VacuumError below the density floor.
  std::array<SpectralField, 3> tendency(const Spectral& x, double t) const;

 private:
  void build_propagators(double dt);
  void apply_propagator(Spectral& x) const;

  Grid grid_;
  ScaledParams params_;
  SolverOptions opt_;
  Spectral x_;
  double time_ = 0.0;
  double cached_dt_ = -1.0;
  std::vector<Mat4> E_;
  std::vector<double> weight_;  // 1 + kappa zeta per mode
};

FluidState step(const FluidState& state, double dt, const ScaledParams& p);

}  // namespace nskqg
