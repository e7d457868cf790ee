#pragma once
// Energies, the BD entropy, uniform-bound norms and columnarization measured
// on solver snapshots. Time integrals use the trapezoid rule over snapshots.

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "nskqg/nsk_solver.hpp"

namespace nskqg {

double energy(const FluidState& s, const ScaledParams& p);
// 2 nu^2 int |grad sqrt(rho)|^2
double bd_entropy(const FluidState& s, const ScaledParams& p);
// (nu^2 / 2) int rho |grad log rho|^2, the same quantity written differently
double bd_entropy_log_form(const FluidState& s, const ScaledParams& p);
// nu int rho |Du|^2
double dissipation_rate(const FluidState& s, const ScaledParams& p);
// int (e3 x rho u) . u
double coriolis_power(const FluidState& s);

// Share of kinetic energy in vertically varying horizontal motion plus
// vertical motion: (|u^h - <u^h>_3|^2 + |u^3|^2) / |u|^2, in [0, 1].
double columnarization(const VectorField& u);
double columnarization(const FluidState& s);

// Per-snapshot quantities from which every reported norm is assembled.
struct SnapshotRecord {
  double time = 0.0;
  double E = 0.0;
  double F = 0.0;
  double dissipation = 0.0;      // nu int rho |Du|^2
  double rho_dev_l2 = 0.0;       // |rho - 1|
  double grad_rho_l2 = 0.0;      // |grad rho|
  double hess_rho_l2 = 0.0;      // |grad^2 rho|
  double sqrt_rho_u_l2 = 0.0;    // |sqrt(rho) u|
  double sqrt_rho_Du_l2 = 0.0;   // |sqrt(rho) Du|
  double bd_kinetic = 0.0;       // 1/2 int rho |u + nu grad log rho|^2
  double bd_pressure = 0.0;      // int P'(rho) |grad sqrt(rho)|^2
  double min_rho = 0.0;
  double max_u = 0.0;
  double coriolis = 0.0;
};

SnapshotRecord record_snapshot(const FluidState& s, const ScaledParams& p);

using Trajectory = std::vector<SnapshotRecord>;

struct EnergyReport {
  double time = 0.0;
  double E_eps = 0.0;
  double F_eps = 0.0;
  double visc_dissipation = 0.0;
  double bd_left = 0.0;
  std::map<std::string, double> norms;
};

// Running reports: time integrals accumulate up to each snapshot.
std::vector<EnergyReport> energy_reports(const Trajectory& tr, const ScaledParams& p);

// max_t [E(t) + nu int_0^t int rho |Du|^2 - E(0)]
double energy_inequality_residual(const Trajectory& tr);

// Norms over the whole trajectory plus the eps-rescaled ratios.
std::map<std::string, double> uniform_bound_table(const Trajectory& tr, const ScaledParams& p);

// Fixed column order of the diagnostics CSV.
const std::vector<std::string>& diagnostics_columns();
void write_diagnostics_header(std::ostream& os);
void write_diagnostics_rows(std::ostream& os, double eps, const std::vector<EnergyReport>& reports);

}  // namespace nskqg
