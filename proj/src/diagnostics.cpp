#include "nskqg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

namespace nskqg {

namespace {

std::array<ScalarField, 3> grad_field(const ScalarField& f) {
  const auto g = grad(forward(f));
  return {inverse(g[0]), inverse(g[1]), inverse(g[2])};
}

double grad_sq_integral(const ScalarField& f) {
  const auto g = grad_field(f);
  double s = 0.0;
  for (int a = 0; a < 3; ++a) s += l2_norm_sq(g[a]);
  return s;
}

// sum_ab |d_a d_b f|^2
double hessian_sq_integral(const ScalarField& f) {
  const SpectralField fh = forward(f);
  double s = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) s += l2_norm_sq(inverse(derivative(derivative(fh, Axis(a)), Axis(b))));
  return s;
}

// D_ab = (d_a u_b + d_b u_a)/2 on the grid
std::array<std::array<ScalarField, 3>, 3> strain(const VectorField& u) {
  std::array<std::array<ScalarField, 3>, 3> du, D;
  for (int a = 0; a < 3; ++a) {
    const SpectralField uh = forward(u[a]);
    for (int b = 0; b < 3; ++b) du[a][b] = inverse(derivative(uh, Axis(b)));
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      D[a][b] = du[a][b];
      for (std::size_t s = 0; s < D[a][b].values.size(); ++s) D[a][b][s] = 0.5 * (du[a][b][s] + du[b][a][s]);
    }
  return D;
}

double rho_weighted_strain(const FluidState& s) {
  const auto D = strain(s.u);
  const std::size_t n = s.rho.values.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) d2 += D[a][b][i] * D[a][b][i];
    acc += s.rho[i] * d2;
  }
  return acc * s.rho.grid.cell();
}

// eps^-2 h(1 + eps r) evaluated without cancellation for gamma = 2
double scaled_internal_energy(double rho, const ScaledParams& p) {
  if (p.gamma == 2.0) {
    const double r = (rho - 1.0) / p.eps;
    return 0.5 * r * r;
  }
  const double d = rho - 1.0;
  const double h = (std::expm1(p.gamma * std::log1p(d)) - p.gamma * d) / (p.gamma * (p.gamma - 1.0));
  return h / (p.eps * p.eps);
}

void require_positive(const ScalarField& rho) {
  for (double v : rho.values)
    if (!(v > 0.0)) throw VacuumError("vacuum in diagnostic evaluation", 0.0);
}

}  // namespace

double energy(const FluidState& s, const ScaledParams& p) {
  const Grid& g = s.rho.grid;
  double pot = 0.0, kin = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    pot += scaled_internal_energy(s.rho[i], p);
    kin += s.rho[i] * (s.u[0][i] * s.u[0][i] + s.u[1][i] * s.u[1][i] + s.u[2][i] * s.u[2][i]);
  }
  ScalarField dev(g, Parity::even);
  for (std::size_t i = 0; i < g.size(); ++i) dev[i] = s.rho[i] - 1.0;
  const double cap = std::pow(p.eps, -2.0 * (1.0 - p.alpha)) * grad_sq_integral(dev);
  return (pot + 0.5 * kin) * g.cell() + 0.5 * cap;
}

double bd_entropy(const FluidState& s, const ScaledParams& p) {
  require_positive(s.rho);
  ScalarField q(s.rho.grid, Parity::even);
  for (std::size_t i = 0; i < q.values.size(); ++i) q[i] = std::sqrt(s.rho[i]);
  return 2.0 * p.nu * p.nu * grad_sq_integral(q);
}

double bd_entropy_log_form(const FluidState& s, const ScaledParams& p) {
  require_positive(s.rho);
  ScalarField l(s.rho.grid, Parity::even);
  for (std::size_t i = 0; i < l.values.size(); ++i) l[i] = std::log(s.rho[i]);
  const auto gl = grad_field(l);
  double acc = 0.0;
  for (std::size_t i = 0; i < l.values.size(); ++i)
    acc += s.rho[i] * (gl[0][i] * gl[0][i] + gl[1][i] * gl[1][i] + gl[2][i] * gl[2][i]);
  return 0.5 * p.nu * p.nu * acc * s.rho.grid.cell();
}

double dissipation_rate(const FluidState& s, const ScaledParams& p) { return p.nu * rho_weighted_strain(s); }

double coriolis_power(const FluidState& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.rho.values.size(); ++i) {
    const double V1 = s.rho[i] * s.u[0][i], V2 = s.rho[i] * s.u[1][i];
    acc += -V2 * s.u[0][i] + V1 * s.u[1][i];
  }
  return acc * s.rho.grid.cell();
}

double columnarization(const VectorField& u) {
  const Grid& g = u.grid();
  double total = 0.0, off = 0.0;
  for (int a = 0; a < 3; ++a) total += l2_norm_sq(u[a]);
  if (total == 0.0) return 0.0;
  off += l2_norm_sq(u[2]);
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < g.Nh; ++i)
      for (int j = 0; j < g.Nh; ++j) {
        double mean = 0.0;
        for (int n = 0; n < g.Nv; ++n) mean += u[a][g.idx(i, j, n)];
        mean /= g.Nv;
        for (int n = 0; n < g.Nv; ++n) {
          const double d = u[a][g.idx(i, j, n)] - mean;
          off += d * d * g.cell();
        }
      }
  return std::clamp(off / total, 0.0, 1.0);
}

double columnarization(const FluidState& s) { return columnarization(s.u); }

SnapshotRecord record_snapshot(const FluidState& s, const ScaledParams& p) {
  require_positive(s.rho);
  const Grid& g = s.rho.grid;
  SnapshotRecord r;
  r.time = s.time;
  r.E = energy(s, p);
  r.F = bd_entropy(s, p);

  const double strain2 = rho_weighted_strain(s);
  r.dissipation = p.nu * strain2;
  r.sqrt_rho_Du_l2 = std::sqrt(strain2);

  ScalarField dev(g, Parity::even);
  for (std::size_t i = 0; i < g.size(); ++i) dev[i] = s.rho[i] - 1.0;
  r.rho_dev_l2 = std::sqrt(l2_norm_sq(dev));
  r.grad_rho_l2 = std::sqrt(grad_sq_integral(dev));
  r.hess_rho_l2 = std::sqrt(hessian_sq_integral(dev));

  double ku = 0.0;
  r.min_rho = INFINITY;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double u2 = s.u[0][i] * s.u[0][i] + s.u[1][i] * s.u[1][i] + s.u[2][i] * s.u[2][i];
    ku += s.rho[i] * u2;
    r.min_rho = std::min(r.min_rho, s.rho[i]);
    r.max_u = std::max(r.max_u, std::sqrt(u2));
  }
  r.sqrt_rho_u_l2 = std::sqrt(ku * g.cell());

  ScalarField lr(g, Parity::even), sq(g, Parity::even);
  for (std::size_t i = 0; i < g.size(); ++i) {
    lr[i] = std::log(s.rho[i]);
    sq[i] = std::sqrt(s.rho[i]);
  }
  const auto gl = grad_field(lr);
  const auto gs = grad_field(sq);
  double bk = 0.0, bp = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double w2 = 0.0, s2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double w = s.u[a][i] + p.nu * gl[a][i];
      w2 += w * w;
      s2 += gs[a][i] * gs[a][i];
    }
    bk += s.rho[i] * w2;
    bp += std::pow(s.rho[i], p.gamma - 1.0) * s2;
  }
  r.bd_kinetic = 0.5 * bk * g.cell();
  r.bd_pressure = bp * g.cell();
  r.coriolis = coriolis_power(s);
  return r;
}

std::vector<EnergyReport> energy_reports(const Trajectory& tr, const ScaledParams& p) {
  std::vector<EnergyReport> out;
  double diss = 0.0, hess = 0.0, press = 0.0, du = 0.0, gr = 0.0;
  double rho_inf = 0.0, grad_inf = 0.0, u_inf = 0.0;
  const double cap = std::pow(p.eps, -2.0 * (1.0 - p.alpha));
  for (std::size_t n = 0; n < tr.size(); ++n) {
    const SnapshotRecord& s = tr[n];
    if (n > 0) {
      const SnapshotRecord& a = tr[n - 1];
      const double h = 0.5 * (s.time - a.time);
      diss += h * (a.dissipation + s.dissipation);
      hess += h * (a.hess_rho_l2 * a.hess_rho_l2 + s.hess_rho_l2 * s.hess_rho_l2);
      press += h * (a.bd_pressure + s.bd_pressure);
      du += h * (a.sqrt_rho_Du_l2 * a.sqrt_rho_Du_l2 + s.sqrt_rho_Du_l2 * s.sqrt_rho_Du_l2);
      gr += h * (a.grad_rho_l2 * a.grad_rho_l2 + s.grad_rho_l2 * s.grad_rho_l2);
    }
    rho_inf = std::max(rho_inf, s.rho_dev_l2);
    grad_inf = std::max(grad_inf, s.grad_rho_l2);
    u_inf = std::max(u_inf, s.sqrt_rho_u_l2);
    EnergyReport e;
    e.time = s.time;
    e.E_eps = s.E;
    e.F_eps = s.F;
    e.visc_dissipation = diss;
    e.bd_left = s.bd_kinetic + p.nu * cap * hess + 4.0 * p.nu / (p.eps * p.eps) * press;
    e.norms = {{"rho_minus_1_LinfL2", rho_inf},  {"grad_rho_LinfL2", grad_inf},
               {"hess_rho_L2L2", std::sqrt(hess)}, {"sqrt_rho_u_LinfL2", u_inf},
               {"sqrt_rho_Du_L2L2", std::sqrt(du)}, {"grad_rho_L2L2", std::sqrt(gr)}};
    out.push_back(std::move(e));
  }
  return out;
}

double energy_inequality_residual(const Trajectory& tr) {
  if (tr.size() < 2) throw std::invalid_argument("energy residual needs at least two snapshots");
  double diss = 0.0, worst = -INFINITY;
  for (std::size_t n = 0; n < tr.size(); ++n) {
    if (n > 0) diss += 0.5 * (tr[n].time - tr[n - 1].time) * (tr[n - 1].dissipation + tr[n].dissipation);
    worst = std::max(worst, tr[n].E + diss - tr[0].E);
  }
  return worst;
}

std::map<std::string, double> uniform_bound_table(const Trajectory& tr, const ScaledParams& p) {
  if (tr.empty()) return {};
  auto norms = energy_reports(tr, p).back().norms;
  norms["rho_minus_1_LinfL2_over_eps"] = norms["rho_minus_1_LinfL2"] / p.eps;
  norms["grad_rho_LinfL2_over_eps_pow_1_minus_alpha"] = norms["grad_rho_LinfL2"] / std::pow(p.eps, 1.0 - p.alpha);
  norms["grad_rho_L2L2_over_eps"] = norms["grad_rho_L2L2"] / p.eps;
  return norms;
}

const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> cols = {
      "eps", "time", "E_eps", "F_eps", "visc_dissipation", "bd_left",
      "rho_minus_1_LinfL2", "grad_rho_LinfL2", "hess_rho_L2L2", "sqrt_rho_u_LinfL2", "sqrt_rho_Du_L2L2",
      "grad_rho_L2L2"};
  return cols;
}

void write_diagnostics_header(std::ostream& os) {
  const auto& c = diagnostics_columns();
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
  os << '\n';
}

void write_diagnostics_rows(std::ostream& os, double eps, const std::vector<EnergyReport>& reports) {
  const auto& c = diagnostics_columns();
  os << std::setprecision(17);
  for (const auto& r : reports) {
    os << eps << ',' << r.time << ',' << r.E_eps << ',' << r.F_eps << ',' << r.visc_dissipation << ',' << r.bd_left;
    for (std::size_t i = 6; i < c.size(); ++i) os << ',' << r.norms.at(c[i]);
    os << '\n';
  }
}

}  // namespace nskqg
