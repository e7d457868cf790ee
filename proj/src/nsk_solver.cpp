#include "nskqg/nsk_solver.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace nskqg {

namespace {

std::array<SpectralField, 3> zero3(const Grid& g) {
  return {SpectralField(g, Parity::even), SpectralField(g, Parity::even), SpectralField(g, Parity::odd)};
}

void add3(std::array<SpectralField, 3>& a, const std::array<SpectralField, 3>& b) {
  for (int i = 0; i < 3; ++i) a[i] += b[i];
}

struct Pieces {
  std::array<SpectralField, 3> transport, viscous, pressure, capillarity;
};

// r and V on the grid from spectral (r, V); rho = 1 + eps r.
Pieces evaluate(const Grid& g, const NskSolver::Spectral& x, const ScaledParams& p, double floor, double t) {
  const double eps = p.eps;
  ScalarField r = inverse(x[0]);
  std::array<ScalarField, 3> V = {inverse(x[1]), inverse(x[2]), inverse(x[3])};
  ScalarField rho(g, Parity::even);
  double mn = INFINITY;
  for (std::size_t s = 0; s < g.size(); ++s) {
    rho[s] = 1.0 + eps * r[s];
    mn = std::min(mn, rho[s]);
  }
  if (!(mn >= floor)) throw VacuumError("density fell below the floor", t);

  std::array<ScalarField, 3> u;
  for (int a = 0; a < 3; ++a) {
    u[a] = ScalarField(g, V[a].parity);
    for (std::size_t s = 0; s < g.size(); ++s) u[a][s] = V[a][s] / rho[s];
  }

  Pieces out{zero3(g), zero3(g), zero3(g), zero3(g)};

  // transport: -d_b (V_a u_b)
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      SpectralField P = forward(multiply(V[a], u[b]));
      out.transport[a] += derivative(P, Axis(b));
      if (b != a) out.transport[b] += derivative(P, Axis(a));
    }
  for (auto& f : out.transport) f *= -1.0;

  // viscous: nu d_b (rho D_ab)
  if (p.nu != 0.0) {
    std::array<SpectralField, 3> uh = {forward(u[0]), forward(u[1]), forward(u[2])};
    std::array<std::array<ScalarField, 3>, 3> du;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) du[a][b] = inverse(derivative(uh[a], Axis(b)));
    for (int a = 0; a < 3; ++a)
      for (int b = a; b < 3; ++b) {
        ScalarField D(g, du[a][b].parity);
        for (std::size_t s = 0; s < g.size(); ++s) D[s] = 0.5 * rho[s] * (du[a][b][s] + du[b][a][s]);
        SpectralField Dh = forward(D);
        out.viscous[a] += derivative(Dh, Axis(b));
        if (b != a) out.viscous[b] += derivative(Dh, Axis(a));
      }
    for (auto& f : out.viscous) f *= p.nu;
  }

  // pressure remainder
  {
    ScalarField pi(g, Parity::even);
    for (std::size_t s = 0; s < g.size(); ++s) pi[s] = pressure_remainder(r[s], eps, p.gamma);
    auto gp = grad(forward(pi));
    for (int a = 0; a < 3; ++a) {
      gp[a] *= -1.0;
      out.pressure[a] = gp[a];
    }
  }

  // capillarity remainder: eps^(2 alpha - 1) r grad Lap r
  {
    const double c = std::pow(eps, 2.0 * p.alpha - 1.0);
    auto gl = grad(laplacian(x[0]));
    for (int a = 0; a < 3; ++a) {
      ScalarField q = multiply(r, inverse(gl[a]));
      SpectralField qh = forward(q);
      qh *= c;
      out.capillarity[a] = qh;
    }
  }

  for (auto* set : {&out.transport, &out.viscous, &out.pressure, &out.capillarity})
    for (auto& f : *set) dealias_inplace(f);
  return out;
}

}  // namespace

double ScaledParams::kappa() const { return std::pow(eps, 2.0 * alpha); }

void ScaledParams::validate() const {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("nu must be positive");
  if (!(gamma > 1.0 && gamma <= 2.0)) throw std::invalid_argument("gamma must lie in (1, 2]");
  if (alpha > 0.0 && gamma != 2.0)
    throw std::invalid_argument("alpha > 0 requires gamma = 2 (vanishing capillarity needs the quadratic pressure law)");
}

double pressure(double rho, double gamma) {
  if (!(rho > 0.0)) throw std::domain_error("pressure: nonpositive density");
  return std::pow(rho, gamma) / gamma;
}

double internal_energy(double rho, double gamma) {
  if (!(rho > 0.0)) throw std::domain_error("internal_energy: nonpositive density");
  if (gamma == 2.0) return 0.5 * (rho - 1.0) * (rho - 1.0);
  return (std::expm1(gamma * std::log(rho)) - gamma * (rho - 1.0)) / (gamma * (gamma - 1.0));
}

double pressure_remainder(double r, double eps, double gamma) {
  if (gamma == 2.0) return 0.5 * r * r;
  const double d = eps * r;
  // (rho^gamma - 1)/gamma - (rho - 1), rho = 1 + d
  const double v = std::expm1(gamma * std::log1p(d)) / gamma - d;
  return v / (eps * eps);
}

AcousticMode grid_mode(const Grid& g, std::size_t s) {
  const Lattice& L = lattice(g);
  return AcousticMode{L.xi1[s], L.xi2[s], L.kz[s]};
}

Mat4 linear_symbol(const AcousticMode& mode, const ScaledParams& p) { return assemble(mode, p.eps, p.alpha).A; }

FluidState initialize(const ScalarField& r0, const VectorField& u0, const ScaledParams& p) {
  const Grid& g = r0.grid;
  for (std::size_t s = 0; s < g.size(); ++s)
    if (!(1.0 + p.eps * r0[s] > 0.0)) throw VacuumError("vacuum in the initial density", 0.0);
  p.validate();
  FluidState st;
  ScalarField r = project_parity(r0, Parity::even);
  st.rho = ScalarField(g, Parity::even);
  for (std::size_t s = 0; s < g.size(); ++s) st.rho[s] = 1.0 + p.eps * r[s];
  st.u = VectorField(g);
  st.u[0] = project_parity(u0[0], Parity::even);
  st.u[1] = project_parity(u0[1], Parity::even);
  st.u[2] = project_parity(u0[2], Parity::odd);
  st.time = 0.0;
  return st;
}

FluidState rest_state(const Grid& g) {
  FluidState st;
  st.rho = ScalarField(g, Parity::even);
  std::fill(st.rho.values.begin(), st.rho.values.end(), 1.0);
  st.u = VectorField(g);
  return st;
}

static NskSolver::Spectral to_spectral(const FluidState& s, double eps) {
  const Grid& g = s.rho.grid;
  ScalarField r(g, Parity::even);
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = (s.rho[i] - 1.0) / eps;
  NskSolver::Spectral x;
  x[0] = dealias(forward(r));
  for (int a = 0; a < 3; ++a) x[a + 1] = dealias(forward(multiply(s.rho, s.u[a])));
  return x;
}

NonlinearTendency nonlinear_rhs(const FluidState& state, const ScaledParams& p, double density_floor) {
  const Grid& g = state.rho.grid;
  double mn = INFINITY;
  for (double v : state.rho.values) mn = std::min(mn, v);
  if (!(mn >= density_floor)) throw VacuumError("density fell below the floor", state.time);
  Pieces pc = evaluate(g, to_spectral(state, p.eps), p, density_floor, state.time);
  NonlinearTendency t;
  t.mass_nl = SpectralField(g, Parity::even);
  t.transport = pc.transport;
  t.viscous = pc.viscous;
  t.pressure = pc.pressure;
  t.capillarity = pc.capillarity;
  t.momentum_nl = zero3(g);
  add3(t.momentum_nl, t.transport);
  add3(t.momentum_nl, t.viscous);
  add3(t.momentum_nl, t.pressure);
  add3(t.momentum_nl, t.capillarity);
  return t;
}

NskSolver::NskSolver(const Grid& g, const ScaledParams& p, SolverOptions opt) : grid_(g), params_(p), opt_(opt) {
  if (g.planar()) throw std::invalid_argument("the NSK solver needs a 3-D grid");
  x_ = {SpectralField(g, Parity::even), SpectralField(g, Parity::even), SpectralField(g, Parity::even),
        SpectralField(g, Parity::odd)};
  const Lattice& L = lattice(g);
  weight_.resize(L.size());
  const double kap = p.kappa();
  for (std::size_t s = 0; s < L.size(); ++s) weight_[s] = 1.0 + kap * L.zeta(s);
}

void NskSolver::set_state(const FluidState& s) {
  if (!(s.rho.grid == grid_)) throw std::invalid_argument("state grid differs from solver grid");
  x_ = to_spectral(s, params_.eps);
  time_ = s.time;
}

void NskSolver::set_spectral(const Spectral& x, double time) {
  x_ = x;
  time_ = time;
}

FluidState NskSolver::state() const {
  FluidState st;
  ScalarField r = inverse(x_[0]);
  st.rho = ScalarField(grid_, Parity::even);
  for (std::size_t s = 0; s < grid_.size(); ++s) st.rho[s] = 1.0 + params_.eps * r[s];
  st.u = VectorField(grid_);
  for (int a = 0; a < 3; ++a) {
    ScalarField V = inverse(x_[a + 1]);
    for (std::size_t s = 0; s < grid_.size(); ++s) st.u[a][s] = V[s] / st.rho[s];
  }
  st.time = time_;
  return st;
}

void NskSolver::build_propagators(double dt) {
  if (dt == cached_dt_) return;
  const Lattice& L = lattice(grid_);
  E_.assign(L.size(), Mat4::Zero());
  const double tau = dt / params_.eps;
  const int nz = grid_.Nv / 2 + 1;
  auto index_of = [&](int a, int b, int m) {
    const int i = a < 0 ? a + grid_.Nh : a;
    const int j = b < 0 ? b + grid_.Nh : b;
    return (std::size_t(i) * grid_.Nh + j) * nz + m;
  };
  for (std::size_t s = 0; s < L.size(); ++s) {
    if (!L.keep[s]) continue;
    const int a = L.m1[s], b = L.m2[s], m = L.m3[s];
    // on the self-conjugate plane, take -xi from its mirror so Hermitian symmetry is exact
    if (m == 0 && (a < 0 || (a == 0 && b < 0))) continue;
    E_[s] = propagator(assemble(grid_mode(grid_, s), params_.eps, params_.alpha), tau);
    if (m == 0) {
      const std::size_t t = index_of(-a, -b, 0);
      if (t != s) E_[t] = E_[s].conjugate();
    }
  }
  cached_dt_ = dt;
}

void NskSolver::apply_propagator(Spectral& x) const {
  for (std::size_t s = 0; s < E_.size(); ++s) {
    const Mat4& E = E_[s];
    const cplx v0 = x[0][s], v1 = x[1][s], v2 = x[2][s], v3 = x[3][s];
    for (int i = 0; i < 4; ++i) x[i][s] = E(i, 0) * v0 + E(i, 1) * v1 + E(i, 2) * v2 + E(i, 3) * v3;
  }
}

std::array<SpectralField, 3> NskSolver::tendency(const Spectral& x, double t) const {
  Pieces pc = evaluate(grid_, x, params_, opt_.density_floor, t);
  std::array<SpectralField, 3> f = pc.transport;
  add3(f, pc.viscous);
  add3(f, pc.pressure);
  add3(f, pc.capillarity);
  return f;
}

void NskSolver::propagate_linear(double dt) {
  build_propagators(dt);
  apply_propagator(x_);
  time_ += dt;
}

void NskSolver::step(double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const double h = std::min(grid_.dx(), grid_.dz());
  const double umax = max_velocity();
  if (dt * umax / h > opt_.max_courant) throw CflError("advective CFL bound violated", time_);
  build_propagators(dt);
  if (!opt_.nonlinear) {
    apply_propagator(x_);
    time_ += dt;
    return;
  }
  const auto f0 = tendency(x_, time_);
  Spectral y = x_, z = x_;
  for (int a = 0; a < 3; ++a)
    for (std::size_t s = 0; s < y[a + 1].coeffs.size(); ++s) {
      y[a + 1][s] += dt * f0[a][s];
      z[a + 1][s] += 0.5 * dt * f0[a][s];
    }
  apply_propagator(y);
  apply_propagator(z);
  const auto f1 = tendency(y, time_ + dt);
  for (int a = 0; a < 3; ++a)
    for (std::size_t s = 0; s < z[a + 1].coeffs.size(); ++s) z[a + 1][s] += 0.5 * dt * f1[a][s];
  x_ = std::move(z);
  time_ += dt;
  if (min_density() < opt_.density_floor) throw VacuumError("density fell below the floor", time_);
}

double NskSolver::max_velocity() const {
  FluidState st = state();
  double m = 0.0;
  for (std::size_t s = 0; s < grid_.size(); ++s)
    m = std::max(m, std::sqrt(st.u[0][s] * st.u[0][s] + st.u[1][s] * st.u[1][s] + st.u[2][s] * st.u[2][s]));
  return m;
}

double NskSolver::min_density() const {
  ScalarField r = inverse(x_[0]);
  double m = INFINITY;
  for (double v : r.values) m = std::min(m, 1.0 + params_.eps * v);
  return m;
}

double NskSolver::default_dt(double dt_max) const {
  const double h = std::min(grid_.dx(), grid_.dz());
  double dt = dt_max;
  const double umax = max_velocity();
  if (umax > 0.0) dt = std::min(dt, 0.25 * h / umax);
  const Lattice& L = lattice(grid_);
  double zmax = 0.0;
  for (std::size_t s = 0; s < L.size(); ++s)
    if (L.keep[s]) zmax = std::max(zmax, L.zeta(s));
  if (params_.nu > 0.0 && zmax > 0.0) dt = std::min(dt, 1.0 / (params_.nu * zmax));
  return dt;
}

double NskSolver::symmetrizer_energy() const {
  const Lattice& L = lattice(grid_);
  double e = 0.0;
  for (std::size_t s = 0; s < L.size(); ++s) {
    double m = weight_[s] * std::norm(x_[0][s]);
    for (int a = 1; a < 4; ++a) m += std::norm(x_[a][s]);
    e += L.weight[s] * m;
  }
  return 0.5 * e * grid_.volume();
}

FluidState step(const FluidState& state, double dt, const ScaledParams& p) {
  NskSolver solver(state.rho.grid, p);
  solver.set_state(state);
  solver.step(dt);
  return solver.state();
}

}  // namespace nskqg
