#include "nskqg/qg_limit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nskqg {

namespace {

void require_plane(const Grid& g) {
  if (!g.planar()) throw std::invalid_argument("limit-system fields live on a planar grid");
}

double h2(const Lattice& L, std::size_t s) { return L.xi1[s] * L.xi1[s] + L.xi2[s] * L.xi2[s]; }

// decay rate of each mode under the linear part: (nu/2)|xi|^4 X/r divided by q/r
double decay_rate(double k2, Regime regime, double nu) {
  const double x = regime == Regime::vanishing ? 1.0 : 1.0 + k2;
  return 0.5 * nu * k2 * k2 * x / pv_divisor(k2, regime);
}

SpectralField solve_elliptic(const ScalarField& source, Regime regime) {
  SpectralField h = forward(source);
  const Lattice& L = lattice(h.grid);
  for (std::size_t s = 0; s < L.size(); ++s) h[s] /= pv_divisor(h2(L, s), regime);
  return h;
}

// -J/divisor in spectral space
SpectralField nonlinear_part(const SpectralField& rh, Regime regime) {
  SpectralField J = qg_jacobian(rh, regime);
  const Lattice& L = lattice(rh.grid);
  for (std::size_t s = 0; s < L.size(); ++s) J[s] = -J[s] / pv_divisor(h2(L, s), regime);
  return J;
}

// Mean dissipation over a step with each mode's |r|^2 interpolated
// geometrically between the endpoints (exact for pure decay).
double step_dissipation(const ScalarField& r0, const ScalarField& r1, Regime regime, double nu) {
  const SpectralField a = forward(r0), b = forward(r1);
  const Lattice& L = lattice(r0.grid);
  double d = 0.0;
  for (std::size_t s = 0; s < L.size(); ++s) {
    const double k2 = h2(L, s);
    const double x = regime == Regime::vanishing ? 1.0 : 1.0 + k2;
    const double p = std::norm(a[s]), q = std::norm(b[s]);
    double m = 0.5 * (p + q);
    if (p > 0.0 && q > 0.0 && std::abs(p - q) > 1e-12 * (p + q)) m = (p - q) / std::log(p / q);
    d += L.weight[s] * k2 * k2 * x * x * m;
  }
  return 0.5 * nu * d * r0.grid.volume();
}

double inner(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += a[i] * b[i];
  return s * a.grid.cell();
}

}  // namespace

double pv_divisor(double k2, Regime regime) {
  return regime == Regime::vanishing ? 1.0 + k2 : 1.0 + k2 + k2 * k2;
}

ScalarField vertical_average(const ScalarField& f) {
  const Grid& g = f.grid;
  if (g.planar()) return f;
  ScalarField out(make_plane(g.Nh, g.Lh), Parity::even);
  for (int i = 0; i < g.Nh; ++i)
    for (int j = 0; j < g.Nh; ++j) {
      double m = 0.0;
      for (int n = 0; n < g.Nv; ++n) m += f[g.idx(i, j, n)];
      out[out.grid.idx(i, j)] = m / g.Nv;
    }
  return out;
}

ScalarField qg_initial(const ScalarField& omega3_0, const ScalarField& r0, Regime regime) {
  if (!(omega3_0.grid == r0.grid)) throw std::invalid_argument("initial fields on different grids");
  ScalarField src = vertical_average(r0);
  const ScalarField w = vertical_average(omega3_0);
  for (std::size_t i = 0; i < src.values.size(); ++i) src[i] -= w[i];
  return inverse(solve_elliptic(src, regime));
}

ScalarField qg_initial_vanishing(const ScalarField& omega3_0, const ScalarField& r0) {
  return qg_initial(omega3_0, r0, Regime::vanishing);
}

ScalarField qg_initial_constant(const ScalarField& omega3_0, const ScalarField& r0) {
  return qg_initial(omega3_0, r0, Regime::constant);
}

SpectralField stream_function(const SpectralField& rh, Regime regime) {
  if (regime == Regime::vanishing) return rh;
  SpectralField x = rh;
  const Lattice& L = lattice(rh.grid);
  for (std::size_t s = 0; s < L.size(); ++s) x[s] *= 1.0 + h2(L, s);
  return x;
}

std::array<ScalarField, 2> stream_velocity(const ScalarField& r, Regime regime) {
  require_plane(r.grid);
  const auto u = perp_grad_h(stream_function(forward(r), regime));
  return {inverse(u[0]), inverse(u[1])};
}

SpectralField qg_jacobian(const SpectralField& rh, Regime regime) {
  const Grid& g = rh.grid;
  require_plane(g);
  const SpectralField xh = stream_function(rh, regime);
  SpectralField qh = rh;
  const Lattice& L = lattice(g);
  for (std::size_t s = 0; s < L.size(); ++s) qh[s] *= pv_divisor(h2(L, s), regime);
  const auto u = perp_grad_h(xh);
  const ScalarField u1 = inverse(u[0]), u2 = inverse(u[1]);
  const ScalarField q1 = inverse(derivative(qh, Axis::x1)), q2 = inverse(derivative(qh, Axis::x2));
  ScalarField j(g, Parity::even);
  for (std::size_t i = 0; i < g.size(); ++i) j[i] = u1[i] * q1[i] + u2[i] * q2[i];
  return dealias(forward(j));
}

ScalarField qg_rhs(const ScalarField& r, Regime regime, double nu) {
  require_plane(r.grid);
  const SpectralField rh = forward(r);
  SpectralField out = nonlinear_part(rh, regime);
  const Lattice& L = lattice(r.grid);
  for (std::size_t s = 0; s < L.size(); ++s) out[s] -= decay_rate(h2(L, s), regime, nu) * rh[s];
  return inverse(out);
}

ScalarField qg_rhs_expanded(const ScalarField& r, Regime regime, double nu) {
  const Grid& g = r.grid;
  require_plane(g);
  const SpectralField rh = forward(r);
  const Lattice& L = lattice(g);
  SpectralField xh = stream_function(rh, regime);
  // transported gradient: Lap r (vanishing, with a minus sign) or Lap^2 r (constant)
  SpectralField gh = rh;
  for (std::size_t s = 0; s < L.size(); ++s) {
    const double k2 = h2(L, s);
    gh[s] *= regime == Regime::vanishing ? -k2 : k2 * k2;
  }
  const auto u = perp_grad_h(xh);
  const ScalarField u1 = inverse(u[0]), u2 = inverse(u[1]);
  const ScalarField g1 = inverse(derivative(gh, Axis::x1)), g2 = inverse(derivative(gh, Axis::x2));
  ScalarField j(g, Parity::even);
  const double sign = regime == Regime::vanishing ? -1.0 : 1.0;
  for (std::size_t i = 0; i < g.size(); ++i) j[i] = sign * (u1[i] * g1[i] + u2[i] * g2[i]);
  SpectralField jh = dealias(forward(j));
  SpectralField out(g, Parity::even);
  for (std::size_t s = 0; s < L.size(); ++s) {
    const double k2 = h2(L, s);
    out[s] = (-jh[s] - 0.5 * nu * k2 * k2 * xh[s]) / pv_divisor(k2, regime);
  }
  return inverse(out);
}

double qg_max_velocity(const ScalarField& r, Regime regime) {
  const auto u = stream_velocity(r, regime);
  double m = 0.0;
  for (std::size_t i = 0; i < r.values.size(); ++i) m = std::max(m, std::hypot(u[0][i], u[1][i]));
  return m;
}

QGState qg_step(const QGState& s, double dt, double nu) {
  const Grid& g = s.r.grid;
  require_plane(g);
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (dt * qg_max_velocity(s.r, s.regime) / g.dx() > 1.0)
    throw std::runtime_error("advective CFL bound violated in the limit solver");
  const Lattice& L = lattice(g);
  const SpectralField r0 = dealias(forward(s.r));
  std::vector<double> E(L.size());
  for (std::size_t i = 0; i < L.size(); ++i) E[i] = std::exp(-decay_rate(h2(L, i), s.regime, nu) * dt);

  const SpectralField n0 = nonlinear_part(r0, s.regime);
  SpectralField y(g, Parity::even), z(g, Parity::even);
  for (std::size_t i = 0; i < L.size(); ++i) {
    y[i] = E[i] * (r0[i] + dt * n0[i]);
    z[i] = E[i] * (r0[i] + 0.5 * dt * n0[i]);
  }
  const SpectralField n1 = nonlinear_part(y, s.regime);
  for (std::size_t i = 0; i < L.size(); ++i) z[i] += 0.5 * dt * n1[i];
  dealias_inplace(z);
  return QGState{inverse(z), s.time + dt, s.regime};
}

double qg_energy(const ScalarField& r, Regime regime) {
  const SpectralField rh = forward(r);
  const Lattice& L = lattice(r.grid);
  double e = 0.0;
  for (std::size_t s = 0; s < L.size(); ++s) {
    const double k2 = h2(L, s);
    const double w = regime == Regime::vanishing ? 1.0 + k2 : (1.0 + k2) * pv_divisor(k2, regime);
    e += L.weight[s] * w * std::norm(rh[s]);
  }
  return 0.5 * e * r.grid.volume();
}

double qg_dissipation(const ScalarField& r, Regime regime, double nu) {
  const SpectralField xh = stream_function(forward(r), regime);
  const Lattice& L = lattice(r.grid);
  double d = 0.0;
  for (std::size_t s = 0; s < L.size(); ++s) {
    const double k2 = h2(L, s);
    d += L.weight[s] * k2 * k2 * std::norm(xh[s]);
  }
  return 0.5 * nu * d * r.grid.volume();
}

double qg_jacobian_power(const ScalarField& r, Regime regime) {
  const SpectralField rh = forward(r);
  return inner(inverse(stream_function(rh, regime)), inverse(qg_jacobian(rh, regime)));
}

QGBudgetStep qg_budget_step(const QGState& s, double dt, double nu, QGState* next) {
  QGBudgetStep b;
  const QGState n = qg_step(s, dt, nu);
  b.energy_before = qg_energy(s.r, s.regime);
  b.energy_after = qg_energy(n.r, s.regime);
  b.dissipation_mean = step_dissipation(s.r, n.r, s.regime, nu);
  const double dEdt = (b.energy_after - b.energy_before) / dt;
  b.residual = dEdt + b.dissipation_mean;
  const double scale = std::max(std::abs(dEdt), b.dissipation_mean);
  b.relative = scale > 0.0 ? std::abs(b.residual) / scale : 0.0;

  const SpectralField rh = forward(s.r);
  const ScalarField X = inverse(stream_function(rh, s.regime));
  const ScalarField J = inverse(qg_jacobian(rh, s.regime));
  const double nx = std::sqrt(inner(X, X)), nj = std::sqrt(inner(J, J));
  b.jacobian_relative = nx * nj > 0.0 ? std::abs(inner(X, J)) / (nx * nj) : 0.0;
  if (next) *next = n;
  return b;
}

}  // namespace nskqg
