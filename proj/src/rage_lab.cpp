#include "nskqg/rage_lab.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace nskqg {

void SpectralMeasure::validate() const {
  for (const auto& [x, m] : atoms)
    if (!(m >= 0.0) || !std::isfinite(x) || !std::isfinite(m)) throw std::invalid_argument("atoms need finite nonnegative mass");
  for (double v : ac_density)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("density samples must be nonnegative");
  if (ac_density.size() == 1) throw std::invalid_argument("a sampled density needs at least two points");
  if (!ac_density.empty() && !(ac_hi > ac_lo)) throw std::invalid_argument("density interval is empty");
}

double SpectralMeasure::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.second;
  if (ac_density.size() >= 2) {
    const double h = (ac_hi - ac_lo) / double(ac_density.size() - 1);
    for (std::size_t i = 0; i < ac_density.size(); ++i)
      m += h * ac_density[i] * ((i == 0 || i + 1 == ac_density.size()) ? 0.5 : 1.0);
  }
  return m;
}

double SpectralMeasure::pure_point_sum() const {
  std::map<double, double> merged;
  for (const auto& [x, m] : atoms) merged[x] += m;
  double s = 0.0;
  for (const auto& [x, m] : merged) s += m * m;
  return s;
}

double SpectralMeasure::extent() const {
  double e = 0.0;
  for (const auto& a : atoms) e = std::max(e, std::abs(a.first));
  if (!ac_density.empty()) e = std::max({e, std::abs(ac_lo), std::abs(ac_hi)});
  return e;
}

SpectralMeasure SpectralMeasure::dirac(double x, double mass) {
  SpectralMeasure m;
  m.atoms.push_back({x, mass});
  return m;
}

SpectralMeasure SpectralMeasure::uniform(double lo, double hi, double mass, std::size_t samples) {
  SpectralMeasure m;
  m.ac_lo = lo;
  m.ac_hi = hi;
  m.ac_density.assign(samples, mass / (hi - lo));
  return m;
}

SpectralMeasure SpectralMeasure::scaled(double c) const {
  SpectralMeasure m = *this;
  for (auto& a : m.atoms) a.second *= c;
  for (auto& v : m.ac_density) v *= c;
  return m;
}

SpectralMeasure SpectralMeasure::operator+(const SpectralMeasure& o) const {
  SpectralMeasure m = *this;
  m.atoms.insert(m.atoms.end(), o.atoms.begin(), o.atoms.end());
  if (m.ac_density.empty()) {
    m.ac_lo = o.ac_lo;
    m.ac_hi = o.ac_hi;
    m.ac_density = o.ac_density;
  } else if (!o.ac_density.empty()) {
    if (o.ac_lo != ac_lo || o.ac_hi != ac_hi || o.ac_density.size() != ac_density.size())
      throw std::invalid_argument("density parts sampled on different grids");
    for (std::size_t i = 0; i < ac_density.size(); ++i) m.ac_density[i] += o.ac_density[i];
  }
  return m;
}

namespace {

// int_0^1 e^{zu} du and int_0^1 u e^{zu} du
std::pair<cplx, cplx> segment_moments(cplx z) {
  if (std::abs(z) < 1e-2) {
    cplx e1 = 0.0, e2 = 0.0, zn = 1.0;
    double fact = 1.0;
    for (int n = 0; n < 8; ++n) {
      e1 += zn / (fact * double(n + 1));
      e2 += zn / (fact * double(n + 2));
      zn *= z;
      fact *= double(n + 1);
    }
    return {e1, e2};
  }
  const cplx ez = std::exp(z);
  return {(ez - 1.0) / z, (ez * (z - 1.0) + 1.0) / (z * z)};
}

}  // namespace

// The density is the piecewise-linear interpolant of its samples, transformed exactly.
cplx fourier_transform_measure(const SpectralMeasure& m, double t) {
  cplx F = 0.0;
  for (const auto& [x, mass] : m.atoms) F += mass * std::exp(cplx(0.0, -x * t));
  const std::size_t n = m.ac_density.size();
  if (n >= 2) {
    const double h = (m.ac_hi - m.ac_lo) / double(n - 1);
    const auto [e1, e2] = segment_moments(cplx(0.0, -h * t));
    const cplx left = e1 - e2;
    const cplx rot = std::exp(cplx(0.0, -h * t));
    cplx ph = std::exp(cplx(0.0, -m.ac_lo * t));
    cplx acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (i > 0 && i % 256 == 0) ph = std::exp(cplx(0.0, -(m.ac_lo + double(i) * h) * t));
      acc += ph * (m.ac_density[i] * left + m.ac_density[i + 1] * e2);
      ph *= rot;
    }
    F += h * acc;
  }
  return F;
}

double wiener_average(const SpectralMeasure& m, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
  m.validate();
  // |F|^2 is even in t for a real measure
  auto f = [&](double t) { return std::norm(fourier_transform_measure(m, t)); };
  const double X = m.extent();
  const double width = X > 0.0 ? std::min(T, M_PI / (2.0 * X)) : T;
  const std::size_t panels = std::size_t(std::ceil(T / width));
  double acc = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = T * double(p) / double(panels), b = T * double(p + 1) / double(panels);
    acc += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 8, 1e-12);
  }
  return acc / T;
}

double coupled_wiener_average(const MeasureFamily& family, double T, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const auto mu = family(eps);
  if (!mu) throw std::invalid_argument("measure family is not defined at the requested eps");
  // substitute s = t/eps
  return wiener_average(*mu, T / eps);
}

std::vector<double> coupled_wiener_sweep(const MeasureFamily& family, double T, const std::vector<double>& eps_list) {
  std::vector<double> out;
  for (double e : eps_list) out.push_back(coupled_wiener_average(family, T, e));
  return out;
}

ScalarField bump_window(const Grid& g, double radius) {
  ScalarField th(g, Parity::even);
  const double c = 0.5 * g.Lh;
  if (!(radius > 0.0) || radius >= c) throw std::invalid_argument("window radius must fit inside the box");
  for (int i = 0; i < g.Nh; ++i)
    for (int j = 0; j < g.Nh; ++j) {
      const double d = std::hypot(g.x1(i) - c, g.x2(j) - c) / radius;
      const double v = d < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - d * d)) : 0.0;
      for (int n = 0; n < g.Nv; ++n) th[g.idx(i, j, n)] = v;
    }
  return th;
}

CutoffOperator make_cutoff(const Grid& g, double M, double radius) { return CutoffOperator{M, bump_window(g, radius)}; }

bool in_truncation(const AcousticData& y, double M) {
  const Lattice& L = lattice(y[0].grid);
  for (std::size_t s = 0; s < L.size(); ++s) {
    bool nz = false;
    for (int a = 0; a < 4; ++a) nz = nz || std::abs(y[a][s]) > 0.0;
    if (nz && std::hypot(L.xi1[s], L.xi2[s]) + L.kz[s] > M + 1e-12) return false;
  }
  return true;
}

RageResult rage_time_average(const AcousticData& y, double eps, double alpha, double T, const CutoffOperator& cutoff) {
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const Grid& g = y[0].grid;
  if (!in_truncation(y, cutoff.M)) throw std::invalid_argument("initial data lies outside the H_M truncation");
  if (!(cutoff.theta.grid == g)) throw std::invalid_argument("window grid differs from data grid");
  const Lattice& L = lattice(g);
  const double kap = std::pow(eps, 2.0 * alpha);

  struct Active {
    std::size_t s;
    ModeEvolution ev;
    Vec4 y0;
  };
  std::vector<Active> modes;
  RageResult res;
  double lam_max = 0.0;
  for (std::size_t s = 0; s < L.size(); ++s) {
    res.max_weight = std::max(res.max_weight, 1.0 + kap * L.zeta(s));
    Vec4 v;
    for (int a = 0; a < 4; ++a) v[a] = y[a][s];
    res.norm_sq += L.weight[s] * v.squaredNorm() * g.volume();
    if (v.squaredNorm() == 0.0) continue;
    const AcousticSymbol sym = assemble(grid_mode(g, s), eps, alpha);
    const Vec4 p = (Mat4::Identity() - kernel_projector(sym)) * v;
    const double w = sym.weight();
    res.norm_bound += L.weight[s] * (w * std::norm(p[0]) + std::norm(p[1]) + std::norm(p[2]) + std::norm(p[3])) * g.volume();
    modes.push_back({s, ModeEvolution(sym), p});
    lam_max = std::max(lam_max, modes.back().ev.frequencies().cwiseAbs().maxCoeff());
  }

  const double dt_target = lam_max > 0.0 ? 2.0 * M_PI * eps / lam_max / 8.0 : T;
  const std::size_t nt = std::max<std::size_t>(8, std::size_t(std::ceil(T / dt_target)));
  res.dt = T / double(nt);
  res.samples = nt + 1;

  std::vector<double> sqrt_theta(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) sqrt_theta[i] = std::sqrt(std::max(0.0, cutoff.theta[i]));

  AcousticData X = {SpectralField(g, Parity::even), SpectralField(g, Parity::even), SpectralField(g, Parity::even),
                    SpectralField(g, Parity::odd)};
  double acc = 0.0, acc_sym = 0.0;
  for (std::size_t n = 0; n <= nt; ++n) {
    const double tau = res.dt * double(n) / eps;
    for (const auto& m : modes) {
      const Vec4 x = m.ev.evolve(m.y0, tau);
      for (int a = 0; a < 4; ++a) X[a][m.s] = x[a];
    }
    double flat = 0.0, vel = 0.0;
    ScalarField zr;
    for (int a = 0; a < 4; ++a) {
      ScalarField f = inverse(X[a]);
      for (std::size_t i = 0; i < g.size(); ++i) f[i] *= sqrt_theta[i];
      const double q = l2_norm_sq(f);
      flat += q;
      if (a == 0) zr = std::move(f);
      else vel += q;
    }
    const SpectralField zh = forward(zr);
    double rsym = 0.0;
    for (std::size_t s = 0; s < L.size(); ++s) rsym += L.weight[s] * (1.0 + kap * L.zeta(s)) * std::norm(zh[s]);
    rsym *= g.volume();
    const double wt = (n == 0 || n == nt) ? 0.5 : 1.0;
    acc += wt * flat;
    acc_sym += wt * (rsym + vel);
  }
  res.average = acc / double(nt);
  res.average_symmetrized = acc_sym / double(nt);
  return res;
}

AcousticData broadband_data(const Grid& g, int modes, int m3, double width) {
  if (modes < 1 || m3 < 0 || !(width > 0.0)) throw std::invalid_argument("invalid broadband parameters");
  ScalarField r(g, Parity::even);
  const double c = 0.5 * g.Lh;
  for (int i = 0; i < g.Nh; ++i)
    for (int j = 0; j < g.Nh; ++j) {
      const double d2 = std::pow(g.x1(i) - c, 2) + std::pow(g.x2(j) - c, 2);
      const double h = std::exp(-d2 / (2.0 * width * width));
      for (int n = 0; n < g.Nv; ++n) r[g.idx(i, j, n)] = h * std::cos(M_PI * m3 * g.x3(n));
    }
  SpectralField rh = forward(r);
  const Lattice& L = lattice(g);
  for (std::size_t s = 0; s < L.size(); ++s)
    if (std::hypot(double(L.m1[s]), double(L.m2[s])) > modes || std::abs(L.m3[s]) != m3 || L.nyq1[s] || L.nyq2[s] ||
        L.nyq3[s])
      rh[s] = 0.0;
  return {rh, SpectralField(g, Parity::even), SpectralField(g, Parity::even), SpectralField(g, Parity::odd)};
}

double broadband_level(const Grid& g, int modes, int m3) { return 2.0 * M_PI * modes / g.Lh + M_PI * m3; }

RageSweepResult rage_sweep(const RageSweepConfig& c) {
  if (c.eps_list.empty()) throw std::invalid_argument("eps_list is empty");
  const Grid g = make_grid(c.Nh, c.Nv, c.Lh);
  const AcousticData y = broadband_data(g, c.modes, c.m3, c.width);
  const CutoffOperator cut = make_cutoff(g, broadband_level(g, c.modes, c.m3), c.window_radius);
  RageSweepResult out;
  for (double e : c.eps_list) out.rows.push_back(rage_time_average(y, e, c.alpha, c.T, cut));
  out.monotone = true;
  for (std::size_t i = 1; i < out.rows.size(); ++i)
    out.monotone = out.monotone && out.rows[i].average < out.rows[i - 1].average;
  out.ratio = out.rows.back().average / out.rows.front().average;
  out.pass = out.monotone && out.ratio < c.ratio_max;
  return out;
}

}  // namespace nskqg
