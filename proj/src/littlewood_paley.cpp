#include "nskqg/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace nskqg {

namespace {

void check_exponent(double p, const char* name) {
  if (!(p >= 1.0)) throw std::invalid_argument(std::string("exponent ") + name + " must lie in [1, inf]");
}

double lq_sum(const std::vector<double>& terms, double q) {
  if (std::isinf(q)) return terms.empty() ? 0.0 : *std::max_element(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += std::pow(t, q);
  return std::pow(s, 1.0 / q);
}

std::vector<double> grad_fields_norms(const std::vector<ScalarField>& fs) {
  std::vector<double> out(fs.front().values.size(), 0.0);
  for (const auto& f : fs)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += f[i] * f[i];
  for (double& v : out) v = std::sqrt(v);
  return out;
}

double lp_of_samples(const std::vector<double>& v, double cell, double p) {
  check_exponent(p, "p");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), p);
  return std::pow(s * cell, 1.0 / p);
}

struct SpectrumExtent {
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = 0.0;
  bool empty = true;
};

SpectrumExtent spectrum_extent(const ScalarField& f) {
  const SpectralField fh = forward(f);
  const Lattice& L = lattice(f.grid);
  double cmax = 0.0;
  for (const auto& c : fh.coeffs) cmax = std::max(cmax, std::abs(c));
  SpectrumExtent e;
  if (cmax == 0.0) return e;
  for (std::size_t s = 0; s < L.size(); ++s) {
    if (std::abs(fh[s]) <= 1e-12 * cmax) continue;
    const double r = std::sqrt(L.zeta(s));
    e.rmin = std::min(e.rmin, r);
    e.rmax = std::max(e.rmax, r);
    e.empty = false;
  }
  return e;
}

}  // namespace

double lp_chi(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double t = s - 1.0;
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double lp_phi(double s) { return lp_chi(0.5 * s) - lp_chi(s); }

int spatial_dimension(const Grid& g) { return g.planar() ? 2 : 3; }

DyadicFilterBank::DyadicFilterBank(const Grid& g) : grid_(g) {
  const Lattice& L = lattice(g);
  radius_.resize(L.size());
  double rmin = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < L.size(); ++s) {
    radius_[s] = std::sqrt(L.zeta(s));
    kmax_ = std::max(kmax_, radius_[s]);
    if (radius_[s] > 0.0) rmin = std::min(rmin, radius_[s]);
  }
  while (std::ldexp(1.0, j_max_ + 1) < kmax_) ++j_max_;
  j_min_ = 0;
  if (std::isfinite(rmin))
    while (std::ldexp(1.0, j_min_ + 2) > rmin) --j_min_;
  ++j_min_;
  filters_.assign(j_max_ + 2, std::vector<double>(L.size()));
  for (std::size_t s = 0; s < L.size(); ++s) {
    filters_[0][s] = lp_chi(radius_[s]);
    for (int j = 0; j <= j_max_; ++j) filters_[j + 1][s] = lp_phi(std::ldexp(radius_[s], -j));
  }
}

const std::vector<double>& DyadicFilterBank::filter(int j) const {
  if (j < -1) throw std::invalid_argument("dyadic index must be >= -1");
  if (j > j_max_) {
    static thread_local std::vector<double> zero;
    zero.assign(radius_.size(), 0.0);
    return zero;
  }
  return filters_[j + 1];
}

std::vector<double> DyadicFilterBank::homogeneous_filter(int j) const {
  std::vector<double> w(radius_.size());
  for (std::size_t s = 0; s < w.size(); ++s) w[s] = radius_[s] > 0.0 ? lp_phi(std::ldexp(radius_[s], -j)) : 0.0;
  return w;
}

std::vector<double> DyadicFilterBank::partial_filter(int j) const {
  if (j < -1) throw std::invalid_argument("dyadic index must be >= -1");
  std::vector<double> w(radius_.size(), 0.0);
  if (j == -1) return w;
  for (std::size_t s = 0; s < w.size(); ++s) w[s] = lp_chi(std::ldexp(radius_[s], -j));
  return w;
}

double DyadicFilterBank::partition_error() const {
  double e = 0.0;
  for (std::size_t s = 0; s < radius_.size(); ++s) {
    double sum = 0.0;
    for (const auto& f : filters_) sum += f[s];
    e = std::max(e, std::abs(sum - 1.0));
  }
  return e;
}

double DyadicFilterBank::overlap(int j, int jp) const {
  const auto& a = filter(j);
  const auto& b = filter(jp);
  double m = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) m = std::max(m, std::abs(a[s] * b[s]));
  return m;
}

SpectralField apply_filter(const SpectralField& fh, const std::vector<double>& w) {
  SpectralField out = fh;
  for (std::size_t s = 0; s < w.size(); ++s) out[s] *= w[s];
  return out;
}

ScalarField dyadic_block(const DyadicFilterBank& bank, const ScalarField& f, int j) {
  if (j < -1) throw std::invalid_argument("dyadic index must be >= -1");
  return inverse(apply_filter(forward(f), bank.filter(j)));
}

ScalarField partial_sum(const DyadicFilterBank& bank, const ScalarField& f, int j) {
  return inverse(apply_filter(forward(f), bank.partial_filter(j)));
}

std::vector<ScalarField> decompose(const DyadicFilterBank& bank, const ScalarField& f) {
  const SpectralField fh = forward(f);
  std::vector<ScalarField> out;
  for (int j = -1; j <= bank.j_max(); ++j) out.push_back(inverse(apply_filter(fh, bank.filter(j))));
  return out;
}

double lp_norm(const ScalarField& f, double p) { return lp_of_samples(f.values, f.grid.cell(), p); }

double lp_norm(const std::vector<ScalarField>& fs, double p) {
  if (fs.empty()) return 0.0;
  return lp_of_samples(grad_fields_norms(fs), fs.front().grid.cell(), p);
}

std::vector<ScalarField> derivatives(const ScalarField& f, int k) {
  if (k < 0) throw std::invalid_argument("derivative order must be nonnegative");
  const int d = spatial_dimension(f.grid);
  std::vector<SpectralField> cur{forward(f)};
  for (int o = 0; o < k; ++o) {
    std::vector<SpectralField> next;
    for (const auto& c : cur)
      for (int a = 0; a < d; ++a) next.push_back(derivative(c, Axis(a)));
    cur = std::move(next);
  }
  std::vector<ScalarField> out;
  for (const auto& c : cur) out.push_back(inverse(c));
  return out;
}

double besov_norm(const DyadicFilterBank& bank, const ScalarField& f, double s, double p, double q) {
  check_exponent(p, "p");
  check_exponent(q, "q");
  const SpectralField fh = forward(f);
  std::vector<double> terms;
  for (int j = -1; j <= bank.j_max(); ++j)
    terms.push_back(std::pow(2.0, j * s) * lp_norm(inverse(apply_filter(fh, bank.filter(j))), p));
  return lq_sum(terms, q);
}

double homogeneous_besov_norm(const DyadicFilterBank& bank, const ScalarField& f, double s, double p, double q) {
  check_exponent(p, "p");
  check_exponent(q, "q");
  const SpectralField fh = forward(f);
  std::vector<double> terms;
  for (int j = bank.j_min_homogeneous(); j <= bank.j_max(); ++j)
    terms.push_back(std::pow(2.0, j * s) * lp_norm(inverse(apply_filter(fh, bank.homogeneous_filter(j))), p));
  return lq_sum(terms, q);
}

BernsteinReport bernstein_check(const ScalarField& f, int j, int k, double p, double q, Support support) {
  check_exponent(p, "p");
  check_exponent(q, "q");
  if (q < p) throw std::invalid_argument("integrability gain needs q >= p");
  const SpectrumExtent e = spectrum_extent(f);
  if (e.empty) throw std::invalid_argument("zero field has no spectral support");
  const double lo = std::ldexp(1.0, j - 1), hi = std::ldexp(1.0, support == Support::annulus ? j + 1 : j);
  const double tol = 1e-12 * hi;
  if (e.rmax > hi + tol || (support == Support::annulus && e.rmin < lo - tol))
    throw std::invalid_argument("spectrum leaves the dyadic support for j = " + std::to_string(j));

  BernsteinReport r;
  r.j = j;
  r.k = k;
  r.p = p;
  r.q = q;
  r.support = support;
  r.min_radius = e.rmin;
  r.max_radius = e.rmax;
  const double fp = lp_norm(f, p);
  r.derivative_ratio = lp_norm(derivatives(f, k), p) / (std::ldexp(1.0, j * k) * fp);
  const int d = spatial_dimension(f.grid);
  r.integrability_ratio = lp_norm(f, q) / (std::pow(2.0, j * d * (1.0 / p - 1.0 / q)) * fp);
  return r;
}

BernsteinReport bernstein_check(const ScalarField& f, int k, double p, double q, Support support) {
  const SpectrumExtent e = spectrum_extent(f);
  if (e.empty) throw std::invalid_argument("zero field has no spectral support");
  const double shift = support == Support::annulus ? 1.0 : 0.0;
  const int j = int(std::ceil(std::log2(e.rmax) - shift - 1e-12));
  return bernstein_check(f, j, k, p, q, support);
}

double stability_factor(const std::vector<double>& ratios) {
  if (ratios.empty()) throw std::invalid_argument("no ratios supplied");
  const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
  if (!(*mn > 0.0)) throw std::invalid_argument("ratios must be positive");
  return *mx / *mn;
}

double tail_exponent(double p, int d) {
  if (!(p >= 1.0 && p <= 2.0) || !(1.0 / p < 1.0 / d + 0.5))
    throw std::invalid_argument("tail bound needs 1 <= p <= 2 and 1/p < 1/d + 1/2");
  return 1.0 - d * (1.0 / p - 0.5);
}

double tail_constant(int j, double p, int d) {
  const double beta = tail_exponent(p, d);
  return std::sqrt(1.0 / (1.0 - std::pow(2.0, -2.0 * beta))) * std::pow(2.0, -beta * (j - 1));
}

TailBoundReport tail_bound_check(const DyadicFilterBank& bank, const ScalarField& f, int j, double p) {
  if (j < 0) throw std::invalid_argument("tail bound is stated for j >= 0");
  const int d = spatial_dimension(f.grid);
  TailBoundReport r;
  r.j = j;
  r.p = p;
  r.beta = tail_exponent(p, d);
  r.constant = tail_constant(j, p, d);

  const SpectralField fh = forward(f);
  std::vector<double> hi = bank.partial_filter(j);
  for (double& w : hi) w = 1.0 - w;
  r.lhs = std::sqrt(l2_norm_sq(apply_filter(fh, hi)));

  std::vector<SpectralField> grads;
  for (int a = 0; a < d; ++a) grads.push_back(derivative(fh, Axis(a)));
  double sup = 0.0;
  for (int jj = -1; jj <= bank.j_max(); ++jj) {
    std::vector<ScalarField> block;
    for (const auto& g : grads) block.push_back(inverse(apply_filter(g, bank.filter(jj))));
    sup = std::max(sup, lp_norm(block, p));
  }
  r.rhs = r.constant * sup;
  r.pass = r.lhs <= r.rhs;
  return r;
}

std::vector<TailBoundReport> tail_bound_sweep(const DyadicFilterBank& bank, const ScalarField& f, int j_lo, int j_hi,
                                              double p) {
  std::vector<TailBoundReport> out;
  for (int j = j_lo; j <= j_hi; ++j) out.push_back(tail_bound_check(bank, f, j, p));
  return out;
}

double low_order_ratio(const ScalarField& f, double p) {
  const double den = lp_norm(f, p) + lp_norm(derivatives(f, 1), 2.0);
  if (!(den > 0.0)) throw std::invalid_argument("zero field");
  return lp_norm(f, 2.0) / den;
}

double embedding_ratio(const DyadicFilterBank& bank, const ScalarField& f, double p) {
  if (!(p >= 2.0) || std::isinf(p)) throw std::invalid_argument("embedding check needs 2 <= p < inf");
  SpectralField fh = forward(f);
  fh[0] = 0.0;
  const ScalarField g = inverse(fh);
  const double b = homogeneous_besov_norm(bank, g, 0.0, p, 2.0);
  if (!(b > 0.0)) throw std::invalid_argument("field has no oscillating part");
  return lp_norm(g, p) / b;
}

ScalarField random_band_field(const Grid& g, double rlo, double rhi, unsigned long long seed, bool same_phase) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  const Lattice& L = lattice(g);
  SpectralField h(g, Parity::even);
  for (std::size_t s = 0; s < L.size(); ++s) {
    if (L.nyq1[s] || L.nyq2[s] || L.nyq3[s]) continue;
    const double r = std::sqrt(L.zeta(s));
    if (r < rlo || r > rhi) continue;
    h[s] = same_phase ? cplx(1.0, 0.0) : cplx(N(rng), N(rng));
  }
  return project_parity(inverse(h), Parity::even);
}

ScalarField random_sobolev_field(const Grid& g, double s, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  const Lattice& L = lattice(g);
  const double expo = -(0.5 * s + 0.25 * spatial_dimension(g));
  SpectralField h(g, Parity::even);
  for (std::size_t i = 1; i < L.size(); ++i) {
    if (L.nyq1[i] || L.nyq2[i] || L.nyq3[i]) continue;
    h[i] = std::pow(1.0 + L.zeta(i), expo) * cplx(N(rng), N(rng));
  }
  return project_parity(inverse(h), Parity::even);
}

}  // namespace nskqg
