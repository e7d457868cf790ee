#include "nskqg/spectral_grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace nskqg {

namespace {

bool pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct Plan {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  Lattice lat;
  ~Plan() {
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

// FFTW's planner is not thread-safe; execution with the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

Lattice build_lattice(const Grid& g) {
  Lattice L;
  const std::size_t n = g.spectral_size();
  L.xi1.resize(n); L.xi2.resize(n); L.kz.resize(n);
  L.m1.resize(n); L.m2.resize(n); L.m3.resize(n);
  L.weight.resize(n); L.keep.resize(n);
  L.nyq1.resize(n); L.nyq2.resize(n); L.nyq3.resize(n);
  const double dk = 2.0 * M_PI / g.Lh;
  const int ch = g.Nh / 3;
  std::size_t s = 0;
  if (g.planar()) {
    const int nz = g.Nh / 2 + 1;
    for (int i = 0; i < g.Nh; ++i)
      for (int j = 0; j < nz; ++j, ++s) {
        const int a = g.signed_index(i);
        L.m1[s] = a; L.m2[s] = j; L.m3[s] = 0;
        L.xi1[s] = dk * a; L.xi2[s] = dk * j; L.kz[s] = 0.0;
        L.weight[s] = (j == 0 || j == g.Nh / 2) ? 1.0 : 2.0;
        L.keep[s] = std::abs(a) <= ch && j <= ch;
        L.nyq1[s] = a == -g.Nh / 2;
        L.nyq2[s] = j == g.Nh / 2;
        L.nyq3[s] = 0;
      }
    return L;
  }
  const int nz = g.Nv / 2 + 1;
  const int cv = g.Nv / 3;
  for (int i = 0; i < g.Nh; ++i)
    for (int j = 0; j < g.Nh; ++j)
      for (int m = 0; m < nz; ++m, ++s) {
        const int a = g.signed_index(i), b = g.signed_index(j);
        L.m1[s] = a; L.m2[s] = b; L.m3[s] = m;
        L.xi1[s] = dk * a; L.xi2[s] = dk * b; L.kz[s] = M_PI * m;
        L.weight[s] = (m == 0 || m == g.Nv / 2) ? 1.0 : 2.0;
        L.keep[s] = std::abs(a) <= ch && std::abs(b) <= ch && m <= cv;
        L.nyq1[s] = a == -g.Nh / 2;
        L.nyq2[s] = b == -g.Nh / 2;
        L.nyq3[s] = m == g.Nv / 2;
      }
  return L;
}

const Plan& plan_for(const Grid& g) {
  static std::map<std::tuple<int, int, double>, std::unique_ptr<Plan>> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto key = std::make_tuple(g.Nh, g.Nv, g.Lh);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  auto p = std::make_unique<Plan>();
  std::vector<double> in(g.size());
  std::vector<cplx> out(g.spectral_size());
  auto* cin = reinterpret_cast<fftw_complex*>(out.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (g.planar()) {
    p->r2c = fftw_plan_dft_r2c_2d(g.Nh, g.Nh, in.data(), cin, flags);
    p->c2r = fftw_plan_dft_c2r_2d(g.Nh, g.Nh, cin, in.data(), flags);
  } else {
    p->r2c = fftw_plan_dft_r2c_3d(g.Nh, g.Nh, g.Nv, in.data(), cin, flags);
    p->c2r = fftw_plan_dft_c2r_3d(g.Nh, g.Nh, g.Nv, cin, in.data(), flags);
  }
  if (!p->r2c || !p->c2r) throw std::runtime_error("fftw planning failed");
  p->lat = build_lattice(g);
  const Plan& ref = *p;
  cache.emplace(key, std::move(p));
  return ref;
}

void check_same(const Grid& a, const Grid& b) {
  if (!(a == b)) throw std::invalid_argument("grid mismatch between operands");
}

}  // namespace

std::size_t Grid::spectral_size() const {
  if (planar()) return std::size_t(Nh) * (Nh / 2 + 1);
  return std::size_t(Nh) * Nh * (Nv / 2 + 1);
}

double Grid::kh(int i) const { return 2.0 * M_PI / Lh * signed_index(i); }

Grid make_grid(int Nh, int Nv, double Lh) {
  if (!pow2(Nh) || Nh < 8) throw std::invalid_argument("Nh must be a power of two >= 8");
  if (!pow2(Nv) || Nv < 4) throw std::invalid_argument("Nv must be a power of two >= 4");
  if (!(Lh > 0.0) || !std::isfinite(Lh)) throw std::invalid_argument("Lh must be positive");
  return Grid{Nh, Nv, Lh};
}

Grid make_plane(int Nh, double Lh) {
  if (!pow2(Nh) || Nh < 8) throw std::invalid_argument("Nh must be a power of two >= 8");
  if (!(Lh > 0.0) || !std::isfinite(Lh)) throw std::invalid_argument("Lh must be positive");
  return Grid{Nh, 1, Lh};
}

const Lattice& lattice(const Grid& g) { return plan_for(g).lat; }

std::vector<double> horizontal_wavenumbers(const Grid& g) {
  std::vector<double> k(g.Nh);
  for (int i = 0; i < g.Nh; ++i) k[i] = g.kh(i);
  return k;
}

std::size_t half_size(const Grid& g) { return std::size_t(g.Nh) * g.Nh * (g.Nv / 2 + 1); }

ScalarField symmetric_extension(const Grid& g, const std::vector<double>& f_half, Parity parity) {
  if (g.planar()) throw std::invalid_argument("symmetric_extension needs a 3-D grid");
  const int nh = g.Nv / 2 + 1;
  if (f_half.size() != half_size(g)) throw std::invalid_argument("half-interval field has the wrong size");
  ScalarField f(g, parity);
  double scale = 0.0;
  for (double v : f_half) scale = std::max(scale, std::abs(v));
  const double sign = parity == Parity::even ? 1.0 : -1.0;
  for (int i = 0; i < g.Nh; ++i)
    for (int j = 0; j < g.Nh; ++j) {
      const double* col = &f_half[(std::size_t(i) * g.Nh + j) * nh];
      if (parity == Parity::odd && std::abs(col[0]) > 1e-12 * scale)
        throw std::invalid_argument("odd extension of a field with nonzero trace at x3 = 0");
      for (int n = 0; n < g.Nv; ++n) {
        double v;
        if (n >= g.Nv / 2) v = col[n - g.Nv / 2];
        else v = sign * col[g.Nv / 2 - n];
        // x3 = -1 is the seam of the periodic extension: odd fields take the jump midpoint
        if (n == 0 && parity == Parity::odd) v = 0.0;
        if (n == g.Nv / 2 && parity == Parity::odd) v = 0.0;
        f.values[g.idx(i, j, n)] = v;
      }
    }
  return f;
}

bool has_parity(const ScalarField& f, double tol) {
  const Grid& g = f.grid;
  if (g.planar()) return true;
  const double sign = f.parity == Parity::even ? 1.0 : -1.0;
  const double scale = std::max(1.0, max_abs(f));
  for (int i = 0; i < g.Nh; ++i)
    for (int j = 0; j < g.Nh; ++j)
      for (int n = 0; n < g.Nv; ++n) {
        const int m = (g.Nv - n) % g.Nv;
        if (std::abs(f.values[g.idx(i, j, n)] - sign * f.values[g.idx(i, j, m)]) > tol * scale) return false;
      }
  return true;
}

ScalarField project_parity(const ScalarField& f, Parity p) {
  const Grid& g = f.grid;
  ScalarField out(g, p);
  if (g.planar()) {
    out.values = f.values;
    return out;
  }
  const double sign = p == Parity::even ? 1.0 : -1.0;
  for (int i = 0; i < g.Nh; ++i)
    for (int j = 0; j < g.Nh; ++j)
      for (int n = 0; n < g.Nv; ++n) {
        const int m = (g.Nv - n) % g.Nv;
        out.values[g.idx(i, j, n)] = 0.5 * (f.values[g.idx(i, j, n)] + sign * f.values[g.idx(i, j, m)]);
      }
  return out;
}

SpectralField forward(const ScalarField& f) {
  const Grid& g = f.grid;
  if (f.values.size() != g.size()) throw std::invalid_argument("field size does not match its grid");
  const Plan& p = plan_for(g);
  std::vector<double> in(f.values);
  SpectralField out(g, f.parity);
  fftw_execute_dft_r2c(p.r2c, in.data(), reinterpret_cast<fftw_complex*>(out.coeffs.data()));
  const double inv = 1.0 / double(g.size());
  for (auto& c : out.coeffs) c *= inv;
  return out;
}

ScalarField inverse(const SpectralField& fh) {
  const Grid& g = fh.grid;
  if (fh.coeffs.size() != g.spectral_size()) throw std::invalid_argument("spectral size does not match its grid");
  const Plan& p = plan_for(g);
  std::vector<cplx> in(fh.coeffs);
  ScalarField out(g, fh.parity);
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(in.data()), out.values.data());
  return out;
}

SpectralField derivative(const SpectralField& fh, Axis axis) {
  const Grid& g = fh.grid;
  if (g.planar() && axis == Axis::x3) throw std::invalid_argument("no vertical axis on a planar grid");
  const Lattice& L = lattice(g);
  SpectralField out(g, axis == Axis::x3 ? flip(fh.parity) : fh.parity);
  const std::vector<double>& k = axis == Axis::x1 ? L.xi1 : axis == Axis::x2 ? L.xi2 : L.kz;
  const std::vector<unsigned char>& nyq = axis == Axis::x1 ? L.nyq1 : axis == Axis::x2 ? L.nyq2 : L.nyq3;
  for (std::size_t s = 0; s < L.size(); ++s) {
    if (nyq[s]) continue;
    const cplx c = fh.coeffs[s];
    out.coeffs[s] = cplx(-k[s] * c.imag(), k[s] * c.real());
  }
  return out;
}

SpectralField laplacian_h(const SpectralField& fh) {
  const Lattice& L = lattice(fh.grid);
  SpectralField out(fh.grid, fh.parity);
  for (std::size_t s = 0; s < L.size(); ++s)
    out.coeffs[s] = -(L.xi1[s] * L.xi1[s] + L.xi2[s] * L.xi2[s]) * fh.coeffs[s];
  return out;
}

SpectralField laplacian(const SpectralField& fh) {
  const Lattice& L = lattice(fh.grid);
  SpectralField out(fh.grid, fh.parity);
  for (std::size_t s = 0; s < L.size(); ++s) out.coeffs[s] = -L.zeta(s) * fh.coeffs[s];
  return out;
}

std::array<SpectralField, 3> grad(const SpectralField& fh) {
  if (fh.grid.planar())
    return {derivative(fh, Axis::x1), derivative(fh, Axis::x2), SpectralField(fh.grid, flip(fh.parity))};
  return {derivative(fh, Axis::x1), derivative(fh, Axis::x2), derivative(fh, Axis::x3)};
}

SpectralField div(const std::array<SpectralField, 3>& vh) {
  SpectralField out = derivative(vh[0], Axis::x1);
  out += derivative(vh[1], Axis::x2);
  if (!vh[2].grid.planar()) out += derivative(vh[2], Axis::x3);
  return out;
}

SpectralField div_h(const SpectralField& v1, const SpectralField& v2) {
  SpectralField out = derivative(v1, Axis::x1);
  out += derivative(v2, Axis::x2);
  return out;
}

std::array<SpectralField, 2> perp_grad_h(const SpectralField& fh) {
  SpectralField a = derivative(fh, Axis::x2);
  a *= -1.0;
  return {a, derivative(fh, Axis::x1)};
}

void dealias_inplace(SpectralField& fh) {
  const Lattice& L = lattice(fh.grid);
  for (std::size_t s = 0; s < L.size(); ++s)
    if (!L.keep[s]) fh.coeffs[s] = 0.0;
}

SpectralField dealias(const SpectralField& fh) {
  SpectralField out = fh;
  dealias_inplace(out);
  return out;
}

double integral(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.grid.cell();
}

double l2_norm_sq(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values) s += v * v;
  return s * f.grid.cell();
}

double l2_norm_sq(const SpectralField& fh) {
  const Lattice& L = lattice(fh.grid);
  double s = 0.0;
  for (std::size_t i = 0; i < L.size(); ++i) s += L.weight[i] * std::norm(fh.coeffs[i]);
  return s * fh.grid.volume();
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

SpectralField& operator+=(SpectralField& a, const SpectralField& b) {
  check_same(a.grid, b.grid);
  for (std::size_t s = 0; s < a.coeffs.size(); ++s) a.coeffs[s] += b.coeffs[s];
  return a;
}

SpectralField& operator*=(SpectralField& a, double s) {
  for (auto& c : a.coeffs) c *= s;
  return a;
}

ScalarField& operator+=(ScalarField& a, const ScalarField& b) {
  check_same(a.grid, b.grid);
  for (std::size_t s = 0; s < a.values.size(); ++s) a.values[s] += b.values[s];
  return a;
}

ScalarField& operator*=(ScalarField& a, double s) {
  for (auto& v : a.values) v *= s;
  return a;
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  check_same(a.grid, b.grid);
  ScalarField out(a.grid, a.parity == b.parity ? Parity::even : Parity::odd);
  for (std::size_t s = 0; s < a.values.size(); ++s) out.values[s] = a.values[s] * b.values[s];
  return out;
}

}  // namespace nskqg
