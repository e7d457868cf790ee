#pragma once
// Periodic box [0,Lh)^2 x [-1,1) with real-to-complex FFTs, spectral
// differentiation, 2/3 dealiasing and the vertical even/odd extension.
//
// A grid with Nv == 1 is a horizontal plane (used by the 2-D limit solver).
// Physical samples are row-major with the last axis fastest; the spectral
// layout halves the last axis (vertical in 3-D, x2 in the plane).

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace nskqg {

using cplx = std::complex<double>;

enum class Parity { even, odd };

inline Parity flip(Parity p) { return p == Parity::even ? Parity::odd : Parity::even; }

struct Grid {
  int Nh = 0;
  int Nv = 0;
  double Lh = 0.0;
  static constexpr double Lv = 2.0;

  bool planar() const { return Nv == 1; }
  std::size_t size() const { return std::size_t(Nh) * Nh * Nv; }
  std::size_t spectral_size() const;
  double dx() const { return Lh / Nh; }
  double dz() const { return Lv / Nv; }
  double volume() const { return planar() ? Lh * Lh : Lh * Lh * Lv; }
  double cell() const { return volume() / double(size()); }

  double x1(int i) const { return i * dx(); }
  double x2(int j) const { return j * dx(); }
  double x3(int n) const { return -1.0 + n * dz(); }

  // signed DFT index for a full (non-halved) horizontal axis
  int signed_index(int i) const { return i < Nh / 2 ? i : i - Nh; }
  double kh(int i) const;

  std::size_t idx(int i, int j, int n) const { return (std::size_t(i) * Nh + j) * Nv + n; }
  std::size_t idx(int i, int j) const { return std::size_t(i) * Nh + j; }

  bool operator==(const Grid& o) const { return Nh == o.Nh && Nv == o.Nv && Lh == o.Lh; }
};

Grid make_grid(int Nh, int Nv, double Lh);
Grid make_plane(int Nh, double Lh);

struct ScalarField {
  Grid grid;
  std::vector<double> values;
  Parity parity = Parity::even;

  ScalarField() = default;
  ScalarField(const Grid& g, Parity p = Parity::even) : grid(g), values(g.size(), 0.0), parity(p) {}
  double& operator[](std::size_t s) { return values[s]; }
  double operator[](std::size_t s) const { return values[s]; }
};

struct VectorField {
  std::array<ScalarField, 3> c;

  VectorField() = default;
  explicit VectorField(const Grid& g)
      : c{ScalarField(g, Parity::even), ScalarField(g, Parity::even), ScalarField(g, Parity::odd)} {}
  ScalarField& operator[](int a) { return c[a]; }
  const ScalarField& operator[](int a) const { return c[a]; }
  const Grid& grid() const { return c[0].grid; }
};

struct SpectralField {
  Grid grid;
  std::vector<cplx> coeffs;
  Parity parity = Parity::even;

  SpectralField() = default;
  SpectralField(const Grid& g, Parity p = Parity::even) : grid(g), coeffs(g.spectral_size(), 0.0), parity(p) {}
  cplx& operator[](std::size_t s) { return coeffs[s]; }
  cplx operator[](std::size_t s) const { return coeffs[s]; }
};

// Wavevector table for the stored (halved) spectral layout.
struct Lattice {
  std::vector<double> xi1, xi2, kz;   // physical wavenumbers
  std::vector<int> m1, m2, m3;        // signed integer indices
  std::vector<double> weight;         // Parseval multiplicity (1 or 2)
  std::vector<unsigned char> keep;    // inside the 2/3 band
  std::vector<unsigned char> nyq1, nyq2, nyq3;
  std::size_t size() const { return xi1.size(); }
  double zeta(std::size_t s) const { return xi1[s] * xi1[s] + xi2[s] * xi2[s] + kz[s] * kz[s]; }
};

const Lattice& lattice(const Grid& g);

// Horizontal wavenumbers along one full axis, in storage order.
std::vector<double> horizontal_wavenumbers(const Grid& g);

ScalarField symmetric_extension(const Grid& g, const std::vector<double>& f_half, Parity parity);
std::size_t half_size(const Grid& g);
bool has_parity(const ScalarField& f, double tol = 1e-12);
ScalarField project_parity(const ScalarField& f, Parity p);

SpectralField forward(const ScalarField& f);
ScalarField inverse(const SpectralField& fh);

enum class Axis { x1 = 0, x2 = 1, x3 = 2 };

SpectralField derivative(const SpectralField& fh, Axis axis);
SpectralField laplacian_h(const SpectralField& fh);
SpectralField laplacian(const SpectralField& fh);
std::array<SpectralField, 3> grad(const SpectralField& fh);
SpectralField div(const std::array<SpectralField, 3>& vh);
SpectralField div_h(const SpectralField& v1, const SpectralField& v2);
std::array<SpectralField, 2> perp_grad_h(const SpectralField& fh);

SpectralField dealias(const SpectralField& fh);
void dealias_inplace(SpectralField& fh);

// Integrals over the box.
double integral(const ScalarField& f);
double l2_norm_sq(const ScalarField& f);
double l2_norm_sq(const SpectralField& fh);  // Parseval
double max_abs(const ScalarField& f);

SpectralField& operator+=(SpectralField& a, const SpectralField& b);
SpectralField& operator*=(SpectralField& a, double s);
ScalarField& operator+=(ScalarField& a, const ScalarField& b);
ScalarField& operator*=(ScalarField& a, double s);

// Pointwise product with parity bookkeeping.
ScalarField multiply(const ScalarField& a, const ScalarField& b);

}  // namespace nskqg
