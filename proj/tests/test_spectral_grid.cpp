#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <utility>

#include "nskqg/spectral_grid.hpp"
#include "test_util.hpp"

using namespace nskqg;
using test::mode_index;
using test::sample;

namespace {

ScalarField noise(const Grid& g, unsigned seed, Parity p = Parity::even) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  ScalarField f(g, p);
  for (auto& v : f.values) v = n(rng);
  return g.planar() ? f : project_parity(f, p);
}

}  // namespace

TEST(Grid, HorizontalLattice) {
  Grid g = make_grid(8, 4, 2 * M_PI);
  auto k = horizontal_wavenumbers(g);
  std::sort(k.begin(), k.end());
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(k[i], i - 4, 1e-14);
}

TEST(Grid, SmallestWavenumber) {
  Grid g = make_grid(16, 8, 4 * M_PI);
  double kmin = INFINITY;
  for (double k : horizontal_wavenumbers(g))
    if (k != 0.0) kmin = std::min(kmin, std::abs(k));
  EXPECT_NEAR(kmin, 0.5, 1e-14);
}

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(make_grid(7, 4, 1.0), std::invalid_argument);
  EXPECT_THROW(make_grid(8, 3, 1.0), std::invalid_argument);
  EXPECT_THROW(make_grid(8, 4, 0.0), std::invalid_argument);
  EXPECT_THROW(make_plane(12, 1.0), std::invalid_argument);
}

TEST(Extension, EvenCosineUnchanged) {
  Grid g = make_grid(8, 8, 2 * M_PI);
  const int nh = g.Nv / 2 + 1;
  std::vector<double> half(half_size(g));
  for (std::size_t c = 0; c < half.size(); ++c) half[c] = std::cos(M_PI * (c % nh) * g.dz());
  ScalarField f = symmetric_extension(g, half, Parity::even);
  ScalarField want = sample(g, [](double, double, double z) { return std::cos(M_PI * z); });
  EXPECT_LT(test::max_diff(f, want), 1e-14);
}

TEST(Extension, OddSawtoothIsSineOnly) {
  Grid g = make_grid(8, 16, 2 * M_PI);
  const int nh = g.Nv / 2 + 1;
  std::vector<double> half(half_size(g));
  for (std::size_t c = 0; c < half.size(); ++c) half[c] = (c % nh) * g.dz();
  ScalarField f = symmetric_extension(g, half, Parity::odd);
  EXPECT_TRUE(has_parity(f));
  for (int n = 1; n < g.Nv; ++n)
    if (n != g.Nv / 2) EXPECT_NEAR(f[g.idx(0, 0, n)], g.x3(n), 1e-14);
  // odd in x3 means purely imaginary vertical coefficients
  SpectralField fh = forward(f);
  for (const cplx& c : fh.coeffs) EXPECT_LT(std::abs(c.real()), 1e-14);
}

TEST(Extension, OddConstantRejected) {
  Grid g = make_grid(8, 4, 2 * M_PI);
  std::vector<double> half(half_size(g), 1.0);
  EXPECT_THROW(symmetric_extension(g, half, Parity::odd), std::invalid_argument);
}

TEST(Transform, ConstantIsZeroMode) {
  Grid g = make_grid(8, 4, 2 * M_PI);
  ScalarField f = sample(g, [](double, double, double) { return 1.0; });
  SpectralField fh = forward(f);
  EXPECT_NEAR(std::abs(fh[0] - cplx(1.0)), 0.0, 1e-15);
  for (std::size_t s = 1; s < fh.coeffs.size(); ++s) EXPECT_LT(std::abs(fh[s]), 1e-15);
}

TEST(Transform, SineHasTwoHalfCoefficients) {
  Grid g = make_grid(16, 4, 3.0);
  ScalarField f = sample(g, [&](double x, double, double) { return std::sin(2 * M_PI * x / g.Lh); });
  SpectralField fh = forward(f);
  int count = 0;
  for (const cplx& c : fh.coeffs)
    if (std::abs(c) > 1e-12) {
      ++count;
      EXPECT_NEAR(std::abs(c), 0.5, 1e-14);
    }
  EXPECT_EQ(count, 2);
  EXPECT_NEAR(std::abs(fh[mode_index(g, 1, 0, 0)] - std::conj(fh[mode_index(g, -1, 0, 0)])), 0.0, 1e-15);
}

TEST(Transform, RoundTripAndParseval) {
  for (Grid g : {make_grid(16, 8, 5.0), make_plane(32, 2.0)}) {
    ScalarField f = noise(g, 3);
    ScalarField back = inverse(forward(f));
    double scale = max_abs(f);
    EXPECT_LT(test::max_diff(f, back) / scale, 1e-12);
    const double a = l2_norm_sq(f), b = l2_norm_sq(forward(f));
    EXPECT_NEAR(a, b, 1e-12 * a);
  }
}

TEST(Derivatives, SineToCosine) {
  Grid g = make_grid(16, 4, 2 * M_PI);
  ScalarField f = sample(g, [](double x, double, double) { return std::sin(x); });
  ScalarField d = inverse(derivative(forward(f), Axis::x1));
  EXPECT_LT(test::max_diff(d, sample(g, [](double x, double, double) { return std::cos(x); })), 1e-12);
}

TEST(Derivatives, DivPerpGradVanishes) {
  Grid g = make_grid(16, 8, 7.0);
  SpectralField fh = forward(noise(g, 11));
  auto v = perp_grad_h(fh);
  ScalarField d = inverse(div_h(v[0], v[1]));
  EXPECT_LT(max_abs(d), 1e-12 * max_abs(inverse(v[0])));
}

TEST(Derivatives, LaplacianEigenfunction) {
  Grid g = make_grid(16, 4, 2 * M_PI);
  auto e = [](double x, double y, double) { return std::cos(x + y); };
  ScalarField lap = inverse(laplacian(forward(sample(g, e))));
  ScalarField want = sample(g, [&](double x, double y, double z) { return -2.0 * e(x, y, z); });
  EXPECT_LT(test::max_diff(lap, want), 1e-12);
}

TEST(Derivatives, VerticalDerivativeFlipsParity) {
  Grid g = make_grid(8, 8, 2 * M_PI);
  ScalarField f = sample(g, [](double x, double, double z) { return std::sin(x) * std::cos(M_PI * z); });
  SpectralField d3 = derivative(forward(f), Axis::x3);
  EXPECT_EQ(d3.parity, Parity::odd);
  EXPECT_EQ(derivative(forward(f), Axis::x1).parity, Parity::even);
  ScalarField back = inverse(d3);
  EXPECT_TRUE(has_parity(back));
  ScalarField want = sample(g, [](double x, double, double z) { return -M_PI * std::sin(x) * std::sin(M_PI * z); });
  EXPECT_LT(test::max_diff(back, want), 1e-12);
}

TEST(Dealias, IdempotentAndTopModeRemoved) {
  Grid g = make_grid(16, 8, 2 * M_PI);
  SpectralField fh = dealias(forward(noise(g, 5)));
  SpectralField again = dealias(fh);
  for (std::size_t s = 0; s < fh.coeffs.size(); ++s) EXPECT_EQ(fh[s], again[s]);

  ScalarField top = sample(g, [](double x, double, double) { return std::cos(7.0 * x); });
  SpectralField th = dealias(forward(top));
  for (const cplx& c : th.coeffs) EXPECT_LT(std::abs(c), 1e-14);
}

TEST(Dealias, ProductMatchesDirectConvolution) {
  // Hermitian coefficient sets inside the retained band |m| <= 2 of an N = 8 plane
  Grid g = make_plane(8, 2 * M_PI);
  using Key = std::pair<int, int>;
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n;
  auto coeffs = [&] {
    std::map<Key, cplx> c;
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b) {
        if (c.count({a, b})) continue;
        cplx v(n(rng), (a == 0 && b == 0) ? 0.0 : n(rng));
        c[{a, b}] = v;
        c[{-a, -b}] = std::conj(v);
      }
    return c;
  };
  auto a = coeffs(), b = coeffs();
  auto synth = [&](const std::map<Key, cplx>& c) {
    return sample(g, [&](double x, double y, double) {
      cplx s = 0.0;
      for (auto& [k, v] : c) s += v * std::exp(cplx(0.0, k.first * x + k.second * y));
      return s.real();
    });
  };
  SpectralField ph = dealias(forward(multiply(synth(a), synth(b))));
  std::map<Key, cplx> conv;
  for (auto& [ka, va] : a)
    for (auto& [kb, vb] : b) conv[{ka.first + kb.first, ka.second + kb.second}] += va * vb;
  const Lattice& L = lattice(g);
  double worst = 0.0;
  for (std::size_t s = 0; s < L.size(); ++s) {
    cplx want = L.keep[s] ? conv[{L.m1[s], L.m2[s]}] : cplx(0.0);
    worst = std::max(worst, std::abs(ph[s] - want));
  }
  EXPECT_LT(worst, 1e-12);
}
