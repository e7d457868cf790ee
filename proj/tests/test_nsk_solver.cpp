#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "nskqg/diagnostics.hpp"
#include "nskqg/nsk_solver.hpp"
#include "test_util.hpp"

using namespace nskqg;
using test::sample;

namespace {

// h(rho) = int_1^rho int_1^s t^(gamma-2) dt ds by composite Simpson on both integrals
double internal_energy_oracle(double rho, double gamma) {
  auto simpson = [](auto f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
  };
  auto inner = [&](double s) { return simpson([&](double t) { return std::pow(t, gamma - 2.0); }, 1.0, s, 200); };
  return simpson(inner, 1.0, rho, 200);
}

FluidState smooth_state(const Grid& g, double eps, double amp) {
  ScalarField r0 = sample(g, [](double x, double y, double z) {
    return std::sin(x) * std::cos(y) + 0.5 * std::cos(M_PI * z) * std::cos(x);
  });
  VectorField u0(g);
  u0[0] = sample(g, [&](double, double y, double z) { return amp * std::sin(y) * (1 + 0.3 * std::cos(M_PI * z)); });
  u0[1] = sample(g, [&](double x, double, double) { return amp * 0.5 * std::cos(x); });
  u0[2] = sample(g, [&](double x, double, double z) { return amp * 0.2 * std::sin(x) * std::sin(M_PI * z); }, Parity::odd);
  ScaledParams p;
  p.eps = eps;
  return initialize(r0, u0, p);
}

double state_distance(const FluidState& a, const FluidState& b) {
  double d = l2_norm_sq([&] {
    ScalarField e = a.rho;
    for (std::size_t s = 0; s < e.values.size(); ++s) e[s] -= b.rho[s];
    return e;
  }());
  for (int c = 0; c < 3; ++c) {
    ScalarField e = a.u[c];
    for (std::size_t s = 0; s < e.values.size(); ++s) e[s] -= b.u[c][s];
    d += l2_norm_sq(e);
  }
  return std::sqrt(d);
}

}  // namespace

TEST(Pressure, GammaLaw) {
  EXPECT_DOUBLE_EQ(pressure(1.0, 2.0), 0.5);
  for (double g : {1.2, 1.5, 2.0}) EXPECT_DOUBLE_EQ(pressure(1.0, g), 1.0 / g);
  EXPECT_NEAR(pressure(2.0, 1.5), std::pow(2.0, 1.5) / 1.5, 1e-15);
  EXPECT_NEAR(pressure(2.0, 1.5), 1.8856, 1e-4);
  EXPECT_THROW(pressure(0.0, 2.0), std::domain_error);
}

TEST(Pressure, InternalEnergy) {
  EXPECT_EQ(internal_energy(1.0, 1.5), 0.0);
  EXPECT_NEAR(internal_energy(1.5, 2.0), 0.125, 1e-15);
  EXPECT_NEAR(internal_energy_oracle(1.5, 2.0), 0.125, 1e-12);
  EXPECT_NEAR(internal_energy(2.0, 1.5), internal_energy_oracle(2.0, 1.5), 1e-9);
  EXPECT_NEAR(internal_energy(0.6, 1.3), internal_energy_oracle(0.6, 1.3), 1e-9);
}

TEST(Params, GammaConstraint) {
  ScaledParams p;
  p.alpha = 0.5;
  p.gamma = 1.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.alpha = 0.0;
  EXPECT_NO_THROW(p.validate());
  p.eps = 1.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_DOUBLE_EQ((ScaledParams{0.1, 1.0, 0.05, 2.0}.kappa()), 0.01);
}

TEST(LinearSymbol, ZeroModeAndEigenvalues) {
  ScaledParams p{1.0, 0.0, 0.05, 2.0};
  Mat4 L0 = linear_symbol(AcousticMode{0, 0, 0}, p);
  EXPECT_EQ(L0.row(0).norm(), 0.0);
  EXPECT_EQ(L0.row(3).norm(), 0.0);
  EXPECT_EQ(L0.col(0).norm(), 0.0);
  EXPECT_NEAR(std::abs(L0(1, 2)), 1.0, 1e-15);

  AcousticMode m{1, 0, 1};
  Eigen::ComplexEigenSolver<Mat4> es(linear_symbol(m, p));
  std::array<cplx, 4> dense;
  for (int i = 0; i < 4; ++i) dense[i] = es.eigenvalues()[i];
  EXPECT_LT(multiset_distance(dense, eigenvalues(m, p.eps, p.alpha)), 1e-12);
  EXPECT_EQ(linear_symbol(m, p), linear_symbol(m, p));
}

TEST(Nonlinear, RestStateHasNoTendency) {
  Grid g = make_grid(16, 4, 2 * M_PI);
  auto t = nonlinear_rhs(rest_state(g), ScaledParams{});
  for (int a = 0; a < 3; ++a) EXPECT_EQ(l2_norm_sq(t.momentum_nl[a]), 0.0);
}

TEST(Nonlinear, TransportMatchesFiniteDifferences) {
  Grid g = make_grid(16, 4, 2 * M_PI);
  auto u1 = [](double, double y) { return std::sin(y); };
  auto u2 = [](double x, double) { return 0.5 * std::sin(x); };
  FluidState st = rest_state(g);
  st.u[0] = sample(g, [&](double x, double y, double) { return u1(x, y); });
  st.u[1] = sample(g, [&](double x, double y, double) { return u2(x, y); });
  auto t = nonlinear_rhs(st, ScaledParams{0.5, 1.0, 0.05, 2.0});
  // fourth-order centred differences of -div(u (x) u), evaluated pointwise
  const double h = 1e-3;
  auto d = [&](auto f, double x, double y, int axis) {
    auto at = [&](double s) { return axis == 0 ? f(x + s, y) : f(x, y + s); };
    return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
  };
  auto uu = [&](int i, int j) {
    return [=](double x, double y) { return (i ? u2(x, y) : u1(x, y)) * (j ? u2(x, y) : u1(x, y)); };
  };
  for (int i = 0; i < 2; ++i) {
    ScalarField want = sample(g, [&](double x, double y, double) {
      return -(d(uu(i, 0), x, y, 0) + d(uu(i, 1), x, y, 1));
    });
    EXPECT_LT(test::max_diff(inverse(t.transport[i]), want), 1e-6);
  }
}

TEST(Nonlinear, PressureRemainderTaylor) {
  Grid g = make_grid(32, 4, 2 * M_PI);
  const double eps = 0.5, gamma = 1.5;
  ScaledParams p{eps, 0.0, 0.05, gamma};
  FluidState st = rest_state(g);
  st.rho = sample(g, [](double x, double, double) { return 1.0 + 0.1 * std::sin(x); });
  auto t = nonlinear_rhs(st, p);
  ScalarField want = sample(g, [&](double x, double, double) {
    const double rho = 1.0 + 0.1 * std::sin(x);
    return -(std::pow(rho, gamma - 1.0) - 1.0) * 0.1 * std::cos(x) / (eps * eps);
  });
  EXPECT_LT(test::max_diff(inverse(t.pressure[0]), want), 1e-9);
  EXPECT_NEAR(pressure_remainder(0.3, 0.5, 2.0), 0.045, 1e-15);
  const double d = 0.5 * 0.3;
  EXPECT_NEAR(pressure_remainder(0.3, 0.5, 1.5), (std::pow(1 + d, 1.5) - 1) / 1.5 / 0.25 - d / 0.25, 1e-14);
}

TEST(Initialize, Examples) {
  Grid g = make_grid(8, 4, 2 * M_PI);
  ScaledParams p;
  FluidState rest = initialize(ScalarField(g), VectorField(g), p);
  for (double v : rest.rho.values) EXPECT_EQ(v, 1.0);
  for (int a = 0; a < 3; ++a) EXPECT_EQ(max_abs(rest.u[a]), 0.0);

  p.eps = 0.1;
  ScalarField s = sample(g, [](double x, double, double) { return std::sin(x); });
  FluidState st = initialize(s, VectorField(g), p);
  double mn = INFINITY;
  for (double v : st.rho.values) mn = std::min(mn, v);
  EXPECT_NEAR(mn, 0.9, 1e-15);

  p.eps = 2.0;
  ScalarField bad = s;
  bad *= -0.6;
  EXPECT_THROW(initialize(bad, VectorField(g), p), VacuumError);
}

TEST(Step, RestStateIsFixed) {
  Grid g = make_grid(16, 8, 2 * M_PI);
  for (double alpha : {0.0, 1.0}) {
    NskSolver solver(g, ScaledParams{0.1, alpha, 0.05, 2.0});
    solver.set_state(rest_state(g));
    for (int i = 0; i < 5; ++i) solver.step(0.01);
    FluidState st = solver.state();
    for (double v : st.rho.values) EXPECT_EQ(v, 1.0);
    for (int a = 0; a < 3; ++a) EXPECT_EQ(max_abs(st.u[a]), 0.0);
  }
}

TEST(Step, LinearModeRotatesOnEigenfrequencies) {
  Grid g = make_grid(16, 8, 2 * M_PI);
  ScaledParams p{0.3, 1.0, 0.05, 2.0};
  const std::size_t s = test::mode_index(g, 1, 0, 1);
  AcousticMode m = grid_mode(g, s);
  EXPECT_NEAR(m.k, M_PI, 1e-15);
  Eigen::ComplexEigenSolver<Mat4> es(linear_symbol(m, p));
  const auto closed = eigenvalues(m, p.eps, p.alpha);
  SolverOptions opt;
  opt.nonlinear = false;
  for (int e = 0; e < 4; ++e) {
    NskSolver solver(g, p, opt);
    NskSolver::Spectral x{SpectralField(g), SpectralField(g), SpectralField(g), SpectralField(g, Parity::odd)};
    Vec4 v = es.eigenvectors().col(e);
    for (int c = 0; c < 4; ++c) x[c][s] = 1e-3 * v[c];
    solver.set_spectral(x, 0.0);
    const double dt = 0.013;
    for (int i = 0; i < 7; ++i) solver.step(dt);
    // match the dense eigenvalue to its closed-form twin
    cplx lam = closed[0];
    for (auto l : closed)
      if (std::abs(l - es.eigenvalues()[e]) < std::abs(lam - es.eigenvalues()[e])) lam = l;
    const cplx phase = std::exp(-lam * solver.time() / p.eps);
    for (int c = 0; c < 4; ++c) EXPECT_LT(std::abs(solver.spectral()[c][s] - 1e-3 * v[c] * phase), 1e-14);
  }
}

TEST(Step, LinearPropagatorIsSymmetrizerIsometry) {
  Grid g = make_grid(16, 8, 2 * M_PI);
  for (double alpha : {0.0, 0.5, 1.0}) {
    ScaledParams p{0.2, alpha, 0.05, 2.0};
    SolverOptions opt;
    opt.nonlinear = false;
    NskSolver solver(g, p, opt);
    solver.set_state(smooth_state(g, p.eps, 0.5));
    const double e0 = solver.symmetrizer_energy();
    for (int i = 0; i < 10; ++i) {
      solver.step(0.01);
      EXPECT_NEAR(solver.symmetrizer_energy(), e0, 1e-10 * e0);
    }
  }
}

TEST(Step, SelfConvergenceIsSecondOrder) {
  Grid g = make_grid(16, 4, 2 * M_PI);
  ScaledParams p{0.5, 1.0, 0.05, 2.0};
  auto run = [&](double dt) {
    NskSolver solver(g, p);
    solver.set_state(smooth_state(g, p.eps, 0.5));
    const int n = int(std::lround(0.2 / dt));
    for (int i = 0; i < n; ++i) solver.step(dt);
    return solver.state();
  };
  std::vector<double> dts{0.02, 0.01, 0.005, 0.0025};
  std::vector<FluidState> runs;
  for (double dt : dts) runs.push_back(run(dt));
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    lx.push_back(std::log(dts[i]));
    ly.push_back(std::log(state_distance(runs[i], runs[i + 1])));
  }
  const double mx = (lx[0] + lx[1] + lx[2]) / 3, my = (ly[0] + ly[1] + ly[2]) / 3;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  EXPECT_GE(sxy / sxx, 1.8);
}

TEST(Step, PreservesParityAndCoriolisDoesNoWork) {
  Grid g = make_grid(16, 8, 2 * M_PI);
  ScaledParams p{0.3, 1.0, 0.05, 2.0};
  NskSolver solver(g, p);
  solver.set_state(smooth_state(g, p.eps, 0.5));
  for (int i = 0; i < 5; ++i) solver.step(solver.default_dt(0.01));
  FluidState st = solver.state();
  EXPECT_TRUE(has_parity(st.rho, 1e-10));
  for (int a = 0; a < 3; ++a) EXPECT_TRUE(has_parity(st.u[a], 1e-10));
  EXPECT_EQ(st.u[2].parity, Parity::odd);
  EXPECT_LT(std::abs(coriolis_power(st)), 1e-12);
}

TEST(Step, Breakdowns) {
  Grid g = make_grid(16, 4, 2 * M_PI);
  ScaledParams p{0.5, 1.0, 0.05, 2.0};
  NskSolver solver(g, p);
  solver.set_state(smooth_state(g, p.eps, 5.0));
  EXPECT_THROW(solver.step(10.0), CflError);
  EXPECT_THROW(solver.step(-1.0), std::invalid_argument);
  const double dt = solver.default_dt(0.05);
  EXPECT_GT(dt, 0.0);
  EXPECT_LE(dt, 0.05);
  EXPECT_THROW(NskSolver(make_plane(16, 1.0), p), std::invalid_argument);
}

TEST(Step, FreeFunctionMatchesSolver) {
  Grid g = make_grid(16, 4, 2 * M_PI);
  ScaledParams p{0.5, 1.0, 0.05, 2.0};
  FluidState s0 = smooth_state(g, p.eps, 0.3);
  FluidState a = step(s0, 0.01, p);
  NskSolver solver(g, p);
  solver.set_state(s0);
  solver.step(0.01);
  EXPECT_LT(state_distance(a, solver.state()), 1e-14);
  EXPECT_NEAR(a.time, 0.01, 1e-15);
}
