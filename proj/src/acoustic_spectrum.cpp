#include "nskqg/acoustic_spectrum.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nskqg {

namespace {

const cplx I(0.0, 1.0);

AcousticSymbol build(const AcousticMode& m, double w) {
  AcousticSymbol s;
  s.A.setZero();
  s.A(0, 1) = I * m.xi1;
  s.A(0, 2) = I * m.xi2;
  s.A(0, 3) = I * m.k;
  s.A(1, 0) = I * (m.xi1 * w);
  s.A(2, 0) = I * (m.xi2 * w);
  s.A(3, 0) = I * (m.k * w);
  s.A(1, 2) = -1.0;
  s.A(2, 1) = 1.0;
  s.S << w, 1.0, 1.0, 1.0;
  return s;
}

std::array<cplx, 4> closed_form(const AcousticMode& m, double w) {
  const double zeta = m.zeta();
  const double b = 1.0 + w * zeta;
  const double c = m.k * m.k * w;
  const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * c));
  const double big = 0.5 * (b + disc);
  const double small = big > 0.0 ? c / big : 0.0;  // product of the two roots is c
  const double wb = std::sqrt(big), ws = std::sqrt(small);
  return {cplx(0.0, -wb), cplx(0.0, -ws), cplx(0.0, ws), cplx(0.0, wb)};
}

// Hermitian H = i S^{1/2} A S^{-1/2}, built entrywise so it is exactly Hermitian.
Mat4 symmetrized_hermitian(const AcousticSymbol& s) {
  const double sw = std::sqrt(s.weight());
  Mat4 B = Mat4::Zero();
  for (int j = 1; j < 4; ++j) {
    // A(0,j) = i a_j, A(j,0) = i a_j w  ->  B(0,j) = B(j,0) = i a_j sqrt(w)
    const double a = s.A(0, j).imag();
    B(0, j) = I * (a * sw);
    B(j, 0) = I * (a * sw);
  }
  B(1, 2) = s.A(1, 2);
  B(2, 1) = s.A(2, 1);
  return I * B;
}

}  // namespace

double capillary_weight(double eps, double alpha, double zeta) {
  return 1.0 + std::pow(eps, 2.0 * alpha) * zeta;
}

AcousticSymbol assemble(const AcousticMode& m, double eps, double alpha) {
  AcousticSymbol s = build(m, capillary_weight(eps, alpha, m.zeta()));
  s.eps = eps;
  s.alpha = alpha;
  return s;
}

AcousticSymbol assemble_kappa(const AcousticMode& m, double kappa) {
  AcousticSymbol s = build(m, 1.0 + kappa * m.zeta());
  s.eps = std::nan("");
  s.alpha = std::nan("");
  return s;
}

std::array<cplx, 4> eigenvalues(const AcousticMode& m, double eps, double alpha) {
  return closed_form(m, capillary_weight(eps, alpha, m.zeta()));
}

std::array<cplx, 4> eigenvalues_kappa(const AcousticMode& m, double kappa) {
  return closed_form(m, 1.0 + kappa * m.zeta());
}

std::array<cplx, 4> dense_eigenvalues(const AcousticSymbol& s) {
  Eigen::ComplexEigenSolver<Mat4> es(s.A, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolve failed");
  std::array<cplx, 4> out;
  for (int i = 0; i < 4; ++i) out[i] = es.eigenvalues()[i];
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); });
  return out;
}

double multiset_distance(const std::array<cplx, 4>& a, const std::array<cplx, 4>& b) {
  std::array<int, 4> p{0, 1, 2, 3};
  double best = INFINITY;
  do {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(a[i] - b[p[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

double skew_residual(const AcousticSymbol& s) {
  const Eigen::Matrix4d S = s.S.asDiagonal();
  const Mat4 R = S.cast<cplx>() * s.A + s.A.adjoint() * S.cast<cplx>();
  return R.cwiseAbs().rowwise().sum().maxCoeff();
}

Eigen::MatrixXcd nullspace(const Mat4& A) {
  Eigen::JacobiSVD<Mat4> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * sv[0];
  int rank = 0;
  for (int i = 0; i < 4; ++i)
    if (sv[i] > tol) ++rank;
  return svd.matrixV().rightCols(4 - rank);
}

bool has_zero_eigenvalue(const AcousticSymbol& s) { return nullspace(s.A).cols() > 0; }

Mat4 kernel_projector(const AcousticSymbol& s) {
  const Eigen::MatrixXcd N = nullspace(s.A);
  if (N.cols() == 0) return Mat4::Zero();
  const Eigen::MatrixXcd S = s.S.cast<cplx>().asDiagonal();
  const Eigen::MatrixXcd G = N.adjoint() * S * N;
  return N * G.inverse() * N.adjoint() * S;
}

Mat4 kernel_projector(const AcousticMode& m, double eps, double alpha) {
  return kernel_projector(assemble(m, eps, alpha));
}

Mat4 kernel_projector_kappa(const AcousticMode& m, double kappa) {
  return kernel_projector(assemble_kappa(m, kappa));
}

ProjectorPerturbation projector_perturbation(const AcousticMode& m, double eta) {
  if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("eta must lie in (0, 1]");
  ProjectorPerturbation p;
  p.pi_eta = Mat4::Identity() - kernel_projector_kappa(m, eta);
  p.pi_zero = Mat4::Identity() - kernel_projector_kappa(m, 0.0);
  p.R = (p.pi_eta - p.pi_zero) / eta;
  p.R_norm = Eigen::JacobiSVD<Mat4>(p.R).singularValues()[0];
  return p;
}

double projector_perturbation_bound(const AcousticMode& m) { return m.zeta(); }

GapReport isolated_zero_check(const std::vector<AcousticMode>& modes, double eta) {
  if (modes.empty()) throw std::invalid_argument("empty mode set");
  GapReport r;
  r.gap_zero = INFINITY;
  r.gap_eta = INFINITY;
  for (const auto& m : modes) {
    if (m.k == 0.0) continue;
    ++r.modes_with_k;
    const auto l0 = eigenvalues_kappa(m, 0.0);
    const auto le = eigenvalues_kappa(m, eta);
    for (int i = 0; i < 4; ++i) {
      r.gap_zero = std::min(r.gap_zero, std::abs(l0[i]));
      r.gap_eta = std::min(r.gap_eta, std::abs(le[i]));
    }
  }
  r.pass = r.modes_with_k == 0 || (r.gap_zero > 0.0 && r.gap_eta >= 0.5 * r.gap_zero);
  return r;
}

std::vector<AcousticMode> truncation_modes(double M, double dxi, double dk) {
  std::vector<AcousticMode> out;
  const int n = int(std::floor(M / dxi));
  const int nk = int(std::floor(M / dk));
  for (int c = 0; c <= nk; ++c)
    for (int a = -n; a <= n; ++a)
      for (int b = -n; b <= n; ++b) {
        AcousticMode m{a * dxi, b * dxi, c * dk};
        if (std::hypot(m.xi1, m.xi2) + m.k <= M + 1e-12) out.push_back(m);
      }
  return out;
}

Mat4 propagator_pade(const AcousticSymbol& s, double tau) { return (Mat4(-tau * s.A)).exp(); }

ModeEvolution::ModeEvolution(const AcousticSymbol& s) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(symmetrized_hermitian(s));
  if (es.info() != Eigen::Success) throw std::runtime_error("hermitian eigensolve failed");
  U_ = es.eigenvectors();
  d_ = es.eigenvalues();
  for (int i = 0; i < 4; ++i) sqrtS_[i] = std::sqrt(s.S[i]);
}

Vec4 ModeEvolution::evolve(const Vec4& x0, double tau) const {
  Vec4 c = U_.adjoint() * (sqrtS_.cast<cplx>().asDiagonal() * x0);
  for (int i = 0; i < 4; ++i) c[i] *= std::exp(I * (tau * d_[i]));
  Vec4 y = U_ * c;
  for (int i = 0; i < 4; ++i) y[i] /= sqrtS_[i];
  return y;
}

Mat4 propagator(const AcousticSymbol& s, double tau) {
  // eigenvector condition number of A is sqrt(w)
  if (std::sqrt(s.weight()) > 1e8) return propagator_pade(s, tau);
  Eigen::SelfAdjointEigenSolver<Mat4> es(symmetrized_hermitian(s));
  const Mat4& U = es.eigenvectors();
  if (es.info() != Eigen::Success || (U.adjoint() * U - Mat4::Identity()).cwiseAbs().maxCoeff() > 1e-10)
    return propagator_pade(s, tau);
  Vec4 ph;
  for (int i = 0; i < 4; ++i) ph[i] = std::exp(I * (tau * es.eigenvalues()[i]));
  Mat4 E = U * ph.asDiagonal() * U.adjoint();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) E(i, j) *= std::sqrt(s.S[j]) / std::sqrt(s.S[i]);
  return E;
}

}  // namespace nskqg
