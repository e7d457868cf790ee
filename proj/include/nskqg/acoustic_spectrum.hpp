#pragma once
// Per-mode symbol of the singular acoustic/rotation/capillarity operator
// acting on (r, V1, V2, V3), its symmetrizer, spectrum and kernel projectors.
//
// Evolution convention: dX/dt = -(1/eps) A X.  With w = 1 + eps^(2 alpha) zeta,
//
//        | 0        i xi1   i xi2   i k |
//   A =  | i xi1 w  0       -1      0   |
//        | i xi2 w  1       0       0   |
//        | i k w    0       0       0   |
//
// and S = diag(w, 1, 1, 1) satisfies S A + A^* S = 0.
//
// k is used as given: the lab works with the wavenumber itself, the solver
// passes pi*m3 for the period-2 vertical axis.

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "nskqg/spectral_grid.hpp"

namespace nskqg {

using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

struct AcousticMode {
  double xi1 = 0.0;
  double xi2 = 0.0;
  double k = 0.0;
  double zeta() const { return xi1 * xi1 + xi2 * xi2 + k * k; }
};

struct AcousticSymbol {
  Mat4 A;
  Eigen::Vector4d S;  // diagonal of the symmetrizer
  double eps = 0.0;
  double alpha = 0.0;
  double weight() const { return S[0]; }
};

// 1 + eps^(2 alpha) zeta, with 0^0 = 1.
double capillary_weight(double eps, double alpha, double zeta);

AcousticSymbol assemble(const AcousticMode& m, double eps, double alpha);
// Same operator with an explicit capillary coefficient: w = 1 + kappa zeta.
AcousticSymbol assemble_kappa(const AcousticMode& m, double kappa);

// Closed-form eigenvalues, ordered by increasing imaginary part.
std::array<cplx, 4> eigenvalues(const AcousticMode& m, double eps, double alpha);
std::array<cplx, 4> eigenvalues_kappa(const AcousticMode& m, double kappa);
std::array<cplx, 4> dense_eigenvalues(const AcousticSymbol& s);

// Largest mismatch between two eigenvalue lists after optimal pairing.
double multiset_distance(const std::array<cplx, 4>& a, const std::array<cplx, 4>& b);

// max row sum of |S A + A^* S|
double skew_residual(const AcousticSymbol& s);

// Singular values below 1e-10 * sigma_max span the nullspace.
Eigen::MatrixXcd nullspace(const Mat4& A);
bool has_zero_eigenvalue(const AcousticSymbol& s);

// S-orthogonal projector onto Ker A.
Mat4 kernel_projector(const AcousticMode& m, double eps, double alpha);
Mat4 kernel_projector_kappa(const AcousticMode& m, double kappa);
Mat4 kernel_projector(const AcousticSymbol& s);

struct ProjectorPerturbation {
  Mat4 pi_eta;   // continuous-part projector at weight 1 + eta zeta
  Mat4 pi_zero;  // same at eta = 0
  Mat4 R;        // (pi_eta - pi_zero) / eta
  double R_norm = 0.0;  // spectral norm
};
ProjectorPerturbation projector_perturbation(const AcousticMode& m, double eta);
// A priori bound zeta for |R_eta|, eta in (0,1].
double projector_perturbation_bound(const AcousticMode& m);

struct GapReport {
  double gap_zero = 0.0;  // smallest nonzero |lambda| over k != 0 modes, unperturbed
  double gap_eta = 0.0;   // same under weight 1 + eta zeta
  std::size_t modes_with_k = 0;
  bool pass = false;
};
GapReport isolated_zero_check(const std::vector<AcousticMode>& modes, double eta);

// Integer lattice truncation |xi| + |k| <= M, k >= 0, xi in dxi * Z^2.
std::vector<AcousticMode> truncation_modes(double M, double dxi = 1.0, double dk = 1.0);

// Matrix exponential exp(-tau A) through the unitary eigenbasis of the
// symmetrized operator; falls back to Pade when the eigenbasis is too
// ill-conditioned or inaccurate.
Mat4 propagator(const AcousticSymbol& s, double tau);
Mat4 propagator_pade(const AcousticSymbol& s, double tau);

// Reusable eigendecomposition for many evaluation times.
class ModeEvolution {
 public:
  explicit ModeEvolution(const AcousticSymbol& s);
  // exp(-tau A) x0
  Vec4 evolve(const Vec4& x0, double tau) const;
  const Eigen::Vector4d& frequencies() const { return d_; }

 private:
  Eigen::Vector4d sqrtS_;
  Mat4 U_;
  Eigen::Vector4d d_;
};

}  // namespace nskqg
