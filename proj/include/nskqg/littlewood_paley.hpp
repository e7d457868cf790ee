#pragma once
// Dyadic decomposition on the periodic grid.
//
//   chi(s)  = 1 for s <= 1, 0 for s >= 2, quintic smoothstep in between
//   phi(s)  = chi(s/2) - chi(s)                  supported in 1 <= s <= 4
//   D_{-1}  = chi(|D|),  D_j = phi(2^-j |D|),   S_j = chi(2^-j |D|) = sum_{j'<j} D_j'
//
// |xi| includes the vertical wavenumber on a 3-D grid.

#include <vector>

#include "nskqg/spectral_grid.hpp"

namespace nskqg {

double lp_chi(double s);
double lp_phi(double s);

class DyadicFilterBank {
 public:
  explicit DyadicFilterBank(const Grid& g);

  const Grid& grid() const { return grid_; }
  int j_max() const { return j_max_; }
  // lowest j with a nonzero homogeneous block on a nonzero lattice mode
  int j_min_homogeneous() const { return j_min_; }
  double max_wavenumber() const { return kmax_; }

  // filter samples on the stored lattice; j >= -1
  const std::vector<double>& filter(int j) const;
  std::vector<double> homogeneous_filter(int j) const;
  std::vector<double> partial_filter(int j) const;

  // max over modes of |chi + sum_j phi_j - 1|
  double partition_error() const;
  // max over modes of |phi_j phi_j'|
  double overlap(int j, int jp) const;

 private:
  Grid grid_;
  int j_max_ = 0;
  int j_min_ = 0;
  double kmax_ = 0.0;
  std::vector<double> radius_;
  std::vector<std::vector<double>> filters_;  // index j + 1
};

SpectralField apply_filter(const SpectralField& fh, const std::vector<double>& w);

ScalarField dyadic_block(const DyadicFilterBank& bank, const ScalarField& f, int j);
ScalarField partial_sum(const DyadicFilterBank& bank, const ScalarField& f, int j);
std::vector<ScalarField> decompose(const DyadicFilterBank& bank, const ScalarField& f);

// discrete L^p over the box; p = infinity gives the max norm
double lp_norm(const ScalarField& f, double p);
// pointwise Euclidean norm of a family of fields, then L^p
double lp_norm(const std::vector<ScalarField>& fs, double p);

// all order-k partial derivatives d^a f, |a| = k, as ordered index tuples (3^k or 2^k fields)
std::vector<ScalarField> derivatives(const ScalarField& f, int k);

double besov_norm(const DyadicFilterBank& bank, const ScalarField& f, double s, double p, double q);
// homogeneous blocks over j_min_homogeneous()..j_max(); the mean is ignored
double homogeneous_besov_norm(const DyadicFilterBank& bank, const ScalarField& f, double s, double p, double q);

enum class Support { annulus, ball };

struct BernsteinReport {
  int j = 0;
  int k = 0;
  double p = 2.0, q = 2.0;
  Support support = Support::annulus;
  double min_radius = 0.0, max_radius = 0.0;
  double derivative_ratio = 0.0;  // |grad^k f|_p / (2^{jk} |f|_p)
  double integrability_ratio = 0.0;  // |f|_q / (2^{j d (1/p - 1/q)} |f|_p)
};

// Throws if the spectrum leaves 2^{j-1} <= |xi| <= 2^{j+1} (annulus) or |xi| <= 2^j (ball).
BernsteinReport bernstein_check(const ScalarField& f, int j, int k, double p, double q,
                                Support support = Support::annulus);
// smallest admissible j for the field's spectrum
BernsteinReport bernstein_check(const ScalarField& f, int k, double p, double q, Support support = Support::annulus);

// max/min over the supplied ratios
double stability_factor(const std::vector<double>& ratios);

struct TailBoundReport {
  int j = 0;
  double p = 2.0;
  double beta = 1.0;
  double constant = 0.0;  // C_j
  double lhs = 0.0;       // |(Id - S_j) f|_2
  double rhs = 0.0;       // C_j |grad f|_{B^0_{p,inf}}
  bool pass = false;
};

double tail_exponent(double p, int d);
double tail_constant(int j, double p, int d);
TailBoundReport tail_bound_check(const DyadicFilterBank& bank, const ScalarField& f, int j, double p);
std::vector<TailBoundReport> tail_bound_sweep(const DyadicFilterBank& bank, const ScalarField& f, int j_lo, int j_hi,
                                              double p);

// |f|_2 / (|f|_p + |grad f|_2); a corpus maximum is the measured constant
double low_order_ratio(const ScalarField& f, double p);
// |f|_p / |f|_{homogeneous B^0_{p,2}} for p >= 2
double embedding_ratio(const DyadicFilterBank& bank, const ScalarField& f, double p);

int spatial_dimension(const Grid& g);

// Real even-parity test fields. Nyquist modes are never populated.
// Gaussian coefficients on rlo <= |xi| <= rhi; same_phase puts every mode in phase at the origin.
ScalarField random_band_field(const Grid& g, double rlo, double rhi, unsigned long long seed, bool same_phase = false);
// Gaussian coefficients scaled by (1 + |xi|^2)^(-(s/2 + d/4)), zero mean.
ScalarField random_sobolev_field(const Grid& g, double s, unsigned long long seed);

}  // namespace nskqg
