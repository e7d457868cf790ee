#pragma once
// Wiener-type time averages of Fourier transforms of spectral measures, and
// windowed time averages of the acoustic evolution restricted to the
// orthogonal complement of the kernel.

#include <array>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "nskqg/acoustic_spectrum.hpp"
#include "nskqg/nsk_solver.hpp"
#include "nskqg/spectral_grid.hpp"

namespace nskqg {

struct SpectralMeasure {
  std::vector<std::pair<double, double>> atoms;  // (location, mass)
  double ac_lo = 0.0, ac_hi = 0.0;
  std::vector<double> ac_density;  // uniform samples on [ac_lo, ac_hi], linearly interpolated

  void validate() const;
  double total_mass() const;
  // sum of squared atom masses, coincident atoms merged
  double pure_point_sum() const;
  // largest |x| in the support
  double extent() const;

  static SpectralMeasure dirac(double x, double mass = 1.0);
  static SpectralMeasure uniform(double lo, double hi, double mass, std::size_t samples = 2001);
  SpectralMeasure scaled(double c) const;
  SpectralMeasure operator+(const SpectralMeasure& o) const;  // requires compatible density grids
};

cplx fourier_transform_measure(const SpectralMeasure& m, double t);

// (1/2T) int_{-T}^{T} |F(t)|^2 dt
double wiener_average(const SpectralMeasure& m, double T);

using MeasureFamily = std::function<std::optional<SpectralMeasure>(double eps)>;

// (1/2T) int_{-T}^{T} |F_eps(t/eps)|^2 dt
double coupled_wiener_average(const MeasureFamily& family, double T, double eps);
std::vector<double> coupled_wiener_sweep(const MeasureFamily& family, double T, const std::vector<double>& eps_list);

struct CutoffOperator {
  double M = 0.0;
  ScalarField theta;
};

// Smooth bump exp(1 - 1/(1 - (d/R)^2)) in the horizontal distance d from the box centre.
ScalarField bump_window(const Grid& g, double radius);
CutoffOperator make_cutoff(const Grid& g, double M, double radius);

using AcousticData = std::array<SpectralField, 4>;  // (r, V1, V2, V3) coefficients

// |xi_h| + |k| <= M for every nonzero coefficient
bool in_truncation(const AcousticData& y, double M);

struct RageResult {
  double average = 0.0;            // time average of int theta |Q^perp X|^2
  double average_symmetrized = 0.0;  // same with the symmetrizer weight on the windowed field
  double norm_bound = 0.0;         // |Q^perp Y|_S^2
  double norm_sq = 0.0;            // |Y|^2
  double max_weight = 1.0;         // max over grid modes of 1 + eps^(2 alpha) zeta
  std::size_t samples = 0;
  double dt = 0.0;
};

RageResult rage_time_average(const AcousticData& y, double eps, double alpha, double T, const CutoffOperator& cutoff);

// Broadband data: a centred gaussian r bump of the given width times cos(pi m3 x3),
// keeping horizontal indices |m_h| <= modes; V = 0.
AcousticData broadband_data(const Grid& g, int modes, int m3, double width);
// truncation level |xi_h| + |k| covering broadband_data
double broadband_level(const Grid& g, int modes, int m3);

struct RageSweepConfig {
  std::vector<double> eps_list{0.1, 0.05, 0.025, 0.0125, 0.00625};
  double alpha = 1.0;
  int Nh = 128;
  int Nv = 4;
  double Lh = 64.0;
  int modes = 32;
  int m3 = 1;
  double width = 2.0;
  double T = 1.0;
  double window_radius = 4.0;
  double ratio_max = 0.2;
};

struct RageSweepResult {
  std::vector<RageResult> rows;
  double ratio = 0.0;  // last / first average
  bool monotone = false;
  bool pass = false;
};

RageSweepResult rage_sweep(const RageSweepConfig& c);

}  // namespace nskqg
