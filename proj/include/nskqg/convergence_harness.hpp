#pragma once
// eps-sweeps of the full solver against the two-dimensional limit.
//
// Each leg integrates the same initial profiles at one eps and samples
// distances to the limit solution at evenly spaced snapshot times. Distances
// are in L^2(0,T; L^2) with an optional horizontal window theta. The
// columnarization column is taken of the time-averaged velocity, which filters
// the fast waves; the instantaneous value at T is reported alongside.

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "nskqg/initial_data.hpp"
#include "nskqg/nsk_solver.hpp"

namespace nskqg {

struct GridSpec {
  int Nh = 32;
  int Nv = 8;
  double Lh = 2.0 * M_PI;
};

struct SweepConfig {
  std::vector<double> eps_list{0.2, 0.1, 0.05};
  double alpha = 1.0;
  double gamma = 2.0;
  double nu = 0.05;
  double T_final = 1.0;
  GridSpec grid;
  InitialDataSpec initial;
  std::string output_dir = ".";

  int snapshots = 16;
  double dt_max = 0.02;
  double dt_over_eps = 0.5;   // dt <= dt_over_eps * eps
  double qg_dt = 1e-3;
  double window_radius = 0.0;  // 0 disables the window
  double rho_band = 3.0;       // allowed max/min of |rho - 1|_{Linf L2} / eps

  void validate() const;
};

SweepConfig sweep_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SweepConfig& c);

struct LegResult {
  double eps = 0.0;
  std::string status = "ok";  // ok | vacuum | cfl | error
  double breakdown_time = 0.0;
  std::string message;
  int steps = 0;
  double dt = 0.0;
  double r_distance = 0.0;             // |r_eps - r|_{L2 L2}
  double u_distance = 0.0;             // |rho^{3/2} u_eps - u|_{L2 L2}
  double columnarization = 0.0;        // of the time-averaged velocity
  double columnarization_final = 0.0;  // instantaneous at T
  double rho_dev_over_eps = 0.0;       // |rho - 1|_{Linf L2} / eps
  double energy_residual = 0.0;        // max_t E(t) + int D - E(0), relative to E(0)
  std::map<std::string, double> bounds;

  bool ok() const { return status == "ok"; }
};

struct RateFit {
  double slope = 0.0;
  double r2 = 0.0;
  bool defined = false;
};

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& values);

struct ConvergenceReport {
  std::string config_hash;
  nlohmann::json config;
  std::vector<LegResult> rows;
  std::map<std::string, RateFit> slopes;
  std::map<std::string, bool> flags;

  bool all_pass() const;
};

// One leg; breakdowns are caught and recorded in the status column.
LegResult run_leg(const SweepConfig& c, double eps);
ConvergenceReport run_sweep(const SweepConfig& c);
// Recompute slopes and pass flags from the rows.
void assess(ConvergenceReport& r, const SweepConfig& c);

const std::vector<std::string>& report_columns();
void export_csv(const ConvergenceReport& r, const std::string& path);
void export_long_csv(const ConvergenceReport& r, const std::string& path);
void export_json(const ConvergenceReport& r, const std::string& path);
// report.csv, report_long.csv and report.json under dir
void export_report(const ConvergenceReport& r, const std::string& dir);
std::vector<LegResult> read_csv(const std::string& path);

constexpr int kReportSchemaVersion = 1;

}  // namespace nskqg
