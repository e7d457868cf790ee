#include "nskqg/convergence_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "nskqg/diagnostics.hpp"
#include "nskqg/qg_limit.hpp"
#include "nskqg/rage_lab.hpp"
#include "nskqg/run_support.hpp"

namespace nskqg {

namespace {

struct LimitReference {
  std::vector<ScalarField> r;                      // planar, one per snapshot
  std::vector<std::array<ScalarField, 2>> u;       // grad_perp X(r)
};

Regime regime_for(double alpha) { return alpha > 0.0 ? Regime::vanishing : Regime::constant; }

LimitReference limit_reference(const SweepConfig& c, const Grid& g, const InitialFields& f) {
  const Regime regime = regime_for(c.alpha);
  QGState s{qg_initial(vertical_vorticity(f.u0), f.r0, regime), 0.0, regime};
  LimitReference ref;
  const double interval = c.T_final / c.snapshots;
  const int n = std::max(1, int(std::ceil(interval / c.qg_dt - 1e-9)));
  const double dt = interval / n;
  for (int k = 0; k <= c.snapshots; ++k) {
    if (k > 0)
      for (int i = 0; i < n; ++i) s = qg_step(s, dt, c.nu);
    ref.r.push_back(s.r);
    ref.u.push_back(stream_velocity(s.r, regime));
  }
  (void)g;
  return ref;
}

ScalarField window(const SweepConfig& c, const Grid& g) {
  if (c.window_radius > 0.0) return bump_window(g, c.window_radius);
  ScalarField one(g, Parity::even);
  std::fill(one.values.begin(), one.values.end(), 1.0);
  return one;
}

LegResult run_leg_with(const SweepConfig& c, double eps, const Grid& g, const InitialFields& f,
                       const LimitReference& ref, const ScalarField& theta) {
  LegResult leg;
  leg.eps = eps;
  const ScaledParams p{eps, c.alpha, c.nu, c.gamma};
  const double interval = c.T_final / c.snapshots;
  try {
    NskSolver solver(g, p);
    solver.set_state(initialize(f.r0, f.u0, p));
    Trajectory tr;
    VectorField ubar(g);
    double r2 = 0.0, u2 = 0.0;
    leg.dt = INFINITY;
    for (int k = 0; k <= c.snapshots; ++k) {
      if (k > 0) {
        const double dt0 = std::min(solver.default_dt(c.dt_max), c.dt_over_eps * eps);
        const int n = std::max(1, int(std::ceil(interval / dt0 - 1e-9)));
        const double dt = interval / n;
        leg.dt = std::min(leg.dt, dt);
        for (int i = 0; i < n; ++i) solver.step(dt);
        leg.steps += n;
      }
      const FluidState s = solver.state();
      tr.push_back(record_snapshot(s, p));
      const ScalarField& rq = ref.r[k];
      double dr = 0.0, du = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t h = i / std::size_t(g.Nv);
        const double rho = s.rho[i];
        const double e = (rho - 1.0) / eps - rq[h];
        const double w = std::pow(rho, 1.5);
        const double a = w * s.u[0][i] - ref.u[k][0][h];
        const double b = w * s.u[1][i] - ref.u[k][1][h];
        const double z = w * s.u[2][i];
        dr += theta[i] * e * e;
        du += theta[i] * (a * a + b * b + z * z);
      }
      const double wt = (k == 0 || k == c.snapshots) ? 0.5 : 1.0;
      r2 += wt * interval * dr * g.cell();
      u2 += wt * interval * du * g.cell();
      for (int a = 0; a < 3; ++a)
        for (std::size_t i = 0; i < g.size(); ++i) ubar[a][i] += wt * interval / c.T_final * s.u[a][i];
      leg.rho_dev_over_eps = std::max(leg.rho_dev_over_eps, tr.back().rho_dev_l2 / eps);
      if (k == c.snapshots) leg.columnarization_final = columnarization(s);
    }
    leg.r_distance = std::sqrt(r2);
    leg.u_distance = std::sqrt(u2);
    leg.columnarization = columnarization(ubar);
    const double e0 = tr.front().E;
    const double res = energy_inequality_residual(tr);
    leg.energy_residual = e0 > 0.0 ? res / e0 : res;
    leg.bounds = uniform_bound_table(tr, p);
  } catch (const VacuumError& e) {
    leg.status = "vacuum";
    leg.breakdown_time = e.time;
    leg.message = e.what();
  } catch (const CflError& e) {
    leg.status = "cfl";
    leg.breakdown_time = e.time;
    leg.message = e.what();
  } catch (const BreakdownError& e) {
    leg.status = "error";
    leg.breakdown_time = e.time;
    leg.message = e.what();
  } catch (const std::exception& e) {
    leg.status = "error";
    leg.message = e.what();
  }
  if (!std::isfinite(leg.dt)) leg.dt = 0.0;
  return leg;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw std::invalid_argument("unknown key '" + k + "' in " + where);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  return os;
}

}  // namespace

void SweepConfig::validate() const {
  if (eps_list.empty()) throw std::invalid_argument("eps_list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw std::invalid_argument("eps_list entries must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw std::invalid_argument("eps_list must be strictly decreasing");
  }
  ScaledParams{eps_list.front(), alpha, nu, gamma}.validate();
  if (!(T_final > 0.0)) throw std::invalid_argument("T_final must be positive");
  if (snapshots < 1) throw std::invalid_argument("snapshots must be at least 1");
  if (!(dt_max > 0.0) || !(dt_over_eps > 0.0) || !(qg_dt > 0.0)) throw std::invalid_argument("time steps must be positive");
  if (!(rho_band >= 1.0)) throw std::invalid_argument("rho_band must be at least 1");
  const Grid g = make_grid(grid.Nh, grid.Nv, grid.Lh);
  if (window_radius < 0.0 || window_radius >= 0.5 * g.Lh) throw std::invalid_argument("window_radius must lie in [0, Lh/2)");
}

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  check_keys(j, {"eps_list", "alpha", "gamma", "nu", "T_final", "grid", "initial_data", "output_dir", "snapshots",
                 "dt_max", "dt_over_eps", "qg_dt", "window_radius", "rho_band"},
             "sweep");
  SweepConfig c;
  if (j.contains("eps_list")) c.eps_list = j["eps_list"].get<std::vector<double>>();
  if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
  if (j.contains("gamma")) c.gamma = j["gamma"].get<double>();
  if (j.contains("nu")) c.nu = j["nu"].get<double>();
  if (j.contains("T_final")) c.T_final = j["T_final"].get<double>();
  if (j.contains("grid")) {
    const auto& gj = j["grid"];
    check_keys(gj, {"Nh", "Nv", "Lh"}, "grid");
    if (gj.contains("Nh")) c.grid.Nh = gj["Nh"].get<int>();
    if (gj.contains("Nv")) c.grid.Nv = gj["Nv"].get<int>();
    if (gj.contains("Lh")) c.grid.Lh = gj["Lh"].get<double>();
  }
  if (j.contains("initial_data")) c.initial = initial_data_from_json(j["initial_data"]);
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("snapshots")) c.snapshots = j["snapshots"].get<int>();
  if (j.contains("dt_max")) c.dt_max = j["dt_max"].get<double>();
  if (j.contains("dt_over_eps")) c.dt_over_eps = j["dt_over_eps"].get<double>();
  if (j.contains("qg_dt")) c.qg_dt = j["qg_dt"].get<double>();
  if (j.contains("window_radius")) c.window_radius = j["window_radius"].get<double>();
  if (j.contains("rho_band")) c.rho_band = j["rho_band"].get<double>();
  c.validate();
  return c;
}

nlohmann::json to_json(const SweepConfig& c) {
  return nlohmann::json{{"eps_list", c.eps_list},
                        {"alpha", c.alpha},
                        {"gamma", c.gamma},
                        {"nu", c.nu},
                        {"T_final", c.T_final},
                        {"grid", {{"Nh", c.grid.Nh}, {"Nv", c.grid.Nv}, {"Lh", c.grid.Lh}}},
                        {"initial_data", to_json(c.initial)},
                        {"output_dir", c.output_dir},
                        {"snapshots", c.snapshots},
                        {"dt_max", c.dt_max},
                        {"dt_over_eps", c.dt_over_eps},
                        {"qg_dt", c.qg_dt},
                        {"window_radius", c.window_radius},
                        {"rho_band", c.rho_band}};
}

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& values) {
  if (eps.size() != values.size()) throw std::invalid_argument("column length mismatch");
  if (eps.size() < 3) throw std::invalid_argument("a rate fit needs at least three rows");
  const std::size_t n = eps.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(eps[i] > 0.0) || !(values[i] > 0.0)) throw std::invalid_argument("rate fit needs positive values");
    const double x = std::log(eps[i]), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
  if (!(vx > 0.0)) throw std::invalid_argument("rate fit needs distinct eps values");
  RateFit f;
  f.slope = cxy / vx;
  f.r2 = vy > 1e-300 ? std::clamp(cxy * cxy / (vx * vy), 0.0, 1.0) : 1.0;
  f.defined = true;
  return f;
}

bool ConvergenceReport::all_pass() const {
  for (const auto& [k, v] : flags)
    if (!v) return false;
  return true;
}

LegResult run_leg(const SweepConfig& c, double eps) {
  c.validate();
  const Grid g = make_grid(c.grid.Nh, c.grid.Nv, c.grid.Lh);
  const InitialFields f = build_initial(g, c.initial);
  return run_leg_with(c, eps, g, f, limit_reference(c, g, f), window(c, g));
}

void assess(ConvergenceReport& r, const SweepConfig& c) {
  std::vector<double> eps, rd, ud, col;
  bool all_ok = true;
  for (const auto& row : r.rows) {
    if (!row.ok()) {
      all_ok = false;
      continue;
    }
    eps.push_back(row.eps);
    rd.push_back(row.r_distance);
    ud.push_back(row.u_distance);
    col.push_back(row.columnarization);
  }
  r.flags.clear();
  r.flags["all_legs_ok"] = all_ok;
  bool band = !eps.empty(), col_mono = true, r_mono = true;
  if (band) {
    double lo = INFINITY, hi = 0.0;
    for (const auto& row : r.rows)
      if (row.ok()) {
        lo = std::min(lo, row.rho_dev_over_eps);
        hi = std::max(hi, row.rho_dev_over_eps);
      }
    band = lo > 0.0 ? hi / lo <= c.rho_band : hi == 0.0;
  }
  for (std::size_t i = 1; i < eps.size(); ++i) {
    col_mono = col_mono && col[i] <= col[i - 1];
    r_mono = r_mono && rd[i] <= rd[i - 1];
  }
  r.flags["rho_dev_over_eps_band"] = band;
  r.flags["columnarization_nonincreasing"] = col_mono;
  r.flags["r_distance_nonincreasing"] = r_mono;

  r.slopes.clear();
  const std::vector<std::pair<std::string, const std::vector<double>*>> cols{
      {"r_distance", &rd}, {"u_distance", &ud}, {"columnarization", &col}};
  for (const auto& [name, v] : cols) {
    try {
      r.slopes[name] = fit_rate(eps, *v);
    } catch (const std::invalid_argument&) {
      r.slopes[name] = RateFit{};
    }
  }
}

ConvergenceReport run_sweep(const SweepConfig& c) {
  c.validate();
  ConvergenceReport r;
  r.config = to_json(c);
  r.config_hash = config_hash(r.config);
  const Grid g = make_grid(c.grid.Nh, c.grid.Nv, c.grid.Lh);
  const InitialFields f = build_initial(g, c.initial);
  const LimitReference ref = limit_reference(c, g, f);
  const ScalarField theta = window(c, g);

  r.rows.resize(c.eps_list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < c.eps_list.size();) r.rows[i] = run_leg_with(c, c.eps_list[i], g, f, ref, theta);
  };
  const unsigned nt = std::min<unsigned>(thread_count(), unsigned(c.eps_list.size()));
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  assess(r, c);
  return r;
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols{"config_hash", "eps", "status", "breakdown_time", "steps", "dt",
                                             "r_distance", "u_distance", "columnarization", "columnarization_final",
                                             "rho_dev_over_eps", "energy_residual"};
  return cols;
}

void export_csv(const ConvergenceReport& r, const std::string& path) {
  std::ofstream os = open_out(path);
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& row : r.rows)
    os << r.config_hash << ',' << fmt(row.eps) << ',' << row.status << ',' << fmt(row.breakdown_time) << ','
       << row.steps << ',' << fmt(row.dt) << ',' << fmt(row.r_distance) << ',' << fmt(row.u_distance) << ','
       << fmt(row.columnarization) << ',' << fmt(row.columnarization_final) << ',' << fmt(row.rho_dev_over_eps)
       << ',' << fmt(row.energy_residual) << '\n';
}

void export_long_csv(const ConvergenceReport& r, const std::string& path) {
  std::ofstream os = open_out(path);
  os << "config_hash,eps,status,quantity,value\n";
  for (const auto& row : r.rows) {
    std::vector<std::pair<std::string, double>> q{{"r_distance", row.r_distance},
                                                  {"u_distance", row.u_distance},
                                                  {"columnarization", row.columnarization},
                                                  {"columnarization_final", row.columnarization_final},
                                                  {"rho_dev_over_eps", row.rho_dev_over_eps},
                                                  {"energy_residual", row.energy_residual}};
    for (const auto& [k, v] : row.bounds) q.emplace_back(k, v);
    for (const auto& [k, v] : q)
      os << r.config_hash << ',' << fmt(row.eps) << ',' << row.status << ',' << k << ',' << fmt(v) << '\n';
  }
}

void export_json(const ConvergenceReport& r, const std::string& path) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["config_hash"] = r.config_hash;
  j["config"] = r.config;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows)
    j["rows"].push_back({{"eps", row.eps},
                         {"status", row.status},
                         {"breakdown_time", row.breakdown_time},
                         {"message", row.message},
                         {"steps", row.steps},
                         {"dt", row.dt},
                         {"r_distance", row.r_distance},
                         {"u_distance", row.u_distance},
                         {"columnarization", row.columnarization},
                         {"columnarization_final", row.columnarization_final},
                         {"rho_dev_over_eps", row.rho_dev_over_eps},
                         {"energy_residual", row.energy_residual},
                         {"bounds", row.bounds}});
  for (const auto& [k, f] : r.slopes)
    j["slopes"][k] = f.defined ? nlohmann::json{{"slope", f.slope}, {"r2", f.r2}, {"defined", true}}
                               : nlohmann::json{{"slope", nullptr}, {"r2", nullptr}, {"defined", false}};
  j["flags"] = r.flags;
  j["pass"] = r.all_pass();
  std::ofstream os = open_out(path);
  os << std::setw(2) << j << '\n';
}

void export_report(const ConvergenceReport& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  export_csv(r, (d / "report.csv").string());
  export_long_csv(r, (d / "report_long.csv").string());
  export_json(r, (d / "report.json").string());
}

std::vector<LegResult> read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(is, line);
  std::vector<LegResult> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != report_columns().size()) throw std::runtime_error("malformed report row: " + line);
    LegResult r;
    r.eps = std::stod(f[1]);
    r.status = f[2];
    r.breakdown_time = std::stod(f[3]);
    r.steps = std::stoi(f[4]);
    r.dt = std::stod(f[5]);
    r.r_distance = std::stod(f[6]);
    r.u_distance = std::stod(f[7]);
    r.columnarization = std::stod(f[8]);
    r.columnarization_final = std::stod(f[9]);
    r.rho_dev_over_eps = std::stod(f[10]);
    r.energy_residual = std::stod(f[11]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace nskqg
