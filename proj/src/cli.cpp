#include "nskqg/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "nskqg/acoustic_spectrum.hpp"
#include "nskqg/convergence_harness.hpp"
#include "nskqg/diagnostics.hpp"
#include "nskqg/initial_data.hpp"
#include "nskqg/littlewood_paley.hpp"
#include "nskqg/nsk_solver.hpp"
#include "nskqg/qg_limit.hpp"
#include "nskqg/rage_lab.hpp"
#include "nskqg/run_support.hpp"
#include "nskqg/snapshot.hpp"

namespace nskqg {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

json default_initial() {
  return json{{"r0", json::array({json{{"profile", "gaussian"}, {"amplitude", 1.0}, {"width", 1.0}}})},
              {"u0", json::array({json{{"profile", "geostrophic"}, {"amplitude", 1.0}}})}};
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

bool is_integer_number(const json& v) { return v.is_number_integer() || v.is_number_unsigned(); }

void check_type(const json& def, const json& v, const std::string& key) {
  auto bad = [&](const char* want) { throw ConfigError("key '" + key + "' expects " + want); };
  if (is_integer_number(def)) {
    if (!is_integer_number(v)) bad("an integer");
  } else if (def.is_number()) {
    if (!v.is_number()) bad("a number");
  } else if (def.is_boolean()) {
    if (!v.is_boolean()) bad("a boolean");
  } else if (def.is_string()) {
    if (!v.is_string()) bad("a string");
  } else if (def.is_array()) {
    if (!v.is_array()) bad("an array");
  } else if (def.is_object()) {
    if (!v.is_object()) bad("an object");
  }
}

json flag_value(const json& def, const std::string& text, const std::string& key) {
  if (def.is_string()) return text;
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
  }
  if (def.is_array()) {
    json arr = json::array();
    std::stringstream ss(text);
    for (std::string cell; std::getline(ss, cell, ',');) {
      try {
        arr.push_back(json::parse(cell));
      } catch (const json::parse_error&) {
        throw ConfigError("cannot parse element '" + cell + "' of --" + key);
      }
    }
    return arr;
  }
  throw ConfigError("cannot parse value '" + text + "' of --" + key);
}

json load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
}

ScaledParams scaled(const json& p) {
  return ScaledParams{p.at("eps").get<double>(), p.at("alpha").get<double>(), p.at("nu").get<double>(),
                      p.at("gamma").get<double>()};
}

Grid grid_of(const json& p) {
  const int nv = p.contains("Nv") ? p["Nv"].get<int>() : 1;
  return nv == 1 ? make_plane(p["Nh"].get<int>(), p["Lh"].get<double>())
                 : make_grid(p["Nh"].get<int>(), nv, p["Lh"].get<double>());
}

RageSweepConfig rage_config(const json& p) {
  RageSweepConfig c;
  c.eps_list = p["eps_list"].get<std::vector<double>>();
  c.alpha = p["alpha"];
  c.Nh = p["Nh"];
  c.Nv = p["Nv"];
  c.Lh = p["Lh"];
  c.modes = p["modes"];
  c.m3 = p["m3"];
  c.width = p["width"];
  c.T = p["T"];
  c.window_radius = p["window_radius"];
  c.ratio_max = p["ratio_max"];
  return c;
}

class RunLog {
 public:
  RunLog(const fs::path& path, std::string hash) : os_(path, std::ios::app), hash_(std::move(hash)) {
    if (!os_) throw std::runtime_error("cannot open run log " + path.string());
  }
  void event(const std::string& kind, json data = json::object()) {
    data["event"] = kind;
    data["config_hash"] = hash_;
    os_ << data.dump() << '\n';
    os_.flush();
  }

 private:
  std::ofstream os_;
  std::string hash_;
};

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream os = open_out(p);
  os << std::setw(2) << j << '\n';
}

std::uint64_t hash_tag(const std::string& h) { return std::stoull(h, nullptr, 16); }

// ---------------------------------------------------------------- simulate

int run_simulate(const RunConfig& cfg, const fs::path& out, RunLog& log) {
  const json& p = cfg.params;
  const ScaledParams sp = scaled(p);
  const Grid g = grid_of(p);
  const InitialFields init = build_initial(g, initial_data_from_json(p["initial_data"]));
  SolverOptions opt;
  opt.nonlinear = p["nonlinear"].get<bool>();
  NskSolver solver(g, sp, opt);
  solver.set_state(initialize(init.r0, init.u0, sp));

  const double T = p["T_final"], dt_max = p["dt_max"];
  const int nsnap = p["snapshots"];
  const bool snaps = p["write_snapshots"];
  Trajectory tr;
  auto record = [&](int k) {
    const FluidState s = solver.state();
    tr.push_back(record_snapshot(s, sp));
    log.event("snapshot", {{"index", k}, {"time", s.time}, {"E", tr.back().E}, {"min_rho", tr.back().min_rho}});
    if (snaps) {
      std::ostringstream name;
      name << "rho_" << std::setw(4) << std::setfill('0') << k << ".bin";
      write_snapshot((out / name.str()).string(), s.rho, hash_tag(cfg.hash));
    }
  };
  record(0);
  const double interval = T / nsnap;
  int steps = 0;
  for (int k = 1; k <= nsnap; ++k) {
    const int n = std::max(1, int(std::ceil(interval / solver.default_dt(dt_max) - 1e-9)));
    for (int i = 0; i < n; ++i) solver.step(interval / n);
    steps += n;
    record(k);
  }

  std::ostringstream rows;
  write_diagnostics_header(rows);
  write_diagnostics_rows(rows, sp.eps, energy_reports(tr, sp));
  std::ofstream csv = open_out(out / "diagnostics.csv");
  std::istringstream in(rows.str());
  std::string line;
  for (bool first = true; std::getline(in, line); first = false)
    csv << (first ? std::string("config_hash") : cfg.hash) << ',' << line << '\n';

  const double e0 = tr.front().E;
  const double res = energy_inequality_residual(tr);
  const bool pass = res <= 1e-3 * e0;
  write_json(out / "summary.json", {{"config_hash", cfg.hash},
                                    {"steps", steps},
                                    {"E0", e0},
                                    {"E_final", tr.back().E},
                                    {"energy_residual", res},
                                    {"bounds", uniform_bound_table(tr, sp)},
                                    {"flags", {{"energy_inequality", pass}}}});
  std::cout << "simulate: " << steps << " steps, E(0) = " << e0 << ", E(T) = " << tr.back().E
            << ", energy residual = " << res << (pass ? "  PASS" : "  FAIL") << '\n';
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------- sweep

int run_sweep_cmd(const RunConfig& cfg, const fs::path& out, RunLog& log) {
  const SweepConfig c = sweep_config_from_json(cfg.params);
  ConvergenceReport r = run_sweep(c);
  r.config_hash = cfg.hash;
  for (const auto& row : r.rows)
    log.event("leg", {{"eps", row.eps}, {"status", row.status}, {"breakdown_time", row.breakdown_time},
                      {"r_distance", row.r_distance}, {"columnarization", row.columnarization}});
  export_report(r, (out / c.output_dir).string());
  std::cout << std::setw(10) << "eps" << std::setw(8) << "status" << std::setw(14) << "r_dist" << std::setw(14)
            << "u_dist" << std::setw(14) << "column" << std::setw(14) << "rho/eps" << '\n';
  for (const auto& row : r.rows)
    std::cout << std::setw(10) << row.eps << std::setw(8) << row.status << std::setw(14) << row.r_distance
              << std::setw(14) << row.u_distance << std::setw(14) << row.columnarization << std::setw(14)
              << row.rho_dev_over_eps << '\n';
  for (const auto& [k, v] : r.flags) std::cout << (v ? "PASS " : "FAIL ") << k << '\n';
  return r.all_pass() ? 0 : 1;
}

// ---------------------------------------------------------------- spectrum

int run_spectrum(const RunConfig& cfg, const fs::path& out, RunLog& log) {
  const json& p = cfg.params;
  const double eps = p["eps"], alpha = p["alpha"], tol = p["tolerance"];
  const AcousticMode m{p["xi1"].get<double>(), p["xi2"].get<double>(), p["k"].get<double>()};
  const AcousticSymbol s = assemble(m, eps, alpha);
  const auto closed = eigenvalues(m, eps, alpha);
  const auto dense = dense_eigenvalues(s);
  double worst = multiset_distance(closed, dense);

  auto as_json = [](const std::array<cplx, 4>& v) {
    json a = json::array();
    for (const auto& z : v) a.push_back({z.real(), z.imag()});
    return a;
  };
  json j{{"config_hash", cfg.hash},
         {"mode", {{"xi1", m.xi1}, {"xi2", m.xi2}, {"k", m.k}}},
         {"weight", s.weight()},
         {"closed_form", as_json(closed)},
         {"dense", as_json(dense)},
         {"distance", worst},
         {"zero_eigenvalue", has_zero_eigenvalue(s)},
         {"kernel_dimension", nullspace(s.A).cols()},
         {"skew_residual", skew_residual(s)}};

  const int samples = p["samples"];
  if (samples > 0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> X(-8.0, 8.0), U(0.0, 1.0);
    double sample_worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      const AcousticMode q{X(rng), X(rng), X(rng)};
      const double e = U(rng), a = U(rng);
      sample_worst = std::max(sample_worst, multiset_distance(eigenvalues(q, e, a), dense_eigenvalues(assemble(q, e, a))));
    }
    j["samples"] = samples;
    j["sample_distance"] = sample_worst;
    worst = std::max(worst, sample_worst);
  }
  const bool pass = worst < tol;
  j["pass"] = pass;
  write_json(out / "spectrum.json", j);
  log.event("spectrum", {{"distance", worst}, {"pass", pass}});
  std::cout << "eigenvalues (closed form):";
  for (const auto& z : closed) std::cout << ' ' << z;
  std::cout << "\nmax closed-form / dense mismatch " << worst << (pass ? "  PASS" : "  FAIL") << '\n';
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------- rage

int run_rage(const RunConfig& cfg, const fs::path& out, RunLog& log) {
  const RageSweepConfig c = rage_config(cfg.params);
  const RageSweepResult r = rage_sweep(c);
  std::ofstream csv = open_out(out / "rage.csv");
  csv << "config_hash,eps,average,average_symmetrized,norm_bound,samples,dt\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    csv << cfg.hash << ',' << fmt(c.eps_list[i]) << ',' << fmt(row.average) << ',' << fmt(row.average_symmetrized)
        << ',' << fmt(row.norm_bound) << ',' << row.samples << ',' << fmt(row.dt) << '\n';
    std::cout << "eps " << std::setw(10) << c.eps_list[i] << "  windowed average " << row.average << '\n';
    log.event("rage", {{"eps", c.eps_list[i]}, {"average", row.average}});
  }
  write_json(out / "rage.json",
             {{"config_hash", cfg.hash}, {"ratio", r.ratio}, {"monotone", r.monotone}, {"pass", r.pass}});
  std::cout << "final/initial " << r.ratio << (r.monotone ? ", monotone" : ", not monotone")
            << (r.pass ? "  PASS" : "  FAIL") << '\n';
  return r.pass ? 0 : 1;
}

// ---------------------------------------------------------------- qg

int run_qg(const RunConfig& cfg, const fs::path& out, RunLog& log) {
  const json& p = cfg.params;
  const Regime regime = p["regime"] == "constant" ? Regime::constant : Regime::vanishing;
  const Grid g = make_plane(p["Nh"], p["Lh"]);
  ProfileSpec prof;
  prof.profile = "noise";
  prof.amplitude = p["amplitude"];
  prof.band = p["band"];
  prof.mode = {0, 0, 0};
  prof.seed = cfg.seed;
  QGState s{scalar_profile(g, prof), 0.0, regime};
  const double nu = p["nu"], dt = p["dt"], rtol = p["residual_tol"], jtol = p["jacobian_tol"];
  const int steps = p["steps"];

  std::ofstream csv = open_out(out / "qg_budget.csv");
  csv << "config_hash,step,time,energy,dissipation,residual,relative,jacobian_relative\n";
  double worst = 0.0, worst_j = 0.0;
  for (int n = 0; n < steps; ++n) {
    QGState next;
    const QGBudgetStep b = qg_budget_step(s, dt, nu, &next);
    worst = std::max(worst, b.relative);
    worst_j = std::max(worst_j, b.jacobian_relative);
    csv << cfg.hash << ',' << n << ',' << fmt(s.time) << ',' << fmt(b.energy_before) << ',' << fmt(b.dissipation_mean)
        << ',' << fmt(b.residual) << ',' << fmt(b.relative) << ',' << fmt(b.jacobian_relative) << '\n';
    s = std::move(next);
  }
  write_snapshot((out / "qg_final.bin").string(), s.r, hash_tag(cfg.hash));
  const bool pass = worst < rtol && worst_j < jtol;
  write_json(out / "qg.json", {{"config_hash", cfg.hash},
                               {"max_relative_residual", worst},
                               {"max_jacobian_relative", worst_j},
                               {"energy_final", qg_energy(s.r, regime)},
                               {"pass", pass}});
  log.event("qg", {{"max_relative_residual", worst}, {"max_jacobian_relative", worst_j}});
  std::cout << "max per-step budget residual " << worst << ", Jacobian share " << worst_j
            << (pass ? "  PASS" : "  FAIL") << '\n';
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------- lp-check

struct Clause {
  std::string name;
  double value;
  double threshold;
  bool pass;
};

int run_lp_check(const RunConfig& cfg, const fs::path& out, RunLog& log) {
  const json& p = cfg.params;
  const Grid g = grid_of(p);
  const DyadicFilterBank bank(g);
  const int samples = p["samples"], jt = p["tail_j_max"];
  const double pexp = p["p"];
  std::vector<Clause> table;

  double recon = 0.0, tail_margin = INFINITY, besov_lo = INFINITY, besov_hi = 0.0, low = 0.0, emb = 0.0;
  bool tail_ok = true;
  for (int i = 0; i < samples; ++i) {
    const ScalarField f = random_sobolev_field(g, 1.0, cfg.seed + i);
    ScalarField sum(g, Parity::even);
    for (const auto& b : decompose(bank, f)) sum += b;
    double e = 0.0;
    for (std::size_t s = 0; s < g.size(); ++s) e = std::max(e, std::abs(sum[s] - f[s]));
    recon = std::max(recon, e / max_abs(f));
    for (const auto& t : tail_bound_sweep(bank, f, 1, jt, pexp)) {
      tail_ok = tail_ok && t.pass;
      tail_margin = std::min(tail_margin, t.rhs - t.lhs);
    }
    const double ratio = besov_norm(bank, f, 0.0, 2.0, 2.0) / lp_norm(f, 2.0);
    besov_lo = std::min(besov_lo, ratio);
    besov_hi = std::max(besov_hi, ratio);
    low = std::max(low, low_order_ratio(f, pexp));
    emb = std::max(emb, embedding_ratio(bank, f, 2.0));
  }
  table.push_back({"partition_of_unity", bank.partition_error(), 1e-12, bank.partition_error() < 1e-12});
  table.push_back({"reconstruction", recon, 1e-12, recon < 1e-12});
  double overlap = 0.0;
  for (int j = -1; j <= bank.j_max(); ++j)
    for (int k = j + 2; k <= bank.j_max(); ++k) overlap = std::max(overlap, bank.overlap(j, k));
  table.push_back({"support_rule", overlap, 0.0, overlap == 0.0});
  table.push_back({"tail_bound_min_margin", tail_margin, 0.0, tail_ok});
  table.push_back({"besov_l2_ratio_min", besov_lo, 0.8, besov_lo >= 0.8});
  table.push_back({"besov_l2_ratio_max", besov_hi, 1.25, besov_hi <= 1.25});

  std::vector<double> ann, ball;
  for (int j = 1; j <= bank.j_max(); ++j) {
    if (std::ldexp(1.0, j + 1) > bank.max_wavenumber()) break;
    const ScalarField fa = random_band_field(g, std::ldexp(1.0, j - 1), std::ldexp(1.0, j + 1), cfg.seed + 1000 + j);
    ann.push_back(bernstein_check(fa, j, 1, 2.0, 2.0).derivative_ratio);
    const ScalarField fb = random_band_field(g, 0.0, std::ldexp(1.0, j), 0, true);
    ball.push_back(bernstein_check(fb, j, 0, 2.0, INFINITY, Support::ball).integrability_ratio);
  }
  const double sa = ann.empty() ? NAN : stability_factor(ann), sb = ball.empty() ? NAN : stability_factor(ball);
  table.push_back({"bernstein_annulus_stability", sa, 4.0, sa < 4.0});
  table.push_back({"bernstein_ball_stability", sb, 4.0, sb < 4.0});
  table.push_back({"low_order_constant", low, INFINITY, std::isfinite(low)});
  table.push_back({"embedding_constant", emb, INFINITY, std::isfinite(emb)});

  std::ofstream csv = open_out(out / "lp_check.csv");
  csv << "config_hash,clause,value,threshold,pass\n";
  bool all = true;
  for (const auto& c : table) {
    csv << cfg.hash << ',' << c.name << ',' << fmt(c.value) << ',' << fmt(c.threshold) << ','
        << (c.pass ? "true" : "false") << '\n';
    std::cout << (c.pass ? "PASS " : "FAIL ") << std::left << std::setw(30) << c.name << std::right << std::setw(16)
              << c.value << '\n';
    log.event("clause", {{"name", c.name}, {"value", c.value}, {"pass", c.pass}});
    all = all && c.pass;
  }
  return all ? 0 : 1;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void validate_grid(const json& p) {
  try {
    (void)grid_of(p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"simulate", "sweep", "spectrum", "rage", "qg", "lp-check"};
  return s;
}

json default_params(const std::string& sub) {
  if (sub == "simulate")
    return json{{"eps", 0.1},      {"alpha", 1.0},       {"nu", 0.05},    {"gamma", 2.0},
                {"Nh", 32},        {"Nv", 8},            {"Lh", 4 * M_PI}, {"T_final", 1.0},
                {"dt_max", 0.01},  {"snapshots", 10},    {"nonlinear", true}, {"write_snapshots", false},
                {"initial_data", default_initial()}};
  if (sub == "sweep") {
    SweepConfig c;
    c.grid = GridSpec{32, 8, 4 * M_PI};
    c.initial = initial_data_from_json(
        json{{"r0", json::array({json{{"profile", "gaussian"}, {"amplitude", 1.0}, {"width", 1.0}}})},
             {"u0", json::array({json{{"profile", "geostrophic"}, {"amplitude", 1.0}},
                                 json{{"profile", "inertial"}, {"amplitude", 0.5}, {"mode", {0, 0, 1}}}})}});
    return to_json(c);
  }
  if (sub == "spectrum")
    return json{{"eps", 0.1}, {"alpha", 1.0}, {"xi1", 1.0}, {"xi2", 0.0}, {"k", 1.0}, {"samples", 0}, {"tolerance", 1e-10}};
  if (sub == "rage") {
    const RageSweepConfig c;
    return json{{"eps_list", c.eps_list}, {"alpha", c.alpha},   {"Nh", c.Nh}, {"Nv", c.Nv},
                {"Lh", c.Lh},             {"modes", c.modes},   {"m3", c.m3}, {"width", c.width},
                {"T", c.T},               {"window_radius", c.window_radius}, {"ratio_max", c.ratio_max}};
  }
  if (sub == "qg")
    return json{{"regime", "vanishing"}, {"Nh", 128},   {"Lh", 2 * M_PI},        {"nu", 0.05},
                {"dt", 1e-3},            {"steps", 20}, {"amplitude", 0.1},      {"band", 4},
                {"residual_tol", 1e-6},  {"jacobian_tol", 1e-10}};
  if (sub == "lp-check")
    return json{{"Nh", 32}, {"Nv", 16}, {"Lh", 2 * M_PI}, {"samples", 20}, {"tail_j_max", 6}, {"p", 2.0}};
  throw ConfigError("unknown subcommand '" + sub + "'");
}

void merge_params(json& params, const json& block, const std::string& where) {
  if (!block.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [k, v] : block.items()) {
    if (!params.contains(k)) throw ConfigError("unknown key '" + k + "' in " + where);
    check_type(params[k], v, k);
    if (params[k].is_object() && k != "initial_data")
      merge_params(params[k], v, where + "." + k);
    else
      params[k] = v;
  }
}

void validate_params(const std::string& sub, const json& p) {
  try {
    if (sub == "simulate") {
      scaled(p).validate();
      validate_grid(p);
      require(p["T_final"].get<double>() > 0.0, "T_final must be positive");
      require(p["dt_max"].get<double>() > 0.0, "dt_max must be positive");
      require(p["snapshots"].get<int>() >= 1, "snapshots must be at least 1");
      (void)initial_data_from_json(p["initial_data"]);
    } else if (sub == "sweep") {
      (void)sweep_config_from_json(p);
    } else if (sub == "spectrum") {
      require(p["eps"].get<double>() >= 0.0, "eps must be nonnegative");
      const double a = p["alpha"];
      require(a >= 0.0 && a <= 1.0, "alpha must lie in [0, 1]");
      require(p["samples"].get<int>() >= 0, "samples must be nonnegative");
      require(p["tolerance"].get<double>() > 0.0, "tolerance must be positive");
    } else if (sub == "rage") {
      const RageSweepConfig c = rage_config(p);
      require(!c.eps_list.empty(), "eps_list is empty");
      for (double e : c.eps_list) require(e > 0.0, "eps_list entries must be positive");
      require(c.alpha >= 0.0 && c.alpha <= 1.0, "alpha must lie in [0, 1]");
      const Grid g = make_grid(c.Nh, c.Nv, c.Lh);
      require(c.modes >= 1 && c.m3 >= 0 && c.width > 0.0 && c.T > 0.0, "modes, m3, width and T must be positive");
      require(c.window_radius > 0.0 && c.window_radius < 0.5 * g.Lh, "window_radius must lie in (0, Lh/2)");
    } else if (sub == "qg") {
      require(p["regime"] == "vanishing" || p["regime"] == "constant", "regime must be 'vanishing' or 'constant'");
      (void)make_plane(p["Nh"], p["Lh"]);
      require(p["nu"].get<double>() > 0.0 && p["dt"].get<double>() > 0.0, "nu and dt must be positive");
      require(p["steps"].get<int>() >= 1, "steps must be at least 1");
    } else if (sub == "lp-check") {
      validate_grid(p);
      require(p["samples"].get<int>() >= 1, "samples must be at least 1");
      (void)tail_exponent(p["p"], spatial_dimension(grid_of(p)));
    } else {
      throw ConfigError("unknown subcommand '" + sub + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse(int argc, const char* const* argv) {
  CLI::App app{"pseudo-spectral rotating Navier-Stokes-Korteweg lab"};
  app.require_subcommand(1);
  std::map<std::string, std::map<std::string, std::string>> flags;
  std::map<std::string, std::string> config_path, out_dir;
  std::map<std::string, unsigned long long> seed;
  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> about{
      {"simulate", "integrate the full system and check the energy inequality"},
      {"sweep", "eps-sweep against the limit equation"},
      {"spectrum", "closed-form vs dense eigenvalues of one mode symbol"},
      {"rage", "windowed time averages of the acoustic evolution"},
      {"qg", "per-step energy budget of the limit equation"},
      {"lp-check", "Littlewood-Paley partition, tail, Besov and Bernstein checks"}};
  for (const auto& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name, about.at(name));
    subs[name] = sub;
    sub->add_option("--config", config_path[name], "JSON parameter file");
    sub->add_option("--out", out_dir[name], "output directory");
    sub->add_option("--seed", seed[name], "seed for randomized fields");
    const json defaults = default_params(name);
    for (const auto& [k, v] : defaults.items()) sub->add_option("--" + k, flags[name][k]);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return {};
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  RunConfig cfg;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) cfg.subcommand = name;
  const std::string& sc = cfg.subcommand;
  cfg.params = default_params(sc);
  json file_block = json::object();
  if (!config_path[sc].empty()) {
    file_block = load_file(config_path[sc]);
    if (!file_block.is_object()) throw ConfigError("config file must hold a JSON object");
    if (file_block.contains("seed")) {
      if (!is_integer_number(file_block["seed"])) throw ConfigError("key 'seed' expects an integer");
      cfg.seed = file_block["seed"].get<unsigned long long>();
      file_block.erase("seed");
    }
    merge_params(cfg.params, file_block, sc + " config");
  }
  json flag_block = json::object();
  for (const auto& [k, text] : flags[sc]) {
    if (subs[sc]->count("--" + k) == 0) continue;
    flag_block[k] = flag_value(cfg.params[k], text, k);
    if (file_block.contains(k))
      cfg.overrides.push_back(k + ": " + file_block[k].dump() + " -> " + flag_block[k].dump());
  }
  merge_params(cfg.params, flag_block, sc + " flags");
  if (subs[sc]->count("--seed")) cfg.seed = seed[sc];
  if (!out_dir[sc].empty()) cfg.out = out_dir[sc];
  validate_params(sc, cfg.params);
  cfg.hash = config_hash(json{{"subcommand", sc}, {"params", cfg.params}, {"seed", cfg.seed}});
  return cfg;
}

int dispatch(const RunConfig& cfg) {
  const fs::path out(cfg.out);
  fs::create_directories(out);
  RunLog log(out / "run.jsonl", cfg.hash);
  log.event("start", {{"subcommand", cfg.subcommand}, {"params", cfg.params}, {"seed", cfg.seed},
                      {"threads", thread_count()}});
  for (const auto& o : cfg.overrides) {
    std::cerr << "flag overrides file value for " << o << '\n';
    log.event("override", {{"detail", o}});
  }
  write_json(out / "config.json", {{"subcommand", cfg.subcommand}, {"params", cfg.params}, {"seed", cfg.seed},
                                   {"config_hash", cfg.hash}});
  int code = 2;
  try {
    if (cfg.subcommand == "simulate") code = run_simulate(cfg, out, log);
    else if (cfg.subcommand == "sweep") code = run_sweep_cmd(cfg, out, log);
    else if (cfg.subcommand == "spectrum") code = run_spectrum(cfg, out, log);
    else if (cfg.subcommand == "rage") code = run_rage(cfg, out, log);
    else if (cfg.subcommand == "qg") code = run_qg(cfg, out, log);
    else if (cfg.subcommand == "lp-check") code = run_lp_check(cfg, out, log);
    else throw ConfigError("unknown subcommand '" + cfg.subcommand + "'");
  } catch (const BreakdownError& e) {
    std::cerr << "nskqg " << cfg.subcommand << ": " << e.what() << " at t = " << e.time << '\n';
    log.event("breakdown", {{"message", e.what()}, {"time", e.time}});
    code = 2;
  } catch (const std::exception& e) {
    std::cerr << "nskqg " << cfg.subcommand << ": " << e.what() << '\n';
    log.event("error", {{"message", e.what()}});
    code = 2;
  }
  log.event("finish", {{"exit_code", code}});
  return code;
}

int run_cli(int argc, const char* const* argv) {
  RunConfig cfg;
  try {
    cfg = parse(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "nskqg: " << e.what() << '\n';
    return 2;
  }
  if (cfg.subcommand.empty()) return 0;
  return dispatch(cfg);
}

}  // namespace nskqg
