#include "nskqg/initial_data.hpp"

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "nskqg/qg_limit.hpp"

namespace nskqg {

namespace {

const std::set<std::string> kScalarProfiles{"gaussian", "mode", "noise"};
const std::set<std::string> kVelocityProfiles{"geostrophic", "swirl", "potential", "shear", "vertical", "inertial", "noise"};

double horizontal_gaussian(const Grid& g, int i, int j, double w) {
  const double c = 0.5 * g.Lh;
  const double dx = g.x1(i) - c, dy = g.x2(j) - c;
  return std::exp(-(dx * dx + dy * dy) / (2.0 * w * w));
}

ScalarField gaussian_plane_on(const Grid& g, double w) {
  ScalarField f(g, Parity::even);
  for (int i = 0; i < g.Nh; ++i)
    for (int j = 0; j < g.Nh; ++j) {
      const double v = horizontal_gaussian(g, i, j, w);
      for (int n = 0; n < g.Nv; ++n) f[g.idx(i, j, n)] = v;
    }
  return f;
}

ScalarField noise(const Grid& g, const ProfileSpec& p, std::mt19937_64& rng, Parity parity) {
  std::normal_distribution<double> N(0.0, 1.0);
  SpectralField h(g, Parity::even);
  const Lattice& L = lattice(g);
  for (std::size_t s = 0; s < L.size(); ++s) {
    if (std::abs(L.m1[s]) > p.band || std::abs(L.m2[s]) > p.band || std::abs(L.m3[s]) > p.mode[2]) continue;
    if (L.nyq1[s] || L.nyq2[s] || L.nyq3[s]) continue;
    h[s] = cplx(N(rng), N(rng));
  }
  h[0] = 0.0;
  ScalarField f = project_parity(inverse(h), parity);
  const double rms = std::sqrt(l2_norm_sq(f) / g.volume());
  if (rms > 0.0) f *= p.amplitude / rms;
  return f;
}

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw std::invalid_argument("unknown key '" + k + "' in " + where);
}

}  // namespace

ScalarField scalar_profile(const Grid& g, const ProfileSpec& p) {
  const double pi = M_PI;
  if (p.profile == "gaussian") {
    if (!(p.width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
    ScalarField f = gaussian_plane_on(g, p.width);
    for (int i = 0; i < g.Nh; ++i)
      for (int j = 0; j < g.Nh; ++j)
        for (int n = 0; n < g.Nv; ++n) f[g.idx(i, j, n)] *= p.amplitude * std::cos(pi * p.mode[2] * g.x3(n));
    return f;
  }
  if (p.profile == "mode") {
    ScalarField f(g, Parity::even);
    for (int i = 0; i < g.Nh; ++i)
      for (int j = 0; j < g.Nh; ++j)
        for (int n = 0; n < g.Nv; ++n)
          f[g.idx(i, j, n)] = p.amplitude * std::cos(2.0 * pi * (p.mode[0] * g.x1(i) + p.mode[1] * g.x2(j)) / g.Lh) *
                              std::cos(pi * p.mode[2] * g.x3(n));
    return f;
  }
  if (p.profile == "noise") {
    std::mt19937_64 rng(p.seed);
    return noise(g, p, rng, Parity::even);
  }
  throw std::invalid_argument("unknown scalar profile '" + p.profile + "'");
}

ScalarField vertical_vorticity(const VectorField& u) {
  const SpectralField a = derivative(forward(u[1]), Axis::x1);
  SpectralField b = derivative(forward(u[0]), Axis::x2);
  b *= -1.0;
  SpectralField w = a;
  w += b;
  return inverse(w);
}

InitialFields build_initial(const Grid& g, const InitialDataSpec& spec) {
  InitialFields out{ScalarField(g, Parity::even), VectorField(g)};
  for (const auto& p : spec.r0) out.r0 += scalar_profile(g, p);

  const ScalarField rbar = vertical_average(out.r0);
  for (const auto& p : spec.u0) {
    const double pi = M_PI;
    if (p.profile == "geostrophic" || p.profile == "swirl" || p.profile == "potential") {
      ScalarField base(g, Parity::even);
      if (p.profile == "geostrophic") {
        for (int i = 0; i < g.Nh; ++i)
          for (int j = 0; j < g.Nh; ++j)
            for (int n = 0; n < g.Nv; ++n) base[g.idx(i, j, n)] = rbar[rbar.grid.idx(i, j)];
      } else {
        base = gaussian_plane_on(g, p.width);
      }
      const SpectralField bh = forward(base);
      const SpectralField d1 = derivative(bh, Axis::x1), d2 = derivative(bh, Axis::x2);
      ScalarField g1 = inverse(d1), g2 = inverse(d2);
      if (p.profile == "potential") {
        g1 *= p.amplitude;
        g2 *= p.amplitude;
        out.u0[0] += g1;
        out.u0[1] += g2;
      } else {
        g2 *= -p.amplitude;
        g1 *= p.amplitude;
        out.u0[0] += g2;
        out.u0[1] += g1;
      }
    } else if (p.profile == "shear" || p.profile == "vertical") {
      const bool shear = p.profile == "shear";
      ScalarField f(g, shear ? Parity::even : Parity::odd);
      for (int i = 0; i < g.Nh; ++i)
        for (int j = 0; j < g.Nh; ++j) {
          const double h = horizontal_gaussian(g, i, j, p.width);
          for (int n = 0; n < g.Nv; ++n) {
            const double z = pi * p.mode[2] * g.x3(n);
            f[g.idx(i, j, n)] = p.amplitude * h * (shear ? std::cos(z) : std::sin(z));
          }
        }
      out.u0[shear ? 0 : 2] += f;
    } else if (p.profile == "inertial") {
      ScalarField f(g, Parity::even);
      for (std::size_t s = 0; s < g.size(); ++s) f[s] = p.amplitude * std::cos(pi * p.mode[2] * g.x3(int(s % g.Nv)));
      out.u0[0] += f;
    } else if (p.profile == "noise") {
      std::mt19937_64 rng(p.seed);
      for (int a = 0; a < 3; ++a) out.u0[a] += noise(g, p, rng, a == 2 ? Parity::odd : Parity::even);
    } else {
      throw std::invalid_argument("unknown velocity profile '" + p.profile + "'");
    }
  }
  return out;
}

ProfileSpec profile_from_json(const nlohmann::json& j, bool velocity) {
  check_keys(j, {"profile", "amplitude", "width", "mode", "band", "seed"}, "profile");
  ProfileSpec p;
  p.profile = j.at("profile").get<std::string>();
  const auto& known = velocity ? kVelocityProfiles : kScalarProfiles;
  if (!known.count(p.profile)) throw std::invalid_argument("unknown profile '" + p.profile + "'");
  if (j.contains("amplitude")) p.amplitude = j["amplitude"].get<double>();
  if (j.contains("width")) p.width = j["width"].get<double>();
  if (j.contains("mode")) p.mode = j["mode"].get<std::array<int, 3>>();
  if (j.contains("band")) p.band = j["band"].get<int>();
  if (j.contains("seed")) p.seed = j["seed"].get<unsigned long long>();
  if (!(p.width > 0.0)) throw std::invalid_argument("profile width must be positive");
  if (p.band < 0 || p.mode[2] < 0) throw std::invalid_argument("band and vertical mode must be nonnegative");
  return p;
}

InitialDataSpec initial_data_from_json(const nlohmann::json& j) {
  check_keys(j, {"r0", "u0"}, "initial_data");
  InitialDataSpec s;
  if (j.contains("r0"))
    for (const auto& e : j["r0"]) s.r0.push_back(profile_from_json(e, false));
  if (j.contains("u0"))
    for (const auto& e : j["u0"]) s.u0.push_back(profile_from_json(e, true));
  return s;
}

nlohmann::json to_json(const InitialDataSpec& s) {
  auto one = [](const ProfileSpec& p) {
    return nlohmann::json{{"profile", p.profile}, {"amplitude", p.amplitude}, {"width", p.width},
                          {"mode", p.mode},       {"band", p.band},           {"seed", p.seed}};
  };
  nlohmann::json j{{"r0", nlohmann::json::array()}, {"u0", nlohmann::json::array()}};
  for (const auto& p : s.r0) j["r0"].push_back(one(p));
  for (const auto& p : s.u0) j["u0"].push_back(one(p));
  return j;
}

}  // namespace nskqg
