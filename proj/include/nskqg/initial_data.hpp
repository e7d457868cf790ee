#pragma once
// Named analytic profiles for r0 and u0.
//
// scalar profiles (r0):
//   gaussian   a exp(-|x_h - c|^2 / (2 w^2)) cos(pi m3 x3)
//   mode       a cos(2 pi (m1 x1 + m2 x2) / Lh) cos(pi m3 x3)
//   noise      band-limited random field, |m1|,|m2| <= band, m3 <= m3; rms a
// velocity profiles (u0):
//   geostrophic   u_h = a grad_perp <r0>_3, u3 = 0
//   swirl         u_h = a grad_perp g, g the gaussian above without the x3 factor
//   potential     u_h = a grad g (horizontally divergent)
//   shear         u1 = a g cos(pi m3 x3)
//   vertical      u3 = a g sin(pi m3 x3)
//   inertial      u1 = a cos(pi m3 x3), horizontally uniform
//   noise         random in each component with the parity of that component

#include <array>
#include <string>
#include <vector>

#include "json.hpp"
#include "nskqg/spectral_grid.hpp"

namespace nskqg {

struct ProfileSpec {
  std::string profile = "gaussian";
  double amplitude = 1.0;
  double width = 1.0;
  std::array<int, 3> mode{1, 0, 0};  // (m1, m2, m3)
  int band = 4;
  unsigned long long seed = 1;
};

struct InitialDataSpec {
  std::vector<ProfileSpec> r0;
  std::vector<ProfileSpec> u0;
};

struct InitialFields {
  ScalarField r0;
  VectorField u0;
};

ScalarField scalar_profile(const Grid& g, const ProfileSpec& p);
InitialFields build_initial(const Grid& g, const InitialDataSpec& spec);

// Third component of curl u, averaged source for the limit data.
ScalarField vertical_vorticity(const VectorField& u);

// Strict parsing: unknown keys and unknown profile names throw std::invalid_argument.
ProfileSpec profile_from_json(const nlohmann::json& j, bool velocity);
InitialDataSpec initial_data_from_json(const nlohmann::json& j);
nlohmann::json to_json(const InitialDataSpec& s);

}  // namespace nskqg
