#pragma once
// nskqg command line: simulate | sweep | spectrum | rage | qg | lp-check.
//
// Parameters come from defaults, then an optional JSON file (--config), then
// flags named after the keys (--eps 0.1, --eps_list 0.2,0.1). Unknown keys and
// wrongly typed values are rejected before any computation. Outputs land in
// --out and each carries the config hash.
//
// Exit codes: 0 pass, 1 a pass flag failed, 2 configuration or runtime error.

#include <string>
#include <vector>

#include "json.hpp"

namespace nskqg {

struct RunConfig {
  std::string subcommand;
  nlohmann::json params;  // subcommand block, fully populated
  unsigned long long seed = 1;
  std::string out = "nskqg_out";
  std::vector<std::string> overrides;  // "key: file -> flag" records
  std::string hash;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

const std::vector<std::string>& subcommands();
nlohmann::json default_params(const std::string& subcommand);

// Merge an override block into params; throws ConfigError naming the key.
void merge_params(nlohmann::json& params, const nlohmann::json& block, const std::string& where);
// Semantic checks per subcommand (ranges, the gamma = 2 constraint, ...).
void validate_params(const std::string& subcommand, const nlohmann::json& params);

// Throws ConfigError. An empty subcommand means help was printed.
RunConfig parse(int argc, const char* const* argv);
int dispatch(const RunConfig& cfg);
int run_cli(int argc, const char* const* argv);

}  // namespace nskqg
