#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "glogit/estimators.hpp"
#include "glogit/simulation.hpp"

namespace glogit {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kConfigSchemaVersion = 1;

struct StudySettings {
  std::string mode = "table1";  // table1 | selection
  std::string setting = "S1";
  double u0 = 0.05;
  std::vector<double> u1{0.1};
  int replicates = 500;
  int n = 500;
  std::string beta_rule;        // fixed | random; empty picks the mode's default
  std::string indexing = "intercept_first";
  double beta_sd = 2.0;
  double gamma = 2.0;
  std::vector<std::string> methods{"logistic", "gamma", "gamma_oracle"};
  std::vector<double> alpha_grid = default_gamma_grid();
  std::vector<double> eta_grid = default_eta_grid();
  double xi0 = 0.05;
  double xi1 = 0.05;
};

struct RunConfig {
  std::string input;  // empty means the bundled Pima file
  std::string response = "Outcome";
  bool standardize = true;
  bool complete_cases = false;
  std::string estimator = "gamma";
  std::optional<double> tuning;  // unset gamma means adaptive selection
  double xi0 = 0.05;
  double xi1 = 0.05;
  std::string solver = "fixed_point";
  double tolerance = 1e-8;
  int max_iterations = 500;
  int restarts = 0;
  std::vector<double> gamma_grid = default_gamma_grid();
  double gamma0 = 0.1;
  bool chain_warm_start = false;
  int b_prime = 2000;
  double threshold = 0.01;
  std::optional<std::uint64_t> seed;
  std::string output_dir = "glogit_out";
  double ci_level = 0.95;
  unsigned workers = 1;
  StudySettings study;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  // Checks ranges and the command-specific requirements such as a seed for stochastic commands.
  void validate(const std::string& command) const;
};

RunConfig load_config_file(const std::string& path);
// FNV-1a over the canonical JSON of the effective configuration, output directory and
// worker count left out.
std::string config_hash(const RunConfig& cfg);
SolverOptions solver_options(const RunConfig& cfg);
StudyConfig study_config(const RunConfig& cfg);

}  // namespace glogit
