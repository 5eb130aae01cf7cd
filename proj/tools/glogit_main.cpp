#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glogit/commands.hpp"
#include "glogit/error.hpp"

namespace {

struct Flags {
  std::string config;
  std::string input, response, estimator, solver, output, mode, setting, beta_rule, indexing;
  double tuning = 0, tolerance = 0, gamma0 = 0, threshold = 0, ci_level = 0, u0 = 0, study_gamma = 0;
  std::vector<double> xi, gamma_grid, u1;
  std::vector<std::string> methods;
  int max_iterations = 0, restarts = 0, b_prime = 0, replicates = 0, n = 0;
  unsigned workers = 0;
  std::uint64_t seed = 0;
  bool chain = false, complete_cases = false, no_standardize = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON configuration file");
  sub->add_option("--input", f.input, "CSV input (default: bundled Pima data)");
  sub->add_option("--response", f.response, "response column name");
  sub->add_option("--estimator", f.estimator, "mle | gamma | alpha | constant_mislabel | xi");
  sub->add_option("--tuning", f.tuning, "gamma, alpha or eta; omit for adaptive gamma");
  sub->add_option("--xi", f.xi, "xi0 xi1")->expected(2);
  sub->add_option("--solver", f.solver, "fixed_point | quasi_newton");
  sub->add_option("--tolerance", f.tolerance, "max-abs score tolerance");
  sub->add_option("--max-iterations", f.max_iterations);
  sub->add_option("--restarts", f.restarts, "random restarts around the MLE");
  sub->add_option("--gamma-grid", f.gamma_grid, "gamma values for selection")->delimiter(',');
  sub->add_option("--gamma0", f.gamma0);
  sub->add_flag("--chain", f.chain, "warm-start each grid fit from the previous one");
  sub->add_option("--b-prime", f.b_prime, "bootstrap replicates");
  sub->add_option("--threshold", f.threshold, "p-value flagging threshold");
  sub->add_option("--seed", f.seed, "random seed (required for detect, pipeline, simulate)");
  sub->add_option("--output", f.output, "output directory");
  sub->add_option("--ci-level", f.ci_level);
  sub->add_option("--workers", f.workers, "worker threads");
  sub->add_flag("--complete-cases", f.complete_cases, "drop Pima rows with zero Glucose/BP/skin/BMI");
  sub->add_flag("--no-standardize", f.no_standardize, "use raw covariates plus an intercept");
}

void add_study(CLI::App* sub, Flags& f) {
  sub->add_option("--mode", f.mode, "table1 | selection");
  sub->add_option("--setting", f.setting, "S1 | S2 | S3 | S4");
  sub->add_option("--u0", f.u0);
  sub->add_option("--u1", f.u1)->delimiter(',');
  sub->add_option("--replicates", f.replicates);
  sub->add_option("--n", f.n, "training sample size");
  sub->add_option("--beta-rule", f.beta_rule, "fixed | random");
  sub->add_option("--indexing", f.indexing, "intercept_first | covariate_first");
  sub->add_option("--study-gamma", f.study_gamma, "gamma used in table1 mode");
  sub->add_option("--methods", f.methods)->delimiter(',');
}

glogit::RunConfig build(CLI::App* sub, const Flags& f) {
  glogit::RunConfig c = f.config.empty() ? glogit::RunConfig{} : glogit::load_config_file(f.config);
  auto given = [&](const char* name) { return sub->count(name) > 0; };
  if (given("--input")) c.input = f.input;
  if (given("--response")) c.response = f.response;
  if (given("--estimator")) c.estimator = f.estimator;
  if (given("--tuning")) c.tuning = f.tuning;
  if (given("--xi")) {
    c.xi0 = f.xi[0];
    c.xi1 = f.xi[1];
  }
  if (given("--solver")) c.solver = f.solver;
  if (given("--tolerance")) c.tolerance = f.tolerance;
  if (given("--max-iterations")) c.max_iterations = f.max_iterations;
  if (given("--restarts")) c.restarts = f.restarts;
  if (given("--gamma-grid")) c.gamma_grid = f.gamma_grid;
  if (given("--gamma0")) c.gamma0 = f.gamma0;
  if (given("--chain")) c.chain_warm_start = true;
  if (given("--b-prime")) c.b_prime = f.b_prime;
  if (given("--threshold")) c.threshold = f.threshold;
  if (given("--seed")) c.seed = f.seed;
  if (given("--output")) c.output_dir = f.output;
  if (given("--ci-level")) c.ci_level = f.ci_level;
  if (given("--workers")) c.workers = f.workers;
  if (given("--complete-cases")) c.complete_cases = true;
  if (given("--no-standardize")) c.standardize = false;
  if (sub->get_name() == "simulate") {
    if (given("--mode")) c.study.mode = f.mode;
    if (given("--setting")) c.study.setting = f.setting;
    if (given("--u0")) c.study.u0 = f.u0;
    if (given("--u1")) c.study.u1 = f.u1;
    if (given("--replicates")) c.study.replicates = f.replicates;
    if (given("--n")) c.study.n = f.n;
    if (given("--beta-rule")) c.study.beta_rule = f.beta_rule;
    if (given("--indexing")) c.study.indexing = f.indexing;
    if (given("--study-gamma")) c.study.gamma = f.study_gamma;
    if (given("--methods")) c.study.methods = f.methods;
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust logistic regression for mislabeled binary responses"};
  app.require_subcommand(1);
  Flags f;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"fit", "fit one estimator"},
      {"select", "adaptive gamma selection over a grid"},
      {"cov", "fit plus sandwich covariance and Wald intervals"},
      {"detect", "bootstrap p-values for suspected mislabels"},
      {"pipeline", "selection, inference, detection and driver analysis"},
      {"simulate", "replicate study on resampled Pima covariates"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, f);
    if (name == "simulate") add_study(sub, f);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  for (CLI::App* sub : subs) {
    if (!sub->parsed()) continue;
    try {
      const glogit::RunConfig cfg = build(sub, f);
      const glogit::CommandOutput out = glogit::run_command(sub->get_name(), cfg);
      for (const auto& file : out.files) std::cout << file << '\n';
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return glogit::exit_code_for(e);
    }
  }
  return 2;
}
