#include "glogit/config.hpp"

#include <cstdio>
#include <fstream>

#include "glogit/error.hpp"
#include "glogit/io.hpp"

namespace glogit {

using nlohmann::json;

namespace {

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config field '") + key + "': " + e.what());
  }
}

std::vector<double> read_grid(const json& v, const char* key) {
  if (v.is_array()) return v.get<std::vector<double>>();
  if (v.is_object()) {
    const double start = v.at("start").get<double>();
    const double stop = v.at("stop").get<double>();
    const double step = v.at("step").get<double>();
    if (!(step > 0.0) || stop < start) throw ValidationError(std::string("config field '") + key + "': bad range");
    std::vector<double> g;
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (int k = 0; k < count; ++k) g.push_back(std::round((start + k * step) * 1e10) / 1e10);
    return g;
  }
  throw ValidationError(std::string("config field '") + key + "' must be a list or {start, stop, step}");
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  if (j.contains("schema_version") && j.at("schema_version").get<int>() != kConfigSchemaVersion)
    throw ValidationError("unsupported config schema_version");
  static const char* known[] = {"schema_version", "input", "response", "standardize", "complete_cases",
                                "estimator", "tuning", "xi", "solver", "tolerance", "max_iterations",
                                "restarts", "gamma_grid", "gamma0", "chain_warm_start", "b_prime",
                                "threshold", "seed", "output_dir", "ci_level", "workers", "study"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw ValidationError("unknown config field '" + item.key() + "'");
  }
  RunConfig c;
  try {
    read(j, "input", c.input);
    read(j, "response", c.response);
    read(j, "standardize", c.standardize);
    read(j, "complete_cases", c.complete_cases);
    read(j, "estimator", c.estimator);
    if (j.contains("tuning") && !j.at("tuning").is_null()) c.tuning = j.at("tuning").get<double>();
    if (j.contains("xi")) {
      const auto xi = j.at("xi").get<std::vector<double>>();
      if (xi.size() != 2) throw ValidationError("config field 'xi' must have two entries");
      c.xi0 = xi[0];
      c.xi1 = xi[1];
    }
    read(j, "solver", c.solver);
    read(j, "tolerance", c.tolerance);
    read(j, "max_iterations", c.max_iterations);
    read(j, "restarts", c.restarts);
    if (j.contains("gamma_grid")) c.gamma_grid = read_grid(j.at("gamma_grid"), "gamma_grid");
    read(j, "gamma0", c.gamma0);
    read(j, "chain_warm_start", c.chain_warm_start);
    read(j, "b_prime", c.b_prime);
    read(j, "threshold", c.threshold);
    if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
    read(j, "output_dir", c.output_dir);
    read(j, "ci_level", c.ci_level);
    read(j, "workers", c.workers);
    if (j.contains("study")) {
      const json& s = j.at("study");
      StudySettings& st = c.study;
      read(s, "mode", st.mode);
      read(s, "setting", st.setting);
      read(s, "u0", st.u0);
      if (s.contains("u1")) st.u1 = read_grid(s.at("u1"), "study.u1");
      read(s, "replicates", st.replicates);
      read(s, "n", st.n);
      read(s, "beta_rule", st.beta_rule);
      read(s, "indexing", st.indexing);
      read(s, "beta_sd", st.beta_sd);
      read(s, "gamma", st.gamma);
      read(s, "methods", st.methods);
      if (s.contains("alpha_grid")) st.alpha_grid = read_grid(s.at("alpha_grid"), "study.alpha_grid");
      if (s.contains("eta_grid")) st.eta_grid = read_grid(s.at("eta_grid"), "study.eta_grid");
      if (s.contains("xi")) {
        const auto xi = s.at("xi").get<std::vector<double>>();
        if (xi.size() != 2) throw ValidationError("config field 'study.xi' must have two entries");
        st.xi0 = xi[0];
        st.xi1 = xi[1];
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad config: ") + e.what());
  }
  return c;
}

json RunConfig::to_json() const {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["input"] = input;
  j["response"] = response;
  j["standardize"] = standardize;
  j["complete_cases"] = complete_cases;
  j["estimator"] = estimator;
  j["tuning"] = tuning ? json(*tuning) : json(nullptr);
  j["xi"] = {xi0, xi1};
  j["solver"] = solver;
  j["tolerance"] = tolerance;
  j["max_iterations"] = max_iterations;
  j["restarts"] = restarts;
  j["gamma_grid"] = gamma_grid;
  j["gamma0"] = gamma0;
  j["chain_warm_start"] = chain_warm_start;
  j["b_prime"] = b_prime;
  j["threshold"] = threshold;
  j["seed"] = seed ? json(*seed) : json(nullptr);
  j["output_dir"] = output_dir;
  j["ci_level"] = ci_level;
  j["workers"] = workers;
  json s;
  s["mode"] = study.mode;
  s["setting"] = study.setting;
  s["u0"] = study.u0;
  s["u1"] = study.u1;
  s["replicates"] = study.replicates;
  s["n"] = study.n;
  s["beta_rule"] = study.beta_rule;
  s["indexing"] = study.indexing;
  s["beta_sd"] = study.beta_sd;
  s["gamma"] = study.gamma;
  s["methods"] = study.methods;
  s["alpha_grid"] = study.alpha_grid;
  s["eta_grid"] = study.eta_grid;
  s["xi"] = {study.xi0, study.xi1};
  j["study"] = s;
  return j;
}

void RunConfig::validate(const std::string& command) const {
  if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
  if (max_iterations < 1) throw ValidationError("max_iterations must be at least 1");
  if (restarts < 0) throw ValidationError("restarts must be nonnegative");
  solver_kind_from_string(solver);
  const EstimatorKind kind = estimator_kind_from_string(estimator);
  if (tuning) {
    EstimatorSpec spec{kind, *tuning, 0.0};
    if (kind == EstimatorKind::XiLogistic) spec = EstimatorSpec::xi(xi0, xi1);
    glogit::validate(spec);
  } else if (kind == EstimatorKind::AlphaLogistic || kind == EstimatorKind::ConstantMislabel) {
    throw ValidationError("estimator '" + estimator + "' needs a tuning value");
  } else if (kind == EstimatorKind::XiLogistic) {
    glogit::validate(EstimatorSpec::xi(xi0, xi1));
  }
  if (gamma_grid.empty()) throw ValidationError("gamma grid is empty");
  for (double g : gamma_grid)
    if (!(g > 0.0)) throw ValidationError("gamma grid values must be positive");
  if (!(gamma0 > 0.0)) throw ValidationError("gamma0 must be positive");
  if (b_prime < 1) throw ValidationError("b_prime must be at least 1");
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ValidationError("threshold must lie in (0, 1]");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw ValidationError("ci_level must lie in (0, 1)");
  if (workers < 1) throw ValidationError("workers must be at least 1");
  if (output_dir.empty()) throw ValidationError("output directory is empty");
  const bool stochastic = command == "detect" || command == "pipeline" || command == "simulate";
  if (stochastic && !seed) throw ValidationError("command '" + command + "' needs a seed (--seed)");
  if (command == "detect" && kind != EstimatorKind::GammaLogistic)
    throw ValidationError("detect needs the gamma estimator");
  if (command == "simulate") glogit::validate(study_config(*this));
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return RunConfig::from_json(j);
}

std::string config_hash(const RunConfig& cfg) {
  // Where results go and how many threads compute them do not change the results.
  json j = cfg.to_json();
  j.erase("output_dir");
  j.erase("workers");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions o;
  o.tolerance = cfg.tolerance;
  o.max_iterations = cfg.max_iterations;
  o.solver = solver_kind_from_string(cfg.solver);
  o.restarts = cfg.restarts;
  o.restart_seed = cfg.seed.value_or(0);
  return o;
}

StudyConfig study_config(const RunConfig& cfg) {
  const StudySettings& s = cfg.study;
  StudyConfig sc;
  if (s.mode == "table1") sc.mode = StudyMode::Table1;
  else if (s.mode == "selection") sc.mode = StudyMode::Selection;
  else throw ValidationError("study mode must be 'table1' or 'selection'");
  sc.setting = mislabel_setting_from_string(s.setting);
  sc.u0 = s.u0;
  sc.u1_values = s.u1;
  sc.replicates = s.replicates;
  sc.n = s.n;
  const std::string rule = s.beta_rule.empty() ? (sc.mode == StudyMode::Table1 ? "fixed" : "random") : s.beta_rule;
  if (rule == "fixed") sc.beta_rule = BetaRule::Fixed;
  else if (rule == "random") sc.beta_rule = BetaRule::RandomNormal;
  else throw ValidationError("beta_rule must be 'fixed' or 'random'");
  if (s.indexing == "intercept_first") sc.indexing = Table1Indexing::InterceptFirst;
  else if (s.indexing == "covariate_first") sc.indexing = Table1Indexing::CovariateFirst;
  else throw ValidationError("indexing must be 'intercept_first' or 'covariate_first'");
  sc.beta_sd = s.beta_sd;
  sc.gamma = s.gamma;
  sc.methods.clear();
  for (const auto& m : s.methods) sc.methods.push_back(study_method_from_string(m));
  sc.gamma_grid = cfg.gamma_grid;
  sc.alpha_grid = s.alpha_grid;
  sc.gamma0 = cfg.gamma0;
  sc.eta_grid = s.eta_grid;
  sc.xi0 = s.xi0;
  sc.xi1 = s.xi1;
  sc.solver.solver = solver_options(cfg);
  sc.solver.chain_warm_start = cfg.chain_warm_start;
  sc.workers = cfg.workers;
  if (cfg.input.empty()) {
    sc.covariates = pima_design(cfg.complete_cases);
  } else {
    LoadedData d = load_csv(cfg.input, cfg.response);
    if (cfg.complete_cases) d = complete_cases(d);
    sc.covariates = standardize(d.data, d.covariate_names).data.X;
  }
  return sc;
}

}  // namespace glogit
