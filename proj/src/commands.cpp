#include "glogit/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "glogit/detection.hpp"
#include "glogit/error.hpp"
#include "glogit/inference.hpp"
#include "glogit/io.hpp"
#include "glogit/selection.hpp"
#include "glogit/simulation.hpp"

namespace glogit {

using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json num_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num_json(v(i)));
  return a;
}

class OutputWriter {
 public:
  OutputWriter(const RunConfig& cfg, std::string command) : cfg_(cfg), command_(std::move(command)) {
    hash_ = config_hash(cfg);
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + cfg.output_dir + "': " + ec.message());
    std::ostringstream h;
    h << "# glogit " << kLibraryVersion << " command=" << command_
      << " seed=" << (cfg.seed ? std::to_string(*cfg.seed) : std::string("none")) << " config_hash=" << hash_ << '\n';
    header_ = h.str();
  }

  void write(const std::string& name, const std::string& body) {
    const std::string path = (std::filesystem::path(cfg_.output_dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << header_ << body;
    if (!out) throw IoError("failed while writing '" + path + "'");
    files_.push_back(path);
  }

  CommandOutput finish(json summary) {
    json m;
    m["library_version"] = kLibraryVersion;
    m["command"] = command_;
    m["seed"] = cfg_.seed ? json(*cfg_.seed) : json(nullptr);
    m["config_hash"] = hash_;
    m["config"] = cfg_.to_json();
    json names = json::array();
    for (const auto& f : files_) names.push_back(std::filesystem::path(f).filename().string());
    m["files"] = names;
    m["summary"] = summary;
    const std::string path = (std::filesystem::path(cfg_.output_dir) / "manifest.json").string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << m.dump(2) << '\n';
    files_.push_back(path);
    return {files_, summary};
  }

 private:
  const RunConfig& cfg_;
  std::string command_;
  std::string hash_;
  std::string header_;
  std::vector<std::string> files_;
};

struct Prepared {
  Dataset data;
  std::vector<std::string> names;  // including "intercept"
  std::optional<Standardization> transform;
  std::string path;
};

Prepared prepare(const RunConfig& cfg) {
  Prepared p;
  p.path = cfg.input.empty() ? bundled_pima_path() : cfg.input;
  LoadedData d = load_csv(p.path, cfg.response);
  if (cfg.complete_cases) d = complete_cases(d);
  p.names = d.covariate_names;
  if (cfg.standardize) {
    StandardizedData s = standardize(d.data, d.covariate_names);
    p.data = std::move(s.data);
    p.transform = std::move(s.transform);
  } else {
    p.data.X.resize(d.data.n(), d.data.p() + 1);
    p.data.X.leftCols(d.data.p()) = d.data.X;
    p.data.X.col(d.data.p()).setOnes();
    p.data.y = d.data.y;
  }
  p.names.push_back("intercept");
  validate(p.data);
  return p;
}

SelectionOptions selection_options(const RunConfig& cfg) {
  SelectionOptions so;
  so.solver = solver_options(cfg);
  so.chain_warm_start = cfg.chain_warm_start;
  return so;
}

std::string selection_csv(const SelectionResult& s) {
  std::ostringstream o;
  o << "gamma,criterion,converged,status,chosen\n";
  for (std::size_t k = 0; k < s.grid.size(); ++k)
    o << num(s.grid[k]) << ',' << num(s.criterion[k]) << ',' << (s.fits[k].converged ? 1 : 0) << ','
      << to_string(s.fits[k].status) << ',' << (k == s.chosen_index ? 1 : 0) << '\n';
  return o.str();
}

json selection_json(const SelectionResult& s, double gamma0) {
  json j;
  j["chosen_gamma"] = s.chosen_gamma;
  j["gamma0"] = gamma0;
  j["warnings"] = s.warnings;
  return j;
}

// The fit requested by the config; an unset gamma is chosen adaptively.
FitResult resolve_fit(const RunConfig& cfg, const Dataset& data, std::optional<SelectionResult>& selection) {
  const EstimatorKind kind = estimator_kind_from_string(cfg.estimator);
  const SolverOptions opts = solver_options(cfg);
  if (kind == EstimatorKind::GammaLogistic && !cfg.tuning) {
    selection = select_gamma_adaptive(data, cfg.gamma_grid, cfg.gamma0, selection_options(cfg));
    return selection->fits[selection->chosen_index];
  }
  EstimatorSpec spec{kind, cfg.tuning.value_or(0.0), 0.0};
  if (kind == EstimatorKind::XiLogistic) spec = EstimatorSpec::xi(cfg.xi0, cfg.xi1);
  if (kind == EstimatorKind::MLE) spec = EstimatorSpec::mle();
  return fit(data, spec, opts);
}

json fit_json(const FitResult& f) {
  json j;
  j["estimator"] = to_string(f.spec.kind);
  j["tuning"] = f.spec.kind == EstimatorKind::XiLogistic ? json({f.spec.tuning, f.spec.tuning1}) : json(f.spec.tuning);
  j["converged"] = f.converged;
  j["status"] = to_string(f.status);
  j["iterations"] = f.iterations;
  j["final_score_norm"] = num_json(f.final_score_norm);
  j["objective"] = num_json(f.objective);
  j["solver"] = to_string(f.solver);
  j["separation_detected"] = f.separation_detected;
  j["message"] = f.message;
  j["beta_hat"] = vec_json(f.beta_hat);
  return j;
}

void require_converged(const FitResult& f) {
  if (!f.converged)
    throw ConvergenceError("fit did not converge (" + to_string(f.status) + ")" +
                           (f.message.empty() ? "" : ": " + f.message));
}

std::string coefficient_csv(const Prepared& p, const FitResult& f, const CovarianceReport* cov) {
  std::ostringstream o;
  o << "coefficient,estimate";
  if (cov) o << ",se,lower,upper";
  if (p.transform) o << ",raw_scale_estimate";
  o << '\n';
  const Vector raw = p.transform ? back_transform(f.beta_hat, *p.transform) : Vector();
  for (Eigen::Index j = 0; j < f.beta_hat.size(); ++j) {
    o << p.names[j] << ',' << num(f.beta_hat(j));
    if (cov) o << ',' << num(cov->se(j)) << ',' << num(cov->ci_lower(j)) << ',' << num(cov->ci_upper(j));
    if (p.transform) o << ',' << num(raw(j));
    o << '\n';
  }
  return o.str();
}

std::string matrix_csv(const Matrix& M, const std::vector<std::string>& names) {
  std::ostringstream o;
  o << "row";
  for (const auto& n : names) o << ',' << n;
  o << '\n';
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    o << names[i];
    for (Eigen::Index j = 0; j < M.cols(); ++j) o << ',' << num(M(i, j));
    o << '\n';
  }
  return o.str();
}

std::string pvalue_csv(const Dataset& d, const PvReport& r) {
  std::ostringstream o;
  o << "row,y,weight,pv,flag\n";
  for (Eigen::Index i = 0; i < d.n(); ++i)
    o << i << ',' << d.y(i) << ',' << num(r.observed_weights(i)) << ',' << num(r.pv(i)) << ',' << r.flags(i) << '\n';
  return o.str();
}

}  // namespace

CommandOutput cmd_fit(const RunConfig& cfg) {
  cfg.validate("fit");
  OutputWriter out(cfg, "fit");
  const Prepared p = prepare(cfg);
  std::optional<SelectionResult> sel;
  const FitResult f = resolve_fit(cfg, p.data, sel);
  out.write("coefficients.csv", coefficient_csv(p, f, nullptr));
  std::ostringstream w;
  w << "row,y,weight\n";
  for (Eigen::Index i = 0; i < p.data.n(); ++i) w << i << ',' << p.data.y(i) << ',' << num(f.weights(i)) << '\n';
  out.write("weights.csv", w.str());
  json s;
  s["input"] = p.path;
  s["n"] = p.data.n();
  s["coefficient_names"] = p.names;
  s["fit"] = fit_json(f);
  if (sel) {
    out.write("gamma_selection.csv", selection_csv(*sel));
    s["selection"] = selection_json(*sel, cfg.gamma0);
  }
  CommandOutput res = out.finish(s);
  require_converged(f);
  return res;
}

CommandOutput cmd_select(const RunConfig& cfg) {
  cfg.validate("select");
  OutputWriter out(cfg, "select");
  const Prepared p = prepare(cfg);
  const SelectionResult sel = select_gamma_adaptive(p.data, cfg.gamma_grid, cfg.gamma0, selection_options(cfg));
  out.write("gamma_selection.csv", selection_csv(sel));
  json s;
  s["input"] = p.path;
  s["n"] = p.data.n();
  s["selection"] = selection_json(sel, cfg.gamma0);
  s["fit"] = fit_json(sel.fits[sel.chosen_index]);
  return out.finish(s);
}

CommandOutput cmd_cov(const RunConfig& cfg) {
  cfg.validate("cov");
  OutputWriter out(cfg, "cov");
  const Prepared p = prepare(cfg);
  std::optional<SelectionResult> sel;
  const FitResult f = resolve_fit(cfg, p.data, sel);
  require_converged(f);
  const CovarianceReport cov = sandwich_covariance(p.data, f, cfg.ci_level);
  out.write("coefficients.csv", coefficient_csv(p, f, &cov));
  out.write("H_hat.csv", matrix_csv(cov.H_hat, p.names));
  out.write("U_hat.csv", matrix_csv(cov.U_hat, p.names));
  out.write("Delta_hat.csv", matrix_csv(cov.Delta_hat, p.names));
  out.write("Sigma_hat.csv", matrix_csv(cov.Sigma_hat, p.names));
  json s;
  s["input"] = p.path;
  s["n"] = p.data.n();
  s["fit"] = fit_json(f);
  s["ci_level"] = cfg.ci_level;
  s["condition_number"] = num_json(cov.condition);
  s["se"] = vec_json(cov.se);
  if (sel) s["selection"] = selection_json(*sel, cfg.gamma0);
  return out.finish(s);
}

CommandOutput cmd_detect(const RunConfig& cfg) {
  cfg.validate("detect");
  OutputWriter out(cfg, "detect");
  const Prepared p = prepare(cfg);
  std::optional<SelectionResult> sel;
  const FitResult f = resolve_fit(cfg, p.data, sel);
  require_converged(f);
  const PvReport pv = bootstrap_pvalues(p.data, f, cfg.b_prime, *cfg.seed, cfg.threshold, cfg.workers);
  out.write("pvalues.csv", pvalue_csv(p.data, pv));
  json s;
  s["input"] = p.path;
  s["n"] = p.data.n();
  s["fit"] = fit_json(f);
  s["b_prime"] = cfg.b_prime;
  s["threshold"] = cfg.threshold;
  s["flagged"] = pv.flags.sum();
  if (sel) s["selection"] = selection_json(*sel, cfg.gamma0);
  return out.finish(s);
}

CommandOutput cmd_pipeline(const RunConfig& cfg) {
  cfg.validate("pipeline");
  OutputWriter out(cfg, "pipeline");
  const Prepared p = prepare(cfg);
  const Dataset& d = p.data;

  const SelectionResult sel = select_gamma_adaptive(d, cfg.gamma_grid, cfg.gamma0, selection_options(cfg));
  const FitResult& fg = sel.fits[sel.chosen_index];
  const CovarianceReport cg = sandwich_covariance(d, fg, cfg.ci_level);
  const FitResult fm = fit(d, EstimatorSpec::mle(), solver_options(cfg));
  require_converged(fm);
  const CovarianceReport cm = sandwich_covariance(d, fm, cfg.ci_level);

  std::ostringstream coef;
  coef << "coefficient,gamma_estimate,gamma_se,gamma_lower,gamma_upper,gamma_significant,"
          "mle_estimate,mle_se,mle_lower,mle_upper,mle_significant\n";
  json sig_g = json::array(), sig_m = json::array();
  for (Eigen::Index j = 0; j < fg.beta_hat.size(); ++j) {
    const bool sg = cg.ci_lower(j) > 0.0 || cg.ci_upper(j) < 0.0;
    const bool sm = cm.ci_lower(j) > 0.0 || cm.ci_upper(j) < 0.0;
    coef << p.names[j] << ',' << num(fg.beta_hat(j)) << ',' << num(cg.se(j)) << ',' << num(cg.ci_lower(j)) << ','
         << num(cg.ci_upper(j)) << ',' << (sg ? 1 : 0) << ',' << num(fm.beta_hat(j)) << ',' << num(cm.se(j)) << ','
         << num(cm.ci_lower(j)) << ',' << num(cm.ci_upper(j)) << ',' << (sm ? 1 : 0) << '\n';
    if (p.names[j] == "intercept") continue;
    if (sg) sig_g.push_back(p.names[j]);
    if (sm) sig_m.push_back(p.names[j]);
  }
  const Eigen::Index k = fg.beta_hat.size() - 1;
  const double width_g = 2.0 * cg.se.head(k).mean() * wald_quantile(cfg.ci_level);
  const double width_m = 2.0 * cm.se.head(k).mean() * wald_quantile(cfg.ci_level);

  std::ostringstream prob;
  prob << "row,y,pi_gamma,pi_mle\n";
  const Vector tg = d.X * fg.beta_hat;
  const Vector tm = d.X * fm.beta_hat;
  for (Eigen::Index i = 0; i < d.n(); ++i)
    prob << i << ',' << d.y(i) << ',' << num(logistic(tg(i))) << ',' << num(logistic(tm(i))) << '\n';

  const PvReport pv = bootstrap_pvalues(d, fg, cfg.b_prime, *cfg.seed, cfg.threshold, cfg.workers);
  const auto drivers = driver_analysis(d, pv);

  std::ostringstream drv;
  drv << "group,coefficient,value\n";
  json groups = json::array();
  for (const auto& g : drivers) {
    json gj;
    gj["group"] = g.group;
    gj["size"] = g.size;
    gj["flagged"] = g.flagged;
    gj["analyzed"] = g.analyzed;
    gj["notice"] = g.notice;
    gj["separation"] = g.separation;
    gj["auc"] = g.analyzed ? num_json(g.auc) : json(nullptr);
    if (g.analyzed) {
      gj["coefficients"] = vec_json(g.coefficients);
      for (Eigen::Index j = 0; j < g.coefficients.size(); ++j)
        drv << g.group << ',' << p.names[j] << ',' << num(g.coefficients(j)) << '\n';
    }
    groups.push_back(gj);
  }

  out.write("gamma_selection.csv", selection_csv(sel));
  out.write("coefficients.csv", coef.str());
  out.write("fitted_probabilities.csv", prob.str());
  out.write("pvalues.csv", pvalue_csv(d, pv));
  out.write("drivers.csv", drv.str());

  json s;
  s["input"] = p.path;
  s["n"] = d.n();
  s["coefficient_names"] = p.names;
  s["selection"] = selection_json(sel, cfg.gamma0);
  s["gamma_fit"] = fit_json(fg);
  s["mle_fit"] = fit_json(fm);
  s["significant_gamma"] = sig_g;
  s["significant_mle"] = sig_m;
  s["mean_ci_width_gamma"] = num_json(width_g);
  s["mean_ci_width_mle"] = num_json(width_m);
  s["b_prime"] = cfg.b_prime;
  s["threshold"] = cfg.threshold;
  s["flagged"] = pv.flags.sum();
  s["drivers"] = groups;
  return out.finish(s);
}

CommandOutput cmd_simulate(const RunConfig& cfg) {
  cfg.validate("simulate");
  OutputWriter out(cfg, "simulate");
  const StudyConfig sc = study_config(cfg);
  const ReplicateReport rep = run_study(sc, *cfg.seed);
  json s;
  s["mode"] = cfg.study.mode;
  s["setting"] = cfg.study.setting;
  s["replicates"] = sc.replicates;
  s["notes"] = rep.notes;
  if (sc.mode == StudyMode::Table1) {
    out.write("table1.csv", table1_csv(rep));
    s["converged_replicates"] = rep.table1_converged;
    s["failed_replicates"] = rep.table1_failed;
    json rows = json::array();
    for (const auto& r : rep.table1)
      rows.push_back({{"coefficient", r.label}, {"storage_index", r.storage_index}, {"truth", r.truth},
                      {"mean", num_json(r.mean)}, {"sd", num_json(r.sd)}, {"se", num_json(r.se)}});
    s["table1"] = rows;
  } else {
    out.write("table2.csv", table2_csv(rep));
    out.write("figure3.csv", figure3_csv(rep));
    json rows = json::array();
    for (const auto& r : rep.table2)
      rows.push_back({{"u1", r.u1}, {"mean_gamma", num_json(r.mean_gamma)},
                      {"mean_gamma_oracle", num_json(r.mean_gamma_oracle)}});
    s["table2"] = rows;
    json curves = json::array();
    for (const auto& r : rep.figure3)
      curves.push_back({{"method", to_string(r.method)}, {"u1", r.u1}, {"tau", num_json(r.tau)},
                        {"mean_ca", num_json(r.mean_ca)}, {"se_ca", num_json(r.se_ca)}});
    s["figure3"] = curves;
  }
  out.write("replicates.csv", replicates_csv(rep));
  return out.finish(s);
}

CommandOutput run_command(const std::string& command, const RunConfig& cfg) {
  if (command == "fit") return cmd_fit(cfg);
  if (command == "select") return cmd_select(cfg);
  if (command == "cov") return cmd_cov(cfg);
  if (command == "detect") return cmd_detect(cfg);
  if (command == "pipeline") return cmd_pipeline(cfg);
  if (command == "simulate") return cmd_simulate(cfg);
  throw ValidationError("unknown command '" + command + "'");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return 2;
  if (dynamic_cast<const ConvergenceError*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e)) return 4;
  return 1;
}

}  // namespace glogit
