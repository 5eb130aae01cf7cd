#include "glogit/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "glogit/error.hpp"
#include "glogit/estimators.hpp"
#include "glogit/inference.hpp"
#include "glogit/parallel.hpp"

namespace glogit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kStudyTag = 0x7374756479726570ull;

std::string num(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double indicator_window(double u, double v, double a1, double a2) {
  return (std::abs(u - a1) < 3.0 && std::abs(v - a2) < 3.0) ? 1.0 : 0.0;
}

}  // namespace

std::string to_string(MislabelSetting s) {
  switch (s) {
    case MislabelSetting::S1: return "S1";
    case MislabelSetting::S2: return "S2";
    case MislabelSetting::S3: return "S3";
    case MislabelSetting::S4: return "S4";
  }
  return "?";
}

MislabelSetting mislabel_setting_from_string(const std::string& name) {
  if (name == "S1" || name == "s1") return MislabelSetting::S1;
  if (name == "S2" || name == "s2") return MislabelSetting::S2;
  if (name == "S3" || name == "s3") return MislabelSetting::S3;
  if (name == "S4" || name == "s4") return MislabelSetting::S4;
  throw ValidationError("unknown mislabel setting '" + name + "'");
}

MislabelMechanism MislabelMechanism::draw(MislabelSetting setting, double u0, double u1, Eigen::Index p,
                                          Philox4x32& rng) {
  MislabelMechanism m;
  m.setting = setting;
  m.u0 = u0;
  m.u1 = u1;
  m.b0.resize(p);
  m.b1.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) m.b0(j) = rng.normal(0.0, 2.0);
  for (Eigen::Index j = 0; j < p; ++j) m.b1(j) = rng.normal(0.0, 2.0);
  m.a = rng.normal(2.0, 0.3);
  validate(m);
  return m;
}

void validate(const MislabelMechanism& mech) {
  if (!(mech.u0 >= 0.0 && mech.u0 <= 0.5) || !(mech.u1 >= 0.0 && mech.u1 <= 0.5))
    throw ValidationError("u0 and u1 must lie in [0, 0.5]");
}

MislabelPair eta_functions(const MislabelMechanism& mech, const Vector& x, const Vector& beta0) {
  const double du = mech.u1 - mech.u0;
  switch (mech.setting) {
    case MislabelSetting::S1:
      return {mech.u0, mech.u1};
    case MislabelSetting::S2: {
      const double e = mech.u0 + du * success_prob(x, beta0);
      return {e, e};
    }
    case MislabelSetting::S3:
      if (mech.b0.size() != x.size() || mech.b1.size() != x.size())
        throw ValidationError("S3 auxiliaries do not match the covariate length");
      return {mech.u0 + du * success_prob(x, mech.b0), mech.u0 + du * success_prob(x, mech.b1)};
    case MislabelSetting::S4:
      if (x.size() < 3) throw ValidationError("S4 needs at least three covariates");
      return {mech.u0 + du * indicator_window(x(0), x(2), mech.a, -mech.a),
              mech.u0 + du * indicator_window(x(0), x(1), -mech.a, -mech.a)};
  }
  return {};
}

ContaminatedSample generate_contaminated(const Matrix& X, const Vector& beta0, const MislabelMechanism& mech,
                                         Philox4x32& rng) {
  validate(mech);
  if (X.cols() != beta0.size()) throw ValidationError("beta0 length does not match covariates");
  ContaminatedSample s;
  s.observed.X = X;
  s.observed.y.resize(X.rows());
  s.y0.resize(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Vector x = X.row(i).transpose();
    const int y0 = rng.uniform() < success_prob(x, beta0) ? 1 : 0;
    const MislabelPair eta = eta_functions(mech, x, beta0);
    const double flip = y0 == 1 ? eta.eta1 : eta.eta0;
    const bool flipped = rng.uniform() < flip;
    s.y0(i) = y0;
    s.observed.y(i) = flipped ? 1 - y0 : y0;
  }
  return s;
}

ContaminatedSample generate_contaminated(const Matrix& X, const Vector& beta0, const MislabelMechanism& mech,
                                         std::uint64_t seed) {
  Philox4x32 rng(seed, 0);
  return generate_contaminated(X, beta0, mech, rng);
}

double mislabel_rate_tau(const MislabelMechanism& mech, const Vector& beta0, const Matrix& X) {
  validate(mech);
  if (X.rows() == 0) throw ValidationError("no covariate rows");
  double s = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Vector x = X.row(i).transpose();
    const double pi = success_prob(x, beta0);
    const MislabelPair eta = eta_functions(mech, x, beta0);
    s += eta.eta0 * (1.0 - pi) + eta.eta1 * pi;
  }
  return s / static_cast<double>(X.rows());
}

double classification_accuracy(const Vector& beta_hat, const Dataset& clean) {
  if (clean.n() == 0) throw ValidationError("clean dataset is empty");
  if (beta_hat.size() != clean.p()) throw ValidationError("coefficient length does not match covariates");
  const Vector t = clean.X * beta_hat;
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < t.size(); ++i) hits += ((t(i) > 0.0 ? 1 : 0) == clean.y(i)) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(t.size());
}

std::string to_string(StudyMethod m) {
  switch (m) {
    case StudyMethod::Logistic: return "logistic";
    case StudyMethod::Gamma: return "gamma";
    case StudyMethod::GammaOracle: return "gamma_oracle";
    case StudyMethod::AlphaOracle: return "alpha_oracle";
    case StudyMethod::ConstantMislabel: return "constant_mislabel";
    case StudyMethod::Xi: return "xi";
  }
  return "?";
}

StudyMethod study_method_from_string(const std::string& name) {
  for (int k = 0; k < kStudyMethodCount; ++k)
    if (to_string(static_cast<StudyMethod>(k)) == name) return static_cast<StudyMethod>(k);
  throw ValidationError("unknown study method '" + name + "'");
}

Eigen::Index table1_storage_index(Table1Indexing indexing, Eigen::Index k, Eigen::Index p) {
  if (indexing == Table1Indexing::CovariateFirst) return k;
  return k == 0 ? p - 1 : k - 1;
}

Vector table1_beta(Table1Indexing indexing, Eigen::Index p) {
  if (p < 4) throw ValidationError("the Table-1 coefficient pattern needs at least four coordinates");
  const double pattern[4] = {0.0, 1.0, -1.0, 1.0};
  Vector b = Vector::Zero(p);
  for (Eigen::Index k = 0; k < 4; ++k) b(table1_storage_index(indexing, k, p)) = pattern[k];
  return b;
}

void validate(const StudyConfig& cfg) {
  if (cfg.replicates < 1) throw ValidationError("study needs at least one replicate");
  if (cfg.n < 1) throw ValidationError("sample size must be positive");
  if (cfg.covariates.rows() == 0 || cfg.covariates.cols() == 0) throw ValidationError("no covariates supplied");
  if (!intercept_column(cfg.covariates) || *intercept_column(cfg.covariates) != cfg.covariates.cols() - 1)
    throw ValidationError("covariates must carry the intercept as the last column");
  if (cfg.n < cfg.covariates.cols()) throw ValidationError("sample size is smaller than the number of covariates");
  if (cfg.u1_values.empty()) throw ValidationError("u1 grid is empty");
  for (double u : cfg.u1_values)
    if (!(u >= 0.0 && u <= 0.5)) throw ValidationError("u1 values must lie in [0, 0.5]");
  if (!(cfg.u0 >= 0.0 && cfg.u0 <= 0.5)) throw ValidationError("u0 must lie in [0, 0.5]");
  if (cfg.mode == StudyMode::Table1) {
    if (cfg.beta_rule != BetaRule::Fixed)
      throw ValidationError("Table-1 mode needs the fixed coefficient rule, not random coefficients");
    if (!(cfg.gamma > 0.0)) throw ValidationError("Table-1 mode needs a positive gamma");
  } else {
    if (cfg.methods.empty()) throw ValidationError("selection mode needs at least one method");
    if (cfg.gamma_grid.empty()) throw ValidationError("gamma grid is empty");
    for (double g : cfg.gamma_grid)
      if (!(g > 0.0)) throw ValidationError("gamma grid values must be positive");
    if (!(cfg.gamma0 > 0.0)) throw ValidationError("gamma0 must be positive");
    if (!(cfg.beta_sd > 0.0)) throw ValidationError("coefficient sd must be positive");
    for (StudyMethod m : cfg.methods) {
      if (m == StudyMethod::AlphaOracle && cfg.alpha_grid.empty()) throw ValidationError("alpha grid is empty");
      if (m == StudyMethod::ConstantMislabel && cfg.eta_grid.empty()) throw ValidationError("eta grid is empty");
      if (m == StudyMethod::Xi) validate(EstimatorSpec::xi(cfg.xi0, cfg.xi1));
    }
  }
}

namespace {

Matrix sample_rows(const Matrix& pool, int n, Philox4x32& rng) {
  Matrix X(n, pool.cols());
  for (int i = 0; i < n; ++i) X.row(i) = pool.row(static_cast<Eigen::Index>(rng.below(pool.rows())));
  return X;
}

Dataset clean_sample(const Matrix& pool, int n, const Vector& beta0, Philox4x32& rng) {
  Dataset d;
  d.X = sample_rows(pool, n, rng);
  d.y.resize(n);
  for (int i = 0; i < n; ++i) d.y(i) = rng.uniform() < success_prob(d.X.row(i).transpose(), beta0) ? 1 : 0;
  return d;
}

bool wants(const StudyConfig& cfg, StudyMethod m) {
  for (StudyMethod k : cfg.methods)
    if (k == m) return true;
  return false;
}

ReplicateRecord run_replicate(const StudyConfig& cfg, std::uint64_t seed, int u1_index, int rep) {
  Philox4x32 rng(seed, stream_id(kStudyTag, static_cast<std::uint64_t>(u1_index), static_cast<std::uint64_t>(rep)));
  const Eigen::Index p = cfg.covariates.cols();
  ReplicateRecord r;
  r.u1_index = u1_index;
  r.replicate = rep;
  r.u1 = cfg.u1_values[u1_index];
  r.gamma_selected = r.gamma_oracle = r.alpha_oracle = r.eta_selected = kNaN;
  r.ca.assign(kStudyMethodCount, kNaN);
  if (cfg.beta_rule == BetaRule::Fixed) {
    r.beta0 = table1_beta(cfg.indexing, p);
  } else {
    r.beta0.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) r.beta0(j) = rng.normal(0.0, cfg.beta_sd);
  }
  const MislabelMechanism mech = MislabelMechanism::draw(cfg.setting, cfg.u0, r.u1, p, rng);
  const Matrix X = sample_rows(cfg.covariates, cfg.n, rng);
  const ContaminatedSample train = generate_contaminated(X, r.beta0, mech, rng);
  r.tau = mislabel_rate_tau(mech, r.beta0, X);

  if (cfg.mode == StudyMode::Table1) {
    const FitResult f = fit(train.observed, EstimatorSpec::gamma(cfg.gamma), cfg.solver.solver);
    r.beta_hat = f.beta_hat;
    r.converged = f.converged;
    r.se = Vector::Constant(p, kNaN);
    if (f.converged) {
      try {
        r.se = sandwich_covariance(train.observed, f).se;
      } catch (const ConvergenceError&) {
        r.converged = false;
      }
    }
    return r;
  }

  const Dataset eval = clean_sample(cfg.covariates, cfg.n, r.beta0, rng);
  const Dataset select_set = clean_sample(cfg.covariates, cfg.n, r.beta0, rng);
  const Dataset& data = train.observed;
  auto set_ca = [&](StudyMethod m, const Vector& b) { r.ca[static_cast<int>(m)] = classification_accuracy(b, eval); };

  if (wants(cfg, StudyMethod::Logistic)) set_ca(StudyMethod::Logistic, fit(data, EstimatorSpec::mle(), cfg.solver.solver).beta_hat);

  if (wants(cfg, StudyMethod::Gamma) || wants(cfg, StudyMethod::GammaOracle)) {
    std::vector<FitResult> fits = fit_gamma_grid(data, cfg.gamma_grid, cfg.solver);
    if (wants(cfg, StudyMethod::GammaOracle)) {
      try {
        const OracleChoice oc = select_oracle(fits, select_set);
        r.gamma_oracle = oc.tuning;
        set_ca(StudyMethod::GammaOracle, fits[oc.index].beta_hat);
      } catch (const ConvergenceError&) {
      }
    }
    if (wants(cfg, StudyMethod::Gamma)) {
      try {
        const SelectionResult sr = select_gamma_adaptive(data, std::move(fits), cfg.gamma0);
        r.gamma_selected = sr.chosen_gamma;
        set_ca(StudyMethod::Gamma, sr.fits[sr.chosen_index].beta_hat);
      } catch (const ConvergenceError&) {
      }
    }
  }

  if (wants(cfg, StudyMethod::AlphaOracle)) {
    std::vector<FitResult> fits;
    for (double a : cfg.alpha_grid) fits.push_back(fit(data, EstimatorSpec::alpha(a), cfg.solver.solver));
    try {
      const OracleChoice oc = select_oracle(fits, select_set);
      r.alpha_oracle = oc.tuning;
      set_ca(StudyMethod::AlphaOracle, fits[oc.index].beta_hat);
    } catch (const ConvergenceError&) {
    }
  }

  if (wants(cfg, StudyMethod::ConstantMislabel)) {
    try {
      const EtaProfile prof = profile_constant_mislabel(data, cfg.eta_grid, cfg.solver.solver);
      r.eta_selected = prof.best_eta;
      set_ca(StudyMethod::ConstantMislabel, prof.best_fit.beta_hat);
    } catch (const ConvergenceError&) {
    }
  }

  if (wants(cfg, StudyMethod::Xi)) {
    const FitResult f = fit(data, EstimatorSpec::xi(cfg.xi0, cfg.xi1), cfg.solver.solver);
    if (f.converged) set_ca(StudyMethod::Xi, f.beta_hat);
  }
  return r;
}

void mean_sd(const std::vector<double>& v, double& mean, double& sd) {
  mean = sd = kNaN;
  if (v.empty()) return;
  double s = 0.0;
  for (double x : v) s += x;
  mean = s / static_cast<double>(v.size());
  if (v.size() < 2) return;
  double q = 0.0;
  for (double x : v) q += (x - mean) * (x - mean);
  sd = std::sqrt(q / static_cast<double>(v.size() - 1));
}

void aggregate(ReplicateReport& rep) {
  const StudyConfig& cfg = rep.config;
  const Eigen::Index p = cfg.covariates.cols();
  if (cfg.mode == StudyMode::Table1) {
    const Vector truth = table1_beta(cfg.indexing, p);
    for (const auto& r : rep.records) (r.converged ? rep.table1_converged : rep.table1_failed)++;
    for (Eigen::Index k = 0; k < p; ++k) {
      Table1Row row;
      row.label = "beta_" + std::to_string(k + 1);
      row.storage_index = table1_storage_index(cfg.indexing, k, p);
      row.truth = truth(row.storage_index);
      std::vector<double> est, se;
      for (const auto& r : rep.records) {
        if (!r.converged) continue;
        est.push_back(r.beta_hat(row.storage_index));
        se.push_back(r.se(row.storage_index));
      }
      double dummy;
      mean_sd(est, row.mean, row.sd);
      mean_sd(se, row.se, dummy);
      rep.table1.push_back(row);
    }
    std::ostringstream note;
    note << "reference coefficient k maps to storage index "
         << (cfg.indexing == Table1Indexing::InterceptFirst ? "p-1 for k=1 (intercept) and k-2 otherwise"
                                                            : "k-1 (intercept stays last)");
    rep.notes.push_back(note.str());
    if (rep.table1_failed > 0)
      rep.notes.push_back(std::to_string(rep.table1_failed) +
                          " replicates without a converged fit are excluded from the summary");
    return;
  }
  for (std::size_t u = 0; u < cfg.u1_values.size(); ++u) {
    Table2Row t2;
    t2.u1 = cfg.u1_values[u];
    std::vector<double> g, go, taus;
    for (const auto& r : rep.records) {
      if (r.u1_index != static_cast<int>(u)) continue;
      taus.push_back(r.tau);
      if (!std::isnan(r.gamma_selected)) g.push_back(r.gamma_selected);
      if (!std::isnan(r.gamma_oracle)) go.push_back(r.gamma_oracle);
    }
    double dummy, tau;
    mean_sd(g, t2.mean_gamma, dummy);
    mean_sd(go, t2.mean_gamma_oracle, dummy);
    mean_sd(taus, tau, dummy);
    t2.valid_gamma = static_cast<int>(g.size());
    t2.valid_oracle = static_cast<int>(go.size());
    rep.table2.push_back(t2);
    for (StudyMethod m : cfg.methods) {
      Figure3Row f;
      f.method = m;
      f.u1 = t2.u1;
      f.tau = tau;
      std::vector<double> ca;
      for (const auto& r : rep.records)
        if (r.u1_index == static_cast<int>(u) && !std::isnan(r.ca[static_cast<int>(m)]))
          ca.push_back(r.ca[static_cast<int>(m)]);
      double sd;
      mean_sd(ca, f.mean_ca, sd);
      f.se_ca = ca.size() > 1 ? sd / std::sqrt(static_cast<double>(ca.size())) : kNaN;
      f.valid = static_cast<int>(ca.size());
      rep.figure3.push_back(f);
    }
  }
}

}  // namespace

ReplicateReport run_study(const StudyConfig& config, std::uint64_t seed) {
  validate(config);
  ReplicateReport rep;
  rep.config = config;
  rep.seed = seed;
  const std::size_t per = static_cast<std::size_t>(config.replicates);
  const std::size_t total = per * config.u1_values.size();
  rep.records.resize(total);
  parallel_for(total, config.workers, [&](std::size_t k) {
    rep.records[k] = run_replicate(config, seed, static_cast<int>(k / per), static_cast<int>(k % per));
  });
  aggregate(rep);
  return rep;
}

std::string table1_csv(const ReplicateReport& r) {
  std::ostringstream o;
  o << "coefficient,storage_index,truth,mean,sd,se\n";
  for (const auto& row : r.table1)
    o << row.label << ',' << row.storage_index << ',' << num(row.truth) << ',' << num(row.mean) << ','
      << num(row.sd) << ',' << num(row.se) << '\n';
  return o.str();
}

std::string table2_csv(const ReplicateReport& r) {
  std::ostringstream o;
  o << "u1,mean_gamma,mean_gamma_oracle,valid_gamma,valid_oracle\n";
  for (const auto& row : r.table2)
    o << num(row.u1) << ',' << num(row.mean_gamma) << ',' << num(row.mean_gamma_oracle) << ',' << row.valid_gamma
      << ',' << row.valid_oracle << '\n';
  return o.str();
}

std::string figure3_csv(const ReplicateReport& r) {
  std::ostringstream o;
  o << "method,u1,tau,mean_ca,se_ca,valid\n";
  for (const auto& row : r.figure3)
    o << to_string(row.method) << ',' << num(row.u1) << ',' << num(row.tau) << ',' << num(row.mean_ca) << ','
      << num(row.se_ca) << ',' << row.valid << '\n';
  return o.str();
}

std::string replicates_csv(const ReplicateReport& r) {
  std::ostringstream o;
  const bool t1 = r.config.mode == StudyMode::Table1;
  o << "u1,replicate,tau";
  if (t1) {
    o << ",converged";
    for (Eigen::Index j = 0; j < r.config.covariates.cols(); ++j) o << ",beta_hat_" << j;
    for (Eigen::Index j = 0; j < r.config.covariates.cols(); ++j) o << ",se_" << j;
  } else {
    o << ",gamma_selected,gamma_oracle,alpha_oracle,eta_selected";
    for (StudyMethod m : r.config.methods) o << ",ca_" << to_string(m);
  }
  o << '\n';
  for (const auto& rec : r.records) {
    o << num(rec.u1) << ',' << rec.replicate << ',' << num(rec.tau);
    if (t1) {
      o << ',' << (rec.converged ? 1 : 0);
      for (Eigen::Index j = 0; j < rec.beta_hat.size(); ++j) o << ',' << num(rec.beta_hat(j));
      for (Eigen::Index j = 0; j < rec.se.size(); ++j) o << ',' << num(rec.se(j));
    } else {
      o << ',' << num(rec.gamma_selected) << ',' << num(rec.gamma_oracle) << ',' << num(rec.alpha_oracle) << ','
        << num(rec.eta_selected);
      for (StudyMethod m : r.config.methods) o << ',' << num(rec.ca[static_cast<int>(m)]);
    }
    o << '\n';
  }
  return o.str();
}

}  // namespace glogit
