#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <glogit/commands.hpp>
#include <glogit/detection.hpp>
#include <glogit/estimators.hpp>
#include <glogit/inference.hpp>
#include <glogit/io.hpp>
#include <glogit/model.hpp>
#include <glogit/selection.hpp>
#include <glogit/simulation.hpp>

#include "helpers.hpp"

using namespace glogit;

namespace {

constexpr std::uint64_t kSeed = 1;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void criterion_gradient() {
  Philox4x32 rng(kSeed, 101);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector truth = testutil::random_vector(rng, 5, 1.0);
    const Dataset d = testutil::logistic_data(50, 5, truth, 1000 + k);
    const Vector beta = testutil::random_vector(rng, 5, 1.0);
    const double g = std::vector<double>{0.5, 1.0, 2.0}[k % 3];
    const Vector fd =
        testutil::central_gradient([&](const Vector& b) { return gamma_objective(d, b, g); }, beta, 1e-5);
    const Vector an = g * gamma_score(d, beta, g);
    worst = std::max(worst, (an - fd).cwiseAbs().maxCoeff() / fd.cwiseAbs().maxCoeff());
  }
  report(1, "gradient identity", worst < 1e-6, fmt("max relative error %.3e", worst));
}

void criterion_delta() {
  Philox4x32 rng(kSeed, 102);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vector x = testutil::random_vector(rng, 4, 1.5);
    const Vector b = testutil::random_vector(rng, 4, 1.5);
    const double g = 3.0 * rng.uniform();
    const double t = x.dot(b);
    double s = 0.0;
    for (int y : {0, 1}) s += delta_integrand(y, t, g) * label_pmf(y, x, b);
    worst = std::max(worst, std::abs(s));
  }
  report(2, "delta integrand sums to zero", worst < 1e-12, fmt("max |sum| %.3e", worst));
}

void criterion_conditional_weight() {
  Philox4x32 rng(kSeed, 103);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vector x = testutil::random_vector(rng, 4, 1.5);
    const Vector b = testutil::random_vector(rng, 4, 1.5);
    const double g = 0.01 + 3.0 * rng.uniform();
    double s = 0.0;
    for (int y : {0, 1}) s += weight_gamma(y, x, b, g) * label_pmf(y, x, b);
    worst = std::max(worst, std::abs(s - pmf_gamma_norm(x, b, g)));
  }
  report(3, "conditional weight identity", worst < 1e-12, fmt("max error %.3e", worst));
}

void criterion_weight_relation() {
  Philox4x32 rng(kSeed, 104);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double t = rng.normal(0.0, 3.0);
    const double g = 0.01 + 3.0 * rng.uniform();
    const int y = rng.bernoulli(0.5) ? 1 : 0;
    const double lhs = std::pow(weight_gamma_margin(y, t, g), g + 1.0);
    const double rhs = weight_alpha_margin(y, (g + 1.0) * t, g);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  report(4, "gamma/alpha weight relation", worst < 1e-12, fmt("max error %.3e", worst));
}

void criterion_mixture() {
  Philox4x32 rng(kSeed, 105);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double e0 = 0.5 * rng.uniform(), e1 = 0.5 * rng.uniform(), pi = rng.uniform();
    const int y = rng.bernoulli(0.5) ? 1 : 0;
    const double p1 = e0 * (1.0 - pi) + (1.0 - e1) * pi;
    const double direct = y == 1 ? p1 : 1.0 - p1;
    worst = std::max(worst, std::abs(mixture_pmf(y, pi, mixture_decompose({e0, e1})) - direct));
  }
  report(5, "mixture reconstruction", worst < 1e-14, fmt("max error %.3e", worst));
}

void criterion_limits() {
  Vector beta(5);
  beta << 0.8, -0.6, 0.4, 0.3, -0.2;
  const Dataset d = testutil::logistic_data(5000, 5, beta, kSeed + 600);
  const FitResult mle = fit(d, EstimatorSpec::mle());
  double worst = 0.0;
  bool all_converged = mle.converged;
  for (const EstimatorSpec& s : {EstimatorSpec::gamma(1e-3), EstimatorSpec::alpha(1e-3),
                                 EstimatorSpec::constant_mislabel(0.0), EstimatorSpec::xi(0.0, 0.0)}) {
    const FitResult f = fit(d, s);
    all_converged = all_converged && f.converged;
    worst = std::max(worst, (f.beta_hat - mle.beta_hat).cwiseAbs().maxCoeff());
  }
  report(6, "limit consistency", all_converged && worst < 1e-2, fmt("max sup-norm gap %.3e", worst));
}

void criterion_table1() {
  const double ref_s1[9] = {-0.126, 1.009, -0.999, 1.014, -0.025, -0.033, 0.013, 0.008, 0.004};
  const double ref_s2[9] = {-0.014, 0.999, -0.995, 0.984, 0.011, -0.006, -0.001, -0.018, 0.014};
  bool pass = true;
  std::string detail;
  for (int s = 0; s < 2; ++s) {
    StudyConfig c;
    c.mode = StudyMode::Table1;
    c.setting = s == 0 ? MislabelSetting::S1 : MislabelSetting::S2;
    c.u0 = 0.05;
    c.u1_values = {0.1};
    c.gamma = 2.0;
    c.n = 500;
    c.replicates = 500;
    c.covariates = pima_design();
    const ReplicateReport r = run_study(c, kSeed);
    const double* ref = s == 0 ? ref_s1 : ref_s2;
    double worst_mean = 0.0, lo_ratio = 1e9, hi_ratio = 0.0;
    for (int k = 0; k < 9; ++k) {
      const Table1Row& row = r.table1[k];
      worst_mean = std::max(worst_mean, std::abs(row.mean - ref[k]));
      const double ratio = row.se / row.sd;
      lo_ratio = std::min(lo_ratio, ratio);
      hi_ratio = std::max(hi_ratio, ratio);
      std::printf("      %s %s mean %.4f (ref %.3f) sd %.4f se %.4f se/sd %.3f\n", s == 0 ? "S1" : "S2",
                  row.label.c_str(), row.mean, ref[k], row.sd, row.se, ratio);
    }
    const bool ok = worst_mean <= 0.10 && lo_ratio >= 0.85 && hi_ratio <= 1.15;
    pass = pass && ok;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s%s max|mean-ref| %.3f, se/sd in [%.3f, %.3f], %d/%d fits", detail.empty() ? "" : "; ",
                  s == 0 ? "S1" : "S2", worst_mean, lo_ratio, hi_ratio, r.table1_converged,
                  r.table1_converged + r.table1_failed);
    detail += buf;
  }
  report(7, "fixed-coefficient study means and SE/SD", pass, detail);
}

StudyConfig selection_config(std::vector<double> u1, std::vector<StudyMethod> methods) {
  StudyConfig c;
  c.mode = StudyMode::Selection;
  c.setting = MislabelSetting::S1;
  c.beta_rule = BetaRule::RandomNormal;
  c.u0 = 0.05;
  c.u1_values = std::move(u1);
  c.replicates = 200;
  c.n = 500;
  c.covariates = pima_design();
  c.methods = std::move(methods);
  return c;
}

void criterion_table2() {
  std::vector<double> u1;
  for (int k = 1; k <= 10; ++k) u1.push_back(0.05 * k);
  const ReplicateReport r =
      run_study(selection_config(u1, {StudyMethod::Gamma, StudyMethod::GammaOracle}), kSeed);
  const double targets[3] = {1.26, 2.20, 1.76};
  const int at[3] = {0, 4, 9};
  bool pass = true;
  std::string detail;
  for (const auto& row : r.table2)
    std::printf("      u1 %.2f mean gamma %.3f (%d valid) mean oracle %.3f (%d valid)\n", row.u1, row.mean_gamma,
                row.valid_gamma, row.mean_gamma_oracle, row.valid_oracle);
  for (int k = 0; k < 3; ++k) {
    const double m = r.table2[at[k]].mean_gamma;
    pass = pass && std::abs(m - targets[k]) <= 0.3;
    char buf[80];
    std::snprintf(buf, sizeof buf, "u1=%.2f %.3f (ref %.2f); ", r.table2[at[k]].u1, m, targets[k]);
    detail += buf;
  }
  std::size_t peak = 0;
  for (std::size_t k = 1; k < r.table2.size(); ++k)
    if (r.table2[k].mean_gamma > r.table2[peak].mean_gamma) peak = k;
  const bool shape = peak > 0 && peak + 1 < r.table2.size();
  pass = pass && shape;
  detail += fmt("peak at u1=%.2f", r.table2[peak].u1);
  report(8, "selected gamma levels and trend", pass, detail);
}

void criterion_figure3() {
  const ReplicateReport r = run_study(
      selection_config({0.4}, {StudyMethod::Logistic, StudyMethod::Gamma, StudyMethod::AlphaOracle}), kSeed);
  const int L = static_cast<int>(StudyMethod::Logistic), G = static_cast<int>(StudyMethod::Gamma),
            A = static_cast<int>(StudyMethod::AlphaOracle);
  std::vector<double> dl, da;
  for (const auto& rec : r.records) {
    if (!std::isnan(rec.ca[G]) && !std::isnan(rec.ca[L])) dl.push_back(rec.ca[G] - rec.ca[L]);
    if (!std::isnan(rec.ca[G]) && !std::isnan(rec.ca[A])) da.push_back(rec.ca[G] - rec.ca[A]);
  }
  auto mean_t = [](const std::vector<double>& v, double& mean, double& t) {
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double q = 0.0;
    for (double x : v) q += (x - mean) * (x - mean);
    const double sd = std::sqrt(q / static_cast<double>(v.size() - 1));
    t = mean / (sd / std::sqrt(static_cast<double>(v.size())));
  };
  double ml = 0, tl = 0, ma = 0, ta = 0;
  mean_t(dl, ml, tl);
  mean_t(da, ma, ta);
  for (const auto& f : r.figure3)
    std::printf("      %s mean CA %.4f (se %.4f, %d valid)\n", to_string(f.method).c_str(), f.mean_ca, f.se_ca,
                f.valid);
  char buf[200];
  std::snprintf(buf, sizeof buf, "gamma-logistic %+.4f (t %.2f, %zu pairs); gamma-alpha* %+.4f (%zu pairs)", ml, tl,
                dl.size(), ma, da.size());
  report(9, "accuracy dominance at u1=0.4", ml > 0.0 && tl > 3.0 && ma >= -0.005, buf);
}

void criterion_if2() {
  const Vector b0 = figure_design_beta();
  const If2Calculator g0(If2Kind::Gamma, 0.0, b0), a0(If2Kind::Alpha, 0.0, b0);
  bool equal = true;
  for (double x = -10.0; x <= 10.0 + 1e-9; x += 0.05)
    for (int y : {0, 1}) equal = equal && g0(x, y) == a0(x, y);

  const If2Calculator g(If2Kind::Gamma, 2.5, b0), a(If2Kind::Alpha, 2.5, b0);
  double gmax = 0.0, amax = 0.0;
  for (double x = -10.0; x <= 10.0 + 1e-9; x += 0.01)
    for (int y : {0, 1}) {
      gmax = std::max(gmax, g(x, y));
      amax = std::max(amax, a(x, y));
    }
  // Mislabeled: the observed label disagrees with the sign of the true margin.
  auto mis = [&](double x) { return b0(0) + b0(1) * x > 0.0 ? 0 : 1; };
  auto Rg = [&](double x) { return g(x, mis(x)) / gmax; };
  auto Ra = [&](double x) { return a(x, mis(x)) / amax; };
  const double rg_far = std::max(Rg(-10.0), Rg(10.0));
  const double rg_4 = std::max(Rg(-4.0), Rg(4.0));
  double ra_min = 1.0;
  for (double x = -4.0; x <= -1.0 + 1e-9; x += 0.01) ra_min = std::min(ra_min, Ra(x));
  const double ra_4 = std::min(Ra(-4.0), Ra(4.0));
  const bool pass = equal && rg_far < 1e-8 && rg_4 < 1e-4 && ra_min > 0.05 && ra_4 > 1e-3;
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "equal at 0: %s; R_gamma(|x|=10) %.2e, R_gamma(|x|=4) %.2e; min R_alpha[-4,-1] %.3f, R_alpha(|x|=4) %.2e",
                equal ? "yes" : "no", rg_far, rg_4, ra_min, ra_4);
  report(10, "IF2 qualitative behaviour", pass, buf);
}

void criterion_pv() {
  Vector beta(5);
  beta << 1.0, -1.0, 0.5, 0.5, 0.0;
  const Dataset d = testutil::logistic_data(2000, 5, beta, kSeed + 1100);
  const SelectionResult sel = select_gamma_adaptive(d, default_gamma_grid());
  const FitResult& f = sel.fits[sel.chosen_index];
  const PvReport a = bootstrap_pvalues(d, f, 2000, kSeed);
  const PvReport b = bootstrap_pvalues(d, f, 2000, kSeed);
  const PvReport c = bootstrap_pvalues(d, f, 2000, kSeed, 0.01, 3);
  const bool same = std::memcmp(a.pv.data(), b.pv.data(), sizeof(double) * a.pv.size()) == 0 &&
                    std::memcmp(a.pv.data(), c.pv.data(), sizeof(double) * a.pv.size()) == 0 && a.flags == b.flags &&
                    a.flags == c.flags;
  const double frac = a.flags.cast<double>().mean();
  char buf[160];
  std::snprintf(buf, sizeof buf, "gamma %.1f, fraction PV<0.01 = %.4f, byte-identical reruns: %s", sel.chosen_gamma,
                frac, same ? "yes" : "no");
  report(11, "PV null calibration", same && frac >= 0.002 && frac <= 0.03, buf);
}

void criterion_pipeline() {
  RunConfig cfg;
  cfg.seed = kSeed;
  cfg.output_dir = (std::filesystem::temp_directory_path() / "glogit_acceptance_pipeline").string();
  const CommandOutput out = cmd_pipeline(cfg);
  const auto& s = out.summary;
  auto has = [](const nlohmann::json& list, const std::string& name) {
    for (const auto& v : list)
      if (v == name) return true;
    return false;
  };
  const bool x3g = has(s["significant_gamma"], "BloodPressure"), x5g = has(s["significant_gamma"], "Insulin");
  const bool x3m = has(s["significant_mle"], "BloodPressure"), x5m = has(s["significant_mle"], "Insulin");
  const double wg = s["mean_ci_width_gamma"], wm = s["mean_ci_width_mle"];
  const auto& dr = s["drivers"];
  const double auc0 = dr[0]["auc"].is_null() ? std::nan("") : dr[0]["auc"].get<double>();
  const double auc1 = dr[1]["auc"].is_null() ? std::nan("") : dr[1]["auc"].get<double>();
  const bool ci_ok = x3g && x5g && !x3m && !x5m;
  const bool auc_ok = auc1 > auc0 && std::abs(auc1 - 0.925) <= 0.07 && std::abs(auc0 - 0.713) <= 0.07;
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "gamma %.1f; X3 sig gamma/mle %d/%d, X5 sig gamma/mle %d/%d; mean CI width %.3f vs %.3f; "
                "AUC0 %.3f AUC1 %.3f; flagged %d",
                s["selection"]["chosen_gamma"].get<double>(), x3g, x3m, x5g, x5m, wg, wm, auc0, auc1,
                s["flagged"].get<int>());
  report(12, "Pima pipeline", ci_ok && wg > wm && auc_ok, buf);
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria = {
      criterion_gradient, criterion_delta,  criterion_conditional_weight, criterion_weight_relation,
      criterion_mixture,  criterion_limits, criterion_table1,             criterion_table2,
      criterion_figure3,  criterion_if2,    criterion_pv,                 criterion_pipeline};
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    try {
      criteria[k]();
    } catch (const std::exception& e) {
      report(static_cast<int>(k + 1), "criterion", false, std::string("exception: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
