#include "glogit/detection.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "glogit/error.hpp"
#include "glogit/parallel.hpp"
#include "glogit/random.hpp"

namespace glogit {

namespace {
constexpr std::uint64_t kBootstrapTag = 0x626f6f7473747270ull;
}

double pvalue_from_draws(double observed, const Vector& draws) {
  if (draws.size() == 0) throw ValidationError("need at least one bootstrap draw");
  const auto count = (draws.array() <= observed).count();
  return static_cast<double>(count) / static_cast<double>(draws.size());
}

Labels flags_from_pvalues(const Vector& pv, double threshold) {
  Labels f(pv.size());
  for (Eigen::Index i = 0; i < pv.size(); ++i) f(i) = pv(i) < threshold ? 1 : 0;
  return f;
}

PvReport bootstrap_pvalues(const Dataset& data, const FitResult& fit, int b_prime, std::uint64_t seed,
                           double threshold, unsigned workers) {
  validate(data);
  if (b_prime < 1) throw ValidationError("bootstrap replicate count must be at least 1");
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ValidationError("p-value threshold must lie in (0, 1]");
  if (fit.spec.kind != EstimatorKind::GammaLogistic)
    throw ValidationError("bootstrap p-values need a gamma-logistic fit");
  if (!fit.converged) throw ConvergenceError("bootstrap p-values need a converged fit");
  if (fit.beta_hat.size() != data.p()) throw ValidationError("fit does not match the dataset");

  const double gamma = fit.spec.tuning;
  const Vector t = data.X * fit.beta_hat;
  PvReport rep;
  rep.b_prime = b_prime;
  rep.threshold = threshold;
  rep.seed = seed;
  rep.pv.resize(data.n());
  rep.observed_weights.resize(data.n());
  parallel_for(static_cast<std::size_t>(data.n()), workers, [&](std::size_t k) {
    const auto i = static_cast<Eigen::Index>(k);
    const double pi = logistic(t(i));
    const double w1 = weight_gamma_margin(1, t(i), gamma);
    const double w0 = weight_gamma_margin(0, t(i), gamma);
    const double obs = data.y(i) == 1 ? w1 : w0;
    Philox4x32 rng(seed, stream_id(kBootstrapTag, k));
    long count = 0;
    for (int b = 0; b < b_prime; ++b) {
      const double wb = rng.uniform() < pi ? w1 : w0;
      if (wb <= obs) ++count;
    }
    rep.observed_weights(i) = obs;
    rep.pv(i) = static_cast<double>(count) / static_cast<double>(b_prime);
  });
  rep.flags = flags_from_pvalues(rep.pv, threshold);
  return rep;
}

Dataset flip_labels(const Dataset& data, const Labels& flags) {
  if (flags.size() != data.n()) throw ValidationError("flag vector length does not match the dataset");
  Dataset out = data;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    if (flags(i) == 1) out.y(i) = 1 - data.y(i);
  return out;
}

Dataset flip_labels(const Dataset& data, const PvReport& report) { return flip_labels(data, report.flags); }

double auc(const Vector& scores, const Labels& labels) {
  if (scores.size() != labels.size()) throw ValidationError("scores and labels differ in length");
  const Eigen::Index n = scores.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return scores(a) < scores(b); });
  // Mid-ranks handle ties.
  double rank_sum = 0.0;
  Eigen::Index pos = 0, n1 = 0;
  while (pos < n) {
    Eigen::Index end = pos;
    while (end + 1 < n && scores(order[end + 1]) == scores(order[pos])) ++end;
    const double mid = 0.5 * static_cast<double>(pos + end) + 1.0;
    for (Eigen::Index k = pos; k <= end; ++k) {
      if (labels(order[k]) == 1) {
        rank_sum += mid;
        ++n1;
      }
    }
    pos = end + 1;
  }
  const Eigen::Index n0 = n - n1;
  if (n1 == 0 || n0 == 0) throw ValidationError("AUC needs both classes present");
  const double u = rank_sum - 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1);
  return u / (static_cast<double>(n1) * static_cast<double>(n0));
}

std::array<DriverGroup, 2> driver_analysis(const Dataset& data, const PvReport& report) {
  validate(data);
  const Dataset corrected = flip_labels(data, report);
  std::array<DriverGroup, 2> out;
  for (int j = 0; j < 2; ++j) {
    DriverGroup& g = out[j];
    g.group = j;
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < data.n(); ++i)
      if (corrected.y(i) == j) rows.push_back(i);
    g.size = static_cast<Eigen::Index>(rows.size());
    Dataset sub;
    sub.X.resize(g.size, data.p());
    sub.y.resize(g.size);
    for (Eigen::Index k = 0; k < g.size; ++k) {
      sub.X.row(k) = data.X.row(rows[k]);
      sub.y(k) = report.flags(rows[k]);
    }
    g.flagged = sub.y.sum();
    if (g.size == 0) {
      g.notice = "group is empty; skipped";
      continue;
    }
    if (g.flagged == 0 || g.flagged == g.size) {
      g.notice = "all instances in the group share the same flag; skipped";
      continue;
    }
    if (g.size < data.p()) {
      g.notice = "fewer instances than covariates; skipped";
      continue;
    }
    const FitResult r = fit(sub, EstimatorSpec::mle());
    g.coefficients = r.beta_hat;
    g.separation = r.separation_detected;
    if (r.separation_detected) g.notice = "flags are separated by the covariates; coefficients are ridge-damped";
    else if (!r.converged) g.notice = "logistic fit did not converge";
    g.auc = auc(sub.X * r.beta_hat, sub.y);
    g.analyzed = true;
  }
  return out;
}

}  // namespace glogit
