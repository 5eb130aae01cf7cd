#include "glogit/model.hpp"

#include <cmath>
#include <string>

#include "glogit/error.hpp"

namespace glogit {

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double log_logistic(double t) {
  if (t >= 0.0) return -std::log1p(std::exp(-t));
  return t - std::log1p(std::exp(t));
}

double gamma_norm_margin(double t, double gamma) {
  if (gamma == 0.0) return 1.0;
  const double g1 = gamma + 1.0;
  const double a = g1 * log_logistic(t);
  const double b = g1 * log_logistic(-t);
  const double hi = std::max(a, b);
  const double lse = hi + std::log1p(std::exp(std::min(a, b) - hi));
  return std::min(1.0, std::exp(lse / g1));
}

double weight_gamma_margin(int y, double t, double gamma) {
  if (gamma == 0.0) return 1.0;
  const double s = (gamma + 1.0) * t;
  const double ll = y == 1 ? log_logistic(s) : log_logistic(-s);
  return std::exp(gamma / (gamma + 1.0) * ll);
}

double bias_term_margin(double t, double gamma, const MislabelPair& eta) {
  const double s = (gamma + 1.0) * t;
  const double c = gamma / (gamma + 1.0);
  return eta.eta0 * std::exp(c * log_logistic(s)) + eta.eta1 * std::exp(c * log_logistic(-s));
}

double margin(const Vector& x, const Vector& beta) {
  if (x.size() != beta.size())
    throw ValidationError("dimension mismatch: x has " + std::to_string(x.size()) +
                          " entries, beta has " + std::to_string(beta.size()));
  if (!x.allFinite() || !beta.allFinite()) throw ValidationError("non-finite covariate or coefficient");
  return x.dot(beta);
}

void check_label(int y) {
  if (y != 0 && y != 1) throw ValidationError("label must be 0 or 1, got " + std::to_string(y));
}

double success_prob(const Vector& x, const Vector& beta) { return logistic(margin(x, beta)); }

double label_pmf(int y, const Vector& x, const Vector& beta) {
  check_label(y);
  const double t = margin(x, beta);
  return y == 1 ? logistic(t) : logistic(-t);
}

double pmf_gamma_norm(const Vector& x, const Vector& beta, double gamma) {
  if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
  return gamma_norm_margin(margin(x, beta), gamma);
}

double weight_gamma(int y, const Vector& x, const Vector& beta, double gamma) {
  check_label(y);
  if (!(gamma >= 0.0)) throw ValidationError("gamma must be nonnegative");
  return weight_gamma_margin(y, margin(x, beta), gamma);
}

void validate_mislabel_pair(const MislabelPair& eta) {
  if (!(eta.eta0 >= 0.0) || !(eta.eta1 >= 0.0) || !(eta.eta0 < 1.0) || !(eta.eta1 < 1.0))
    throw ValidationError("mislabel probabilities must lie in [0, 1)");
  if (!(eta.eta0 + eta.eta1 < 1.0)) throw ValidationError("eta0 + eta1 must be below 1");
}

MixtureDecomposition mixture_decompose(const MislabelPair& eta) {
  validate_mislabel_pair(eta);
  MixtureDecomposition m;
  const double s = eta.eta0 + eta.eta1;
  m.c = 1.0 - s;
  m.h1 = s > 0.0 ? eta.eta0 / s : 0.0;
  return m;
}

double contaminated_success_prob(double pi, const MislabelPair& eta) {
  return eta.eta0 * (1.0 - pi) + (1.0 - eta.eta1) * pi;
}

double mixture_pmf(int y, double pi, const MixtureDecomposition& mix) {
  check_label(y);
  const double f = y == 1 ? pi : 1.0 - pi;
  const double h = y == 1 ? mix.h1 : 1.0 - mix.h1;
  return mix.c * f + (1.0 - mix.c) * h;
}

double bias_term_B(const Vector& x, const Vector& beta, double gamma, const MislabelPair& eta) {
  if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
  validate_mislabel_pair(eta);
  return bias_term_margin(margin(x, beta), gamma, eta);
}

}  // namespace glogit
