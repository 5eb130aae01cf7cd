#include "glogit/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "glogit/error.hpp"

namespace glogit {

namespace {

Vector margins_of(const Dataset& data, const Vector& beta) {
  if (beta.size() != data.p())
    throw ValidationError("coefficient length " + std::to_string(beta.size()) + " does not match " +
                          std::to_string(data.p()) + " covariates");
  if (data.n() == 0) throw ValidationError("dataset is empty");
  if (!beta.allFinite()) throw ValidationError("non-finite coefficient");
  return data.X * beta;
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be positive and finite");
}

void require_eta(double eta) {
  if (!(eta >= 0.0 && eta < 0.5)) throw ValidationError("eta must lie in [0, 0.5)");
}

void require_xi(double xi0, double xi1) {
  if (!(xi0 >= 0.0) || !(xi1 >= 0.0) || !(xi0 + xi1 < 1.0))
    throw ValidationError("xi must satisfy xi0, xi1 >= 0 and xi0 + xi1 < 1");
}

}  // namespace

void validate(const EstimatorSpec& spec) {
  switch (spec.kind) {
    case EstimatorKind::MLE:
      return;
    case EstimatorKind::GammaLogistic:
      require_positive(spec.tuning, "gamma");
      return;
    case EstimatorKind::AlphaLogistic:
      require_positive(spec.tuning, "alpha");
      return;
    case EstimatorKind::ConstantMislabel:
      require_eta(spec.tuning);
      return;
    case EstimatorKind::XiLogistic:
      require_xi(spec.tuning, spec.tuning1);
      return;
  }
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::MLE: return "mle";
    case EstimatorKind::GammaLogistic: return "gamma";
    case EstimatorKind::AlphaLogistic: return "alpha";
    case EstimatorKind::ConstantMislabel: return "constant_mislabel";
    case EstimatorKind::XiLogistic: return "xi";
  }
  return "unknown";
}

EstimatorKind estimator_kind_from_string(const std::string& name) {
  if (name == "mle" || name == "logistic") return EstimatorKind::MLE;
  if (name == "gamma") return EstimatorKind::GammaLogistic;
  if (name == "alpha") return EstimatorKind::AlphaLogistic;
  if (name == "constant_mislabel" || name == "eta") return EstimatorKind::ConstantMislabel;
  if (name == "xi") return EstimatorKind::XiLogistic;
  throw ValidationError("unknown estimator kind '" + name + "'");
}

std::string to_string(SolverKind kind) {
  return kind == SolverKind::FixedPointMM ? "fixed_point" : "quasi_newton";
}

SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "fixed_point" || name == "mm") return SolverKind::FixedPointMM;
  if (name == "quasi_newton" || name == "bfgs") return SolverKind::QuasiNewton;
  throw ValidationError("unknown solver '" + name + "'");
}

std::string to_string(FitStatus status) {
  switch (status) {
    case FitStatus::Converged: return "converged";
    case FitStatus::MaxIterations: return "max_iterations";
    case FitStatus::Diverged: return "diverged";
    case FitStatus::Separated: return "separated";
    case FitStatus::LineSearchFailed: return "line_search_failed";
  }
  return "unknown";
}

double weight_alpha_margin(int y, double t, double alpha) {
  if (alpha == 0.0) return 1.0;
  return std::exp(alpha * (y == 1 ? log_logistic(t) : log_logistic(-t)));
}

double alpha_bias_correction(double t, double alpha) {
  // nu * (pi^alpha - (1 - pi)^alpha), which equals the closed form in exp(t).
  const double l1 = log_logistic(t);
  const double l0 = log_logistic(-t);
  return std::exp(l1 + l0) * (std::exp(alpha * l1) - std::exp(alpha * l0));
}

double alpha_xi(double t, double alpha) {
  if (alpha == 0.0) return 1.0;
  const double l1 = log_logistic(t);
  const double l0 = log_logistic(-t);
  return std::exp(l0 + alpha * l1) + std::exp(l1 + alpha * l0);
}

double constant_mislabel_prob(double t, double eta) { return eta + (1.0 - 2.0 * eta) * logistic(t); }

double constant_mislabel_weight(double t, double eta) {
  if (eta == 0.0) return 1.0;
  const double a = std::log1p(-eta);
  const double b = std::log(eta);
  auto logaddexp = [](double u, double v) {
    const double hi = std::max(u, v);
    return hi + std::log1p(std::exp(std::min(u, v) - hi));
  };
  return (1.0 - 2.0 * eta) * std::exp(-logaddexp(a, b - t) - logaddexp(a, b + t));
}

XiTerms xi_terms(double t, double xi0, double xi1) {
  XiTerms r{};
  const double pi = logistic(t);
  const double q = logistic(-t);
  const double nu = pi * q;
  const double s = xi0 + xi1;
  if (s == 0.0) {
    r.eta0 = r.eta1 = r.deta0 = r.deta1 = 0.0;
    r.pi_xi = pi;
    r.slope = nu;
    r.weight = 1.0;
    return r;
  }
  const double h = 0.5 * std::clamp(t, -700.0, 700.0);
  const double d = (1.0 - s) * std::cosh(h) + s;
  const double ratio = (1.0 - s) * std::sinh(h) / (2.0 * d);
  r.eta0 = xi0 / d;
  r.eta1 = xi1 / d;
  r.deta0 = -r.eta0 * ratio;
  r.deta1 = -r.eta1 * ratio;
  r.pi_xi = r.eta0 * q + (1.0 - r.eta1) * pi;
  const double one_minus = r.eta1 * pi + (1.0 - r.eta0) * q;
  r.slope = (1.0 - r.eta0 - r.eta1) * nu + r.deta0 * q - r.deta1 * pi;
  const double den = r.pi_xi * one_minus;
  r.weight = den > 0.0 ? r.slope / den : 0.0;
  return r;
}

double log_likelihood(const Dataset& data, const Vector& beta) {
  const Vector t = margins_of(data, beta);
  double s = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) s += data.y(i) == 1 ? log_logistic(t(i)) : log_logistic(-t(i));
  return s / static_cast<double>(t.size());
}

Vector mle_score(const Dataset& data, const Vector& beta) {
  const Vector t = margins_of(data, beta);
  Vector r(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) r(i) = data.y(i) - logistic(t(i));
  return data.X.transpose() * r / static_cast<double>(t.size());
}

double gamma_objective(const Dataset& data, const Vector& beta, double gamma) {
  require_positive(gamma, "gamma");
  const Vector t = margins_of(data, beta);
  double s = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) s += weight_gamma_margin(data.y(i), t(i), gamma);
  return s / static_cast<double>(t.size());
}

Vector gamma_score(const Dataset& data, const Vector& beta, double gamma) {
  require_positive(gamma, "gamma");
  const Vector t = margins_of(data, beta);
  const double g1 = gamma + 1.0;
  Vector r(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i)
    r(i) = weight_gamma_margin(data.y(i), t(i), gamma) * (data.y(i) - logistic(g1 * t(i)));
  return data.X.transpose() * r / static_cast<double>(t.size());
}

double alpha_objective(const Dataset& data, const Vector& beta, double alpha) {
  require_positive(alpha, "alpha");
  const Vector t = margins_of(data, beta);
  double s = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double l1 = log_logistic(t(i));
    const double l0 = log_logistic(-t(i));
    const double ly = data.y(i) == 1 ? l1 : l0;
    const double mass = std::exp((1.0 + alpha) * l1) + std::exp((1.0 + alpha) * l0);
    s += std::expm1(alpha * ly) / alpha - (mass - 1.0) / (1.0 + alpha);
  }
  return s / static_cast<double>(t.size());
}

Vector alpha_score(const Dataset& data, const Vector& beta, double alpha) {
  require_positive(alpha, "alpha");
  const Vector t = margins_of(data, beta);
  Vector r(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i)
    r(i) = weight_alpha_margin(data.y(i), t(i), alpha) * (data.y(i) - logistic(t(i))) -
           alpha_bias_correction(t(i), alpha);
  return data.X.transpose() * r / static_cast<double>(t.size());
}

double constant_mislabel_loglik(const Dataset& data, const Vector& beta, double eta) {
  require_eta(eta);
  const Vector t = margins_of(data, beta);
  double s = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double p = data.y(i) == 1 ? eta + (1.0 - 2.0 * eta) * logistic(t(i))
                                    : eta + (1.0 - 2.0 * eta) * logistic(-t(i));
    s += eta == 0.0 ? (data.y(i) == 1 ? log_logistic(t(i)) : log_logistic(-t(i))) : std::log(p);
  }
  return s / static_cast<double>(t.size());
}

Vector constant_mislabel_score(const Dataset& data, const Vector& beta, double eta) {
  require_eta(eta);
  const Vector t = margins_of(data, beta);
  Vector r(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i)
    r(i) = constant_mislabel_weight(t(i), eta) * (data.y(i) - constant_mislabel_prob(t(i), eta));
  return data.X.transpose() * r / static_cast<double>(t.size());
}

double xi_loglik(const Dataset& data, const Vector& beta, double xi0, double xi1) {
  require_xi(xi0, xi1);
  const Vector t = margins_of(data, beta);
  double s = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (xi0 + xi1 == 0.0) {
      s += data.y(i) == 1 ? log_logistic(t(i)) : log_logistic(-t(i));
      continue;
    }
    const XiTerms k = xi_terms(t(i), xi0, xi1);
    const double pi = logistic(t(i));
    const double p = data.y(i) == 1 ? k.pi_xi : k.eta1 * pi + (1.0 - k.eta0) * (1.0 - pi);
    s += std::log(std::max(p, std::numeric_limits<double>::min()));
  }
  return s / static_cast<double>(t.size());
}

Vector xi_score(const Dataset& data, const Vector& beta, double xi0, double xi1) {
  require_xi(xi0, xi1);
  const Vector t = margins_of(data, beta);
  Vector r(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const XiTerms k = xi_terms(t(i), xi0, xi1);
    r(i) = k.weight * (data.y(i) - k.pi_xi);
  }
  return data.X.transpose() * r / static_cast<double>(t.size());
}

Vector estimating_score(const Dataset& data, const Vector& beta, const EstimatorSpec& spec) {
  validate(spec);
  switch (spec.kind) {
    case EstimatorKind::MLE: return mle_score(data, beta);
    case EstimatorKind::GammaLogistic: return gamma_score(data, beta, spec.tuning);
    case EstimatorKind::AlphaLogistic: return alpha_score(data, beta, spec.tuning);
    case EstimatorKind::ConstantMislabel: return constant_mislabel_score(data, beta, spec.tuning);
    case EstimatorKind::XiLogistic: return xi_score(data, beta, spec.tuning, spec.tuning1);
  }
  return {};
}

double estimating_objective(const Dataset& data, const Vector& beta, const EstimatorSpec& spec) {
  validate(spec);
  switch (spec.kind) {
    case EstimatorKind::MLE: return log_likelihood(data, beta);
    case EstimatorKind::GammaLogistic: return gamma_objective(data, beta, spec.tuning);
    case EstimatorKind::AlphaLogistic: return alpha_objective(data, beta, spec.tuning);
    case EstimatorKind::ConstantMislabel: return constant_mislabel_loglik(data, beta, spec.tuning);
    case EstimatorKind::XiLogistic: return xi_loglik(data, beta, spec.tuning, spec.tuning1);
  }
  return 0.0;
}

Vector instance_weights(const Dataset& data, const Vector& beta, const EstimatorSpec& spec) {
  validate(spec);
  const Vector t = margins_of(data, beta);
  Vector w(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    switch (spec.kind) {
      case EstimatorKind::MLE: w(i) = 1.0; break;
      case EstimatorKind::GammaLogistic: w(i) = weight_gamma_margin(data.y(i), t(i), spec.tuning); break;
      case EstimatorKind::AlphaLogistic: w(i) = weight_alpha_margin(data.y(i), t(i), spec.tuning); break;
      case EstimatorKind::ConstantMislabel: w(i) = constant_mislabel_weight(t(i), spec.tuning); break;
      case EstimatorKind::XiLogistic: w(i) = xi_terms(t(i), spec.tuning, spec.tuning1).weight; break;
    }
  }
  return w;
}

}  // namespace glogit
