#include "glogit/inference.hpp"

#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "glogit/error.hpp"

namespace glogit {

namespace {

Matrix gram(const Matrix& X, const Vector& d) {
  return X.transpose() * d.asDiagonal() * X / static_cast<double>(X.rows());
}

void check(const Dataset& data, const Vector& beta) {
  validate(data);
  if (beta.size() != data.p()) throw ValidationError("coefficient length does not match covariates");
  if (!beta.allFinite()) throw ValidationError("non-finite coefficient");
}

Matrix symmetrize(const Matrix& A) { return 0.5 * (A + A.transpose()); }

}  // namespace

double delta_integrand(int y, double t, double gamma) {
  const double pg = logistic((gamma + 1.0) * t);
  const double r = y - pg;
  return weight_gamma_margin(y, t, gamma) * (pg * (1.0 - pg) - r * r);
}

Matrix gamma_H_hat(const Dataset& data, const Vector& beta, double gamma) {
  check(data, beta);
  const Vector t = data.X * beta;
  const double g1 = gamma + 1.0;
  Vector d(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double pg = logistic(g1 * t(i));
    d(i) = gamma_norm_margin(t(i), gamma) * pg * (1.0 - pg);
  }
  return symmetrize(gram(data.X, d) + gamma_Delta_hat(data, beta, gamma));
}

Matrix gamma_Delta_hat(const Dataset& data, const Vector& beta, double gamma) {
  check(data, beta);
  if (gamma == 0.0) return Matrix::Zero(data.p(), data.p());
  const Vector t = data.X * beta;
  Vector d(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) d(i) = delta_integrand(data.y(i), t(i), gamma);
  return symmetrize(gamma * gram(data.X, d));
}

Matrix gamma_U_hat(const Dataset& data, const Vector& beta, double gamma) {
  check(data, beta);
  const Vector t = data.X * beta;
  const double g1 = gamma + 1.0;
  Vector d(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double s = weight_gamma_margin(data.y(i), t(i), gamma) * (data.y(i) - logistic(g1 * t(i)));
    d(i) = s * s;
  }
  return symmetrize(gram(data.X, d));
}

Matrix gamma_observed_jacobian(const Dataset& data, const Vector& beta, double gamma) {
  check(data, beta);
  const Vector t = data.X * beta;
  const double g1 = gamma + 1.0;
  Vector d(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double pg = logistic(g1 * t(i));
    const double w = weight_gamma_margin(data.y(i), t(i), gamma);
    const double r = data.y(i) - pg;
    d(i) = w * pg * (1.0 - pg) + gamma * w * (pg * (1.0 - pg) - r * r);
  }
  return symmetrize(gram(data.X, d));
}

Matrix alpha_H_hat(const Dataset& data, const Vector& beta, double alpha) {
  check(data, beta);
  const Vector t = data.X * beta;
  Vector d(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) d(i) = alpha_xi(t(i), alpha) * logistic(t(i)) * logistic(-t(i));
  return symmetrize(gram(data.X, d));
}

Matrix alpha_U_hat(const Dataset& data, const Vector& beta, double alpha) {
  check(data, beta);
  const Vector t = data.X * beta;
  Vector d(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double xi = alpha_xi(t(i), alpha);
    d(i) = xi * xi * logistic(t(i)) * logistic(-t(i));
  }
  return symmetrize(gram(data.X, d));
}

double wald_quantile(double level) {
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - (1.0 - level) / 2.0);
}

CovarianceReport sandwich_covariance(const Dataset& data, const FitResult& fit, double level,
                                     double max_condition) {
  const double z = wald_quantile(level);
  const Vector& b = fit.beta_hat;
  check(data, b);
  CovarianceReport rep;
  rep.level = level;
  rep.n = data.n();
  switch (fit.spec.kind) {
    case EstimatorKind::MLE:
    case EstimatorKind::GammaLogistic: {
      const double g = fit.spec.kind == EstimatorKind::MLE ? 0.0 : fit.spec.tuning;
      rep.Delta_hat = gamma_Delta_hat(data, b, g);
      rep.H_hat = gamma_H_hat(data, b, g);
      rep.U_hat = gamma_U_hat(data, b, g);
      break;
    }
    case EstimatorKind::AlphaLogistic:
      rep.Delta_hat = Matrix::Zero(data.p(), data.p());
      rep.H_hat = alpha_H_hat(data, b, fit.spec.tuning);
      rep.U_hat = alpha_U_hat(data, b, fit.spec.tuning);
      break;
    default:
      throw ValidationError("sandwich covariance is available for mle, gamma and alpha fits, not " +
                            to_string(fit.spec.kind));
  }
  const SymmetricInverse inv = invert_symmetric(rep.H_hat, max_condition, "H_hat");
  rep.condition = inv.condition;
  rep.Sigma_hat = symmetrize(inv.inverse * rep.U_hat * inv.inverse);
  rep.se = (rep.Sigma_hat.diagonal().cwiseMax(0.0) / static_cast<double>(data.n())).cwiseSqrt();
  rep.ci_lower = b - z * rep.se;
  rep.ci_upper = b + z * rep.se;
  return rep;
}

Vector influence_gamma(int y, const Vector& x, const Vector& beta0, double gamma, const Matrix& H) {
  check_label(y);
  if (!(gamma >= 0.0)) throw ValidationError("gamma must be nonnegative");
  const double t = margin(x, beta0);
  const SymmetricInverse inv = invert_symmetric(H, kMaxCondition, "H");
  const double s = weight_gamma_margin(y, t, gamma) * (y - logistic((gamma + 1.0) * t));
  return s * (inv.inverse * x);
}

Vector influence_alpha(int y, const Vector& x, const Vector& beta0, double alpha, const Matrix& H) {
  check_label(y);
  if (!(alpha >= 0.0)) throw ValidationError("alpha must be nonnegative");
  const double t = margin(x, beta0);
  const SymmetricInverse inv = invert_symmetric(H, kMaxCondition, "H");
  const double s = weight_alpha_margin(y, t, alpha) * (y - logistic(t)) - alpha_bias_correction(t, alpha);
  return s * (inv.inverse * x);
}

Vector figure_design_beta() {
  Vector b(2);
  b << std::log(2.0), 1.0;
  return b;
}

If2Calculator::If2Calculator(If2Kind kind, double tuning, const Vector& beta0, int quadrature_order)
    : kind_(kind), tuning_(tuning), beta0_(beta0) {
  if (beta0.size() != 2) throw ValidationError("IF2 needs a two-coefficient model (intercept, slope)");
  if (!(tuning >= 0.0)) throw ValidationError("tuning must be nonnegative");
  const Quadrature q = gauss_hermite_normal(quadrature_order);
  const double means[2] = {-0.5, 0.5};
  const double shares[2] = {1.0 / 3.0, 2.0 / 3.0};
  H_ = Matrix::Zero(2, 2);
  for (int c = 0; c < 2; ++c) {
    for (Eigen::Index k = 0; k < q.nodes.size(); ++k) {
      const double xv = means[c] + q.nodes(k);
      const double t = beta0(0) + beta0(1) * xv;
      double h;
      if (kind == If2Kind::Gamma) {
        const double pg = logistic((tuning + 1.0) * t);
        h = gamma_norm_margin(t, tuning) * pg * (1.0 - pg);
      } else {
        h = alpha_xi(t, tuning) * (logistic(t) * (1.0 - logistic(t)));
      }
      const double m = shares[c] * q.weights(k) * h;
      H_(0, 0) += m;
      H_(0, 1) += m * xv;
      H_(1, 1) += m * xv * xv;
    }
  }
  H_(1, 0) = H_(0, 1);
  H_inv_ = invert_symmetric(H_, kMaxCondition, "population H").inverse;
}

double If2Calculator::operator()(double x, int y) const {
  check_label(y);
  Vector X(2);
  X << 1.0, x;
  const double t = beta0_.dot(X);
  double s;
  if (kind_ == If2Kind::Gamma)
    s = weight_gamma_margin(y, t, tuning_) * (y - logistic((tuning_ + 1.0) * t));
  else
    s = weight_alpha_margin(y, t, tuning_) * (y - logistic(t)) - alpha_bias_correction(t, tuning_);
  const Vector inf = s * (H_inv_ * X);
  const double contrast = beta0_(0) * inf(1) - beta0_(1) * inf(0);
  return contrast * contrast;
}

double if2_misclassification(double x, int y, const Vector& beta0, double tuning, If2Kind kind) {
  return If2Calculator(kind, tuning, beta0)(x, y);
}

}  // namespace glogit
