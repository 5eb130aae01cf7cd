#pragma once

#include "glogit/dataset.hpp"
#include "glogit/estimators.hpp"
#include "glogit/linalg.hpp"

namespace glogit {

struct CovarianceReport {
  Matrix H_hat;
  Matrix U_hat;
  Matrix Delta_hat;
  Matrix Sigma_hat;
  Vector se;        // sqrt(diag(Sigma_hat) / n)
  Vector ci_lower;
  Vector ci_upper;
  double level = 0.95;
  double condition = 0.0;  // of H_hat
  Eigen::Index n = 0;
};

constexpr double kMaxCondition = 1e12;

// Sandwich covariance for MLE, gamma-logistic and alpha-logistic fits.
CovarianceReport sandwich_covariance(const Dataset& data, const FitResult& fit, double level = 0.95,
                                     double max_condition = kMaxCondition);

// Pieces of the gamma-logistic sandwich; gamma = 0 gives the MLE versions.
Matrix gamma_H_hat(const Dataset& data, const Vector& beta, double gamma);
Matrix gamma_Delta_hat(const Dataset& data, const Vector& beta, double gamma);
Matrix gamma_U_hat(const Dataset& data, const Vector& beta, double gamma);
// Exact -dS/dbeta of the sample gamma score.
Matrix gamma_observed_jacobian(const Dataset& data, const Vector& beta, double gamma);

Matrix alpha_H_hat(const Dataset& data, const Vector& beta, double alpha);
Matrix alpha_U_hat(const Dataset& data, const Vector& beta, double alpha);

// w_gamma(y) [nu_g - (y - pi_g)^2] at margin t; it averages to zero over y under the model.
double delta_integrand(int y, double t, double gamma);

Vector influence_gamma(int y, const Vector& x, const Vector& beta0, double gamma, const Matrix& H);
Vector influence_alpha(int y, const Vector& x, const Vector& beta0, double alpha, const Matrix& H);

double wald_quantile(double level);

enum class If2Kind { Gamma, Alpha };

// Second-order influence of the misclassification rate for a one-covariate model
// with intercept first, under the two-component normal design where
// X | Y0 = j ~ N(mu_j, 1) and P(Y0 = 1) = 2 P(Y0 = 0).
class If2Calculator {
 public:
  If2Calculator(If2Kind kind, double tuning, const Vector& beta0, int quadrature_order = 64);

  double operator()(double x, int y) const;
  const Matrix& population_H() const { return H_; }

 private:
  If2Kind kind_;
  double tuning_;
  Vector beta0_;
  Matrix H_;
  Matrix H_inv_;
};

double if2_misclassification(double x, int y, const Vector& beta0, double tuning, If2Kind kind);

// The logistic coefficients implied by the design above: (log 2, 1).
Vector figure_design_beta();

}  // namespace glogit
