#pragma once

#include <Eigen/Dense>

namespace glogit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct MislabelPair {
  double eta0 = 0.0;
  double eta1 = 0.0;
};

struct MixtureDecomposition {
  double c = 1.0;   // clean proportion 1 - eta0 - eta1
  double h1 = 0.0;  // mass the contaminating pmf puts on y = 1
};

// Scalar kernels in terms of the margin t = beta'x.
double logistic(double t);
// log of logistic(t), accurate in both tails.
double log_logistic(double t);
double gamma_norm_margin(double t, double gamma);
double weight_gamma_margin(int y, double t, double gamma);
double bias_term_margin(double t, double gamma, const MislabelPair& eta);

double success_prob(const Vector& x, const Vector& beta);
double label_pmf(int y, const Vector& x, const Vector& beta);
double pmf_gamma_norm(const Vector& x, const Vector& beta, double gamma);
double weight_gamma(int y, const Vector& x, const Vector& beta, double gamma);

void validate_mislabel_pair(const MislabelPair& eta);
MixtureDecomposition mixture_decompose(const MislabelPair& eta);
// P(Y = 1 | x) when the clean success probability is pi and labels flip per eta.
double contaminated_success_prob(double pi, const MislabelPair& eta);
// c f(y) + (1 - c) h(y).
double mixture_pmf(int y, double pi, const MixtureDecomposition& mix);

double bias_term_B(const Vector& x, const Vector& beta, double gamma, const MislabelPair& eta);

// Throws ValidationError unless x and beta have equal length and finite entries.
double margin(const Vector& x, const Vector& beta);
void check_label(int y);

}  // namespace glogit
