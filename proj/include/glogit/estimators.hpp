#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glogit/dataset.hpp"
#include "glogit/model.hpp"

namespace glogit {

enum class EstimatorKind { MLE, GammaLogistic, AlphaLogistic, ConstantMislabel, XiLogistic };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::MLE;
  double tuning = 0.0;   // gamma, alpha, eta or xi0
  double tuning1 = 0.0;  // xi1 (XiLogistic only)

  static EstimatorSpec mle() { return {EstimatorKind::MLE, 0.0, 0.0}; }
  static EstimatorSpec gamma(double g) { return {EstimatorKind::GammaLogistic, g, 0.0}; }
  static EstimatorSpec alpha(double a) { return {EstimatorKind::AlphaLogistic, a, 0.0}; }
  static EstimatorSpec constant_mislabel(double eta) { return {EstimatorKind::ConstantMislabel, eta, 0.0}; }
  static EstimatorSpec xi(double xi0, double xi1) { return {EstimatorKind::XiLogistic, xi0, xi1}; }
};

void validate(const EstimatorSpec& spec);
std::string to_string(EstimatorKind kind);
EstimatorKind estimator_kind_from_string(const std::string& name);

enum class SolverKind { FixedPointMM, QuasiNewton };
std::string to_string(SolverKind kind);
SolverKind solver_kind_from_string(const std::string& name);

enum class FitStatus { Converged, MaxIterations, Diverged, Separated, LineSearchFailed };
std::string to_string(FitStatus status);

struct SolverOptions {
  double tolerance = 1e-8;  // on the max-abs estimating equation
  int max_iterations = 500;
  SolverKind solver = SolverKind::FixedPointMM;
  std::optional<Vector> initial;  // default: MLE warm start (zero for the MLE itself)
  int restarts = 0;
  std::uint64_t restart_seed = 0;
  double divergence_bound = 1e3;
  // Non-MLE fits whose norm exceeds this multiple of max(1, |warm start|) are
  // reported as diverged: the ascent has left for the degenerate solution at infinity.
  double escape_factor = 10.0;
};

struct FitResult {
  EstimatorSpec spec;
  Vector beta_hat;
  bool converged = false;
  int iterations = 0;
  double final_score_norm = 0.0;
  Vector weights;
  SolverKind solver = SolverKind::FixedPointMM;
  FitStatus status = FitStatus::MaxIterations;
  bool separation_detected = false;
  double objective = 0.0;
  std::string message;
};

// Margin-level kernels.
double weight_alpha_margin(int y, double t, double alpha);
double alpha_bias_correction(double t, double alpha);
// {exp(alpha t) + exp(t)} / {1 + exp(t)}^{1 + alpha}
double alpha_xi(double t, double alpha);
double constant_mislabel_weight(double t, double eta);
double constant_mislabel_prob(double t, double eta);

struct XiTerms {
  double eta0, eta1;    // mislabel probabilities at this margin
  double deta0, deta1;  // derivatives with respect to the margin
  double pi_xi;         // contaminated success probability
  double slope;         // d pi_xi / d margin
  double weight;        // score weight slope / {pi_xi (1 - pi_xi)}
};
XiTerms xi_terms(double t, double xi0, double xi1);

double log_likelihood(const Dataset& data, const Vector& beta);
Vector mle_score(const Dataset& data, const Vector& beta);

double gamma_objective(const Dataset& data, const Vector& beta, double gamma);
Vector gamma_score(const Dataset& data, const Vector& beta, double gamma);

// Empirical density-power objective whose gradient is alpha_score (constants dropped).
double alpha_objective(const Dataset& data, const Vector& beta, double alpha);
Vector alpha_score(const Dataset& data, const Vector& beta, double alpha);

double constant_mislabel_loglik(const Dataset& data, const Vector& beta, double eta);
Vector constant_mislabel_score(const Dataset& data, const Vector& beta, double eta);

double xi_loglik(const Dataset& data, const Vector& beta, double xi0, double xi1);
Vector xi_score(const Dataset& data, const Vector& beta, double xi0, double xi1);

// Dispatch on the spec.
Vector estimating_score(const Dataset& data, const Vector& beta, const EstimatorSpec& spec);
double estimating_objective(const Dataset& data, const Vector& beta, const EstimatorSpec& spec);
Vector instance_weights(const Dataset& data, const Vector& beta, const EstimatorSpec& spec);

FitResult fit(const Dataset& data, const EstimatorSpec& spec, const SolverOptions& opts = {});

// Ridge-damped logistic fit used as a start when the MLE does not exist.
Vector ridge_logistic(const Dataset& data, double penalty);

struct EtaProfile {
  std::vector<double> grid;
  std::vector<double> loglik;  // NaN where the fit failed
  double best_eta = 0.0;
  FitResult best_fit;
};

std::vector<double> default_eta_grid();
EtaProfile profile_constant_mislabel(const Dataset& data, const std::vector<double>& grid,
                                     const SolverOptions& opts = {});

}  // namespace glogit
