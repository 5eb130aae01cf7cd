#include <algorithm>
#include <cmath>
#include <limits>

#include "glogit/error.hpp"
#include "glogit/estimators.hpp"
#include "glogit/random.hpp"
#include "problem.hpp"

namespace glogit {
namespace detail {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 50;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double softplus(double t) { return -log_logistic(-t); }

double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

bool noise_level(double f_new, double f_old) {
  return std::abs(f_new - f_old) <= 16.0 * kEps * (1.0 + std::abs(f_old));
}

// Solves A d = g for symmetric positive semidefinite A; falls back to g when A is unusable.
Vector psd_solve(const Matrix& A, const Vector& g) {
  Eigen::LDLT<Matrix> ldlt(A);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    Vector d = ldlt.solve(g);
    if (d.allFinite()) return d;
  }
  return g;
}

Matrix weighted_gram(const Matrix& X, const Vector& d) {
  return X.transpose() * d.asDiagonal() * X / static_cast<double>(X.rows());
}

class MleProblem : public Problem {
 public:
  using Problem::Problem;
  double objective(const Vector& b) const override { return log_likelihood(data_, b); }
  Vector gradient(const Vector& b) const override { return mle_score(data_, b); }
  Vector score(const Vector& b) const override { return mle_score(data_, b); }
  Matrix curvature(const Vector& b) const override {
    const Vector t = data_.X * b;
    Vector nu(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) nu(i) = logistic(t(i)) * logistic(-t(i));
    return weighted_gram(data_.X, nu);
  }
  Vector fixed_point_step(const Vector& b) const override { return b + psd_solve(curvature(b), score(b)); }
};

class GammaProblem : public Problem {
 public:
  GammaProblem(const Dataset& d, double gamma) : Problem(d), gamma_(gamma) {}
  double objective(const Vector& b) const override { return gamma_objective(data_, b, gamma_); }
  Vector gradient(const Vector& b) const override { return gamma_ * gamma_score(data_, b, gamma_); }
  Vector score(const Vector& b) const override { return gamma_score(data_, b, gamma_); }
  Matrix curvature(const Vector& b) const override {
    const Vector t = data_.X * b;
    const double g1 = gamma_ + 1.0;
    Vector d(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const double pg = logistic(g1 * t(i));
      d(i) = gamma_norm_margin(t(i), gamma_) * pg * (1.0 - pg);
    }
    return gamma_ * weighted_gram(data_.X, d);
  }
  Vector fixed_point_step(const Vector& b) const override {
    const Vector t = data_.X * b;
    Vector w(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) w(i) = weight_gamma_margin(data_.y(i), t(i), gamma_);
    const Vector a = data_.y.cast<double>();
    const double g1 = gamma_ + 1.0;
    return weighted_logistic_solve(data_.X, a, w, Vector::Zero(t.size()), 1.0, g1 * b) / g1;
  }
  double margin_scale() const override { return gamma_ + 1.0; }

 private:
  double gamma_;
};

class AlphaProblem : public Problem {
 public:
  AlphaProblem(const Dataset& d, double alpha) : Problem(d), alpha_(alpha) {}
  double objective(const Vector& b) const override { return alpha_objective(data_, b, alpha_); }
  Vector gradient(const Vector& b) const override { return alpha_score(data_, b, alpha_); }
  Vector score(const Vector& b) const override { return alpha_score(data_, b, alpha_); }
  Matrix curvature(const Vector& b) const override {
    const Vector t = data_.X * b;
    Vector d(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i)
      d(i) = alpha_xi(t(i), alpha_) * logistic(t(i)) * logistic(-t(i));
    return weighted_gram(data_.X, d);
  }
  Vector fixed_point_step(const Vector& b) const override {
    const Vector t = data_.X * b;
    Vector w(t.size()), c(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      w(i) = weight_alpha_margin(data_.y(i), t(i), alpha_);
      c(i) = alpha_bias_correction(t(i), alpha_);
    }
    const Vector a = data_.y.cast<double>();
    return weighted_logistic_solve(data_.X, a, w, c, 1.0, b);
  }

 private:
  double alpha_;
};

class ConstantMislabelProblem : public Problem {
 public:
  ConstantMislabelProblem(const Dataset& d, double eta) : Problem(d), eta_(eta) {}
  double objective(const Vector& b) const override { return constant_mislabel_loglik(data_, b, eta_); }
  Vector gradient(const Vector& b) const override { return constant_mislabel_score(data_, b, eta_); }
  Vector score(const Vector& b) const override { return constant_mislabel_score(data_, b, eta_); }
  Matrix curvature(const Vector& b) const override {
    const Vector t = data_.X * b;
    Vector d(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i)
      d(i) = constant_mislabel_weight(t(i), eta_) * (1.0 - 2.0 * eta_) * logistic(t(i)) * logistic(-t(i));
    return weighted_gram(data_.X, d);
  }
  Vector fixed_point_step(const Vector& b) const override {
    const Vector t = data_.X * b;
    Vector w(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) w(i) = constant_mislabel_weight(t(i), eta_);
    const Vector a = data_.y.cast<double>().array() - eta_;
    return weighted_logistic_solve(data_.X, a, w, Vector::Zero(t.size()), 1.0 - 2.0 * eta_, b);
  }

 private:
  double eta_;
};

class XiProblem : public Problem {
 public:
  XiProblem(const Dataset& d, double xi0, double xi1) : Problem(d), xi0_(xi0), xi1_(xi1) {}
  double objective(const Vector& b) const override { return xi_loglik(data_, b, xi0_, xi1_); }
  Vector gradient(const Vector& b) const override { return xi_score(data_, b, xi0_, xi1_); }
  Vector score(const Vector& b) const override { return xi_score(data_, b, xi0_, xi1_); }
  Matrix curvature(const Vector& b) const override {
    const Vector t = data_.X * b;
    Vector d(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const XiTerms k = xi_terms(t(i), xi0_, xi1_);
      d(i) = std::max(0.0, k.weight * k.slope);
    }
    return weighted_gram(data_.X, d);
  }
  // Fisher scoring.
  Vector fixed_point_step(const Vector& b) const override { return b + psd_solve(curvature(b), score(b)); }

 private:
  double xi0_, xi1_;
};

}  // namespace

std::unique_ptr<Problem> make_problem(const Dataset& data, const EstimatorSpec& spec) {
  switch (spec.kind) {
    case EstimatorKind::MLE: return std::make_unique<MleProblem>(data);
    case EstimatorKind::GammaLogistic: return std::make_unique<GammaProblem>(data, spec.tuning);
    case EstimatorKind::AlphaLogistic: return std::make_unique<AlphaProblem>(data, spec.tuning);
    case EstimatorKind::ConstantMislabel: return std::make_unique<ConstantMislabelProblem>(data, spec.tuning);
    case EstimatorKind::XiLogistic: return std::make_unique<XiProblem>(data, spec.tuning, spec.tuning1);
  }
  throw ValidationError("unknown estimator kind");
}

Vector weighted_logistic_solve(const Matrix& X, const Vector& a, const Vector& w, const Vector& b, double c,
                               Vector theta) {
  const double n = static_cast<double>(X.rows());
  auto value = [&](const Vector& th) {
    const Vector t = X * th;
    double s = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) s += w(i) * (a(i) * t(i) - c * softplus(t(i))) - b(i) * t(i);
    return s / n;
  };
  double f = value(theta);
  for (int it = 0; it < 100; ++it) {
    const Vector t = X * theta;
    Vector r(t.size()), h(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const double pi = logistic(t(i));
      r(i) = w(i) * (a(i) - c * pi) - b(i);
      h(i) = w(i) * c * pi * logistic(-t(i));
    }
    const Vector g = X.transpose() * r / n;
    if (max_abs(g) <= 1e-14) break;
    const Vector d = psd_solve(weighted_gram(X, h), g);
    const double slope = g.dot(d);
    double step = 1.0;
    bool accepted = false;
    Vector cand;
    double fc = f;
    for (int k = 0; k <= kMaxHalvings; ++k, step *= 0.5) {
      cand = theta + step * d;
      fc = value(cand);
      if (std::isfinite(fc) && (fc >= f + kArmijo * step * slope || noise_level(fc, f))) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double move = max_abs(cand - theta);
    theta = cand;
    f = fc;
    if (move <= 1e-13 * (1.0 + max_abs(theta))) break;
  }
  return theta;
}

}  // namespace detail

namespace {

using detail::Problem;
using detail::kArmijo;
using detail::kMaxHalvings;

double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

struct SolveOutcome {
  Vector beta;
  int iterations = 0;
  FitStatus status = FitStatus::MaxIterations;
};

// Mean of nu at the effective margins; near zero means the solution is escaping to infinity.
bool degenerate(const Problem& pb, const Dataset& data, const Vector& beta) {
  const Vector t = data.X * beta * pb.margin_scale();
  double s = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) s += logistic(t(i)) * logistic(-t(i));
  return s / static_cast<double>(t.size()) < 1e-6;
}

FitStatus finish_converged(const Problem& pb, const Dataset& data, const Vector& beta) {
  return degenerate(pb, data, beta) ? FitStatus::Diverged : FitStatus::Converged;
}

SolveOutcome run_fixed_point(const Problem& pb, const Dataset& data, Vector beta, const SolverOptions& opts) {
  SolveOutcome out;
  double f = pb.objective(beta);
  for (int it = 0;; ++it) {
    out.iterations = it;
    if (max_abs(pb.score(beta)) <= opts.tolerance) {
      out.status = finish_converged(pb, data, beta);
      break;
    }
    if (it >= opts.max_iterations) {
      out.status = FitStatus::MaxIterations;
      break;
    }
    Vector next = pb.fixed_point_step(beta);
    if (!next.allFinite()) {
      out.status = FitStatus::Diverged;
      break;
    }
    double fn = pb.objective(next);
    int halvings = 0;
    while (!(fn >= f || detail::noise_level(fn, f)) && halvings < kMaxHalvings) {
      next = beta + 0.5 * (next - beta);
      fn = pb.objective(next);
      ++halvings;
    }
    if (!(fn >= f || detail::noise_level(fn, f))) {
      out.status = FitStatus::LineSearchFailed;
      break;
    }
    beta = next;
    f = fn;
    if (max_abs(beta) > opts.divergence_bound) {
      out.status = FitStatus::Diverged;
      out.iterations = it + 1;
      break;
    }
  }
  out.beta = beta;
  return out;
}

Matrix fresh_inverse(const Problem& pb, const Vector& beta, const Vector& g) {
  const Matrix C = pb.curvature(beta);
  Eigen::LDLT<Matrix> ldlt(C);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    Matrix inv = ldlt.solve(Matrix::Identity(C.rows(), C.cols()));
    if (inv.allFinite() && Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (inv + inv.transpose())).eigenvalues().minCoeff() > 0.0)
      return inv;
  }
  return Matrix::Identity(beta.size(), beta.size()) / std::max(1.0, g.norm());
}

// BFGS on the negated objective with Armijo backtracking.
SolveOutcome run_quasi_newton(const Problem& pb, const Dataset& data, Vector beta, const SolverOptions& opts) {
  SolveOutcome out;
  double f = -pb.objective(beta);
  Vector g = -pb.gradient(beta);
  Matrix Hinv = fresh_inverse(pb, beta, g);
  bool fresh = true;
  double score_norm = max_abs(pb.score(beta));
  for (int it = 0;; ++it) {
    out.iterations = it;
    if (score_norm <= opts.tolerance) {
      out.status = finish_converged(pb, data, beta);
      break;
    }
    if (it >= opts.max_iterations) {
      out.status = FitStatus::MaxIterations;
      break;
    }
    Vector d = -Hinv * g;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      Hinv = fresh_inverse(pb, beta, g);
      fresh = true;
      d = -Hinv * g;
      slope = g.dot(d);
      if (!(slope < 0.0)) {
        d = -g;
        slope = -g.squaredNorm();
      }
    }
    double step = 1.0;
    bool accepted = false;
    Vector cand;
    double fc = f;
    double cand_norm = score_norm;
    for (int k = 0; k <= kMaxHalvings; ++k, step *= 0.5) {
      cand = beta + step * d;
      fc = -pb.objective(cand);
      if (!std::isfinite(fc)) continue;
      if (fc <= f + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      if (detail::noise_level(fc, f)) {
        cand_norm = max_abs(pb.score(cand));
        if (cand_norm < score_norm) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      if (!fresh) {
        Hinv = fresh_inverse(pb, beta, g);
        fresh = true;
        continue;
      }
      out.status = FitStatus::LineSearchFailed;
      break;
    }
    const Vector gn = -pb.gradient(cand);
    const Vector s = cand - beta;
    const Vector yv = gn - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm() && sy > 0.0) {
      const double rho = 1.0 / sy;
      const Matrix I = Matrix::Identity(s.size(), s.size());
      Hinv = (I - rho * s * yv.transpose()) * Hinv * (I - rho * yv * s.transpose()) + rho * s * s.transpose();
      fresh = false;
    }
    beta = cand;
    f = fc;
    g = gn;
    score_norm = max_abs(pb.score(beta));
    if (max_abs(beta) > opts.divergence_bound) {
      out.status = FitStatus::Diverged;
      out.iterations = it + 1;
      break;
    }
  }
  out.beta = beta;
  return out;
}

struct MleOutcome {
  Vector beta;
  int iterations = 0;
  bool converged = false;
  bool separated = false;
};

// Newton-Raphson for the MLE. A well-posed problem converges quadratically, so
// failing to settle the step within the iteration budget, or coefficients beyond
// the divergence bound, is read as (quasi-)complete separation.
MleOutcome mle_newton(const Dataset& data, Vector beta, const SolverOptions& opts) {
  detail::MleProblem pb(data);
  MleOutcome out;
  double f = pb.objective(beta);
  double last_move = std::numeric_limits<double>::infinity();
  for (int it = 0;; ++it) {
    out.iterations = it;
    const Vector s = pb.score(beta);
    if (max_abs(s) <= opts.tolerance && last_move <= 1e-6 * (1.0 + max_abs(beta))) {
      out.converged = true;
      break;
    }
    if (it >= opts.max_iterations) break;
    const Vector d = detail::psd_solve(pb.curvature(beta), s);
    const double slope = s.dot(d);
    double step = 1.0;
    bool accepted = false;
    Vector cand;
    double fc = f;
    for (int k = 0; k <= kMaxHalvings; ++k, step *= 0.5) {
      cand = beta + step * d;
      fc = pb.objective(cand);
      if (std::isfinite(fc) && (fc >= f + kArmijo * step * slope || detail::noise_level(fc, f))) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    last_move = max_abs(cand - beta);
    beta = cand;
    f = fc;
    if (max_abs(beta) > opts.divergence_bound) break;
  }
  out.beta = beta;
  out.separated = !out.converged;
  if (out.converged && degenerate(pb, data, beta)) out.separated = true;
  return out;
}

void validate_options(const SolverOptions& opts, Eigen::Index p) {
  if (!(opts.tolerance > 0.0)) throw ValidationError("solver tolerance must be positive");
  if (opts.max_iterations < 1) throw ValidationError("max_iterations must be at least 1");
  if (!(opts.divergence_bound > 0.0)) throw ValidationError("divergence bound must be positive");
  if (!(opts.escape_factor > 1.0)) throw ValidationError("escape factor must exceed 1");
  if (opts.restarts < 0) throw ValidationError("restarts must be nonnegative");
  if (opts.initial && (opts.initial->size() != p || !opts.initial->allFinite()))
    throw ValidationError("initial coefficients must be finite with one entry per covariate");
}

FitResult assemble(const Dataset& data, const EstimatorSpec& spec, const Problem& pb, const SolveOutcome& so,
                   SolverKind solver) {
  FitResult r;
  r.spec = spec;
  r.beta_hat = so.beta;
  r.iterations = so.iterations;
  r.status = so.status;
  r.converged = so.status == FitStatus::Converged;
  r.solver = solver;
  r.final_score_norm = max_abs(pb.score(so.beta));
  r.objective = pb.objective(so.beta);
  r.weights = instance_weights(data, so.beta, spec);
  return r;
}

SolveOutcome solve(const Problem& pb, const Dataset& data, const Vector& start, const SolverOptions& opts) {
  return opts.solver == SolverKind::FixedPointMM ? run_fixed_point(pb, data, start, opts)
                                                  : run_quasi_newton(pb, data, start, opts);
}

}  // namespace

Vector ridge_logistic(const Dataset& data, double penalty) {
  validate(data);
  if (!(penalty > 0.0)) throw ValidationError("ridge penalty must be positive");
  const auto icpt = intercept_column(data.X);
  const double n = static_cast<double>(data.n());
  Vector mask = Vector::Ones(data.p());
  if (icpt) mask(*icpt) = 0.0;
  detail::MleProblem pb(data);
  auto value = [&](const Vector& b) {
    return pb.objective(b) - 0.5 * penalty / n * b.cwiseProduct(mask).squaredNorm();
  };
  Vector beta = Vector::Zero(data.p());
  double f = value(beta);
  for (int it = 0; it < 200; ++it) {
    const Vector g = pb.score(beta) - penalty / n * beta.cwiseProduct(mask);
    if (max_abs(g) <= 1e-14) break;
    const Matrix H = pb.curvature(beta) + Matrix(penalty / n * mask.asDiagonal());
    const Vector d = detail::psd_solve(H, g);
    double step = 1.0;
    Vector cand = beta;
    double fc = f;
    bool accepted = false;
    for (int k = 0; k <= kMaxHalvings; ++k, step *= 0.5) {
      cand = beta + step * d;
      fc = value(cand);
      if (fc >= f + kArmijo * step * g.dot(d) || detail::noise_level(fc, f)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double move = max_abs(cand - beta);
    beta = cand;
    f = fc;
    if (move <= 1e-13 * (1.0 + max_abs(beta))) break;
  }
  return beta;
}

FitResult fit(const Dataset& data, const EstimatorSpec& spec, const SolverOptions& opts) {
  validate(data);
  validate(spec);
  validate_options(opts, data.p());

  const double ridge_penalty = 1e-4 * static_cast<double>(data.n());
  auto pb = detail::make_problem(data, spec);

  if (spec.kind == EstimatorKind::MLE) {
    const Vector start = opts.initial ? *opts.initial : Vector::Zero(data.p());
    const MleOutcome m = mle_newton(data, start, opts);
    if (m.separated) {
      SolveOutcome so{ridge_logistic(data, ridge_penalty), m.iterations, FitStatus::Separated};
      FitResult r = assemble(data, spec, *pb, so, opts.solver);
      r.separation_detected = true;
      r.message = "complete or quasi-complete separation: the MLE does not exist; ridge-damped coefficients returned";
      return r;
    }
    if (opts.solver == SolverKind::FixedPointMM) {
      SolveOutcome so{m.beta, m.iterations, finish_converged(*pb, data, m.beta)};
      return assemble(data, spec, *pb, so, opts.solver);
    }
    return assemble(data, spec, *pb, run_quasi_newton(*pb, data, start, opts), opts.solver);
  }

  bool separated = false;
  Vector start;
  Vector mle_beta;
  if (opts.initial) {
    start = *opts.initial;
    mle_beta = start;
  } else {
    const MleOutcome m = mle_newton(data, Vector::Zero(data.p()), opts);
    separated = m.separated;
    start = separated ? ridge_logistic(data, ridge_penalty) : m.beta;
    mle_beta = start;
  }

  const double radius = opts.escape_factor * std::max(1.0, mle_beta.norm());
  SolverOptions inner = opts;
  inner.divergence_bound = std::min(opts.divergence_bound, radius);
  auto bounded_solve = [&](const Vector& s) {
    SolveOutcome so = solve(*pb, data, s, inner);
    if (so.status == FitStatus::Converged && so.beta.norm() > radius) so.status = FitStatus::Diverged;
    return so;
  };

  FitResult best = assemble(data, spec, *pb, bounded_solve(start), opts.solver);
  for (int r = 0; r < opts.restarts; ++r) {
    Philox4x32 rng(opts.restart_seed, stream_id(0x7265737461727473ull, static_cast<std::uint64_t>(r)));
    Vector s = mle_beta;
    for (Eigen::Index j = 0; j < s.size(); ++j) s(j) += rng.normal(0.0, 0.5);
    FitResult cand = assemble(data, spec, *pb, bounded_solve(s), opts.solver);
    if (!cand.converged) continue;
    const bool better = !best.converged || cand.objective > best.objective + 1e-12 ||
                        (std::abs(cand.objective - best.objective) <= 1e-12 &&
                         cand.beta_hat.norm() < best.beta_hat.norm());
    if (better) best = std::move(cand);
  }
  best.separation_detected = separated;
  if (separated)
    best.message = "separation detected at the MLE warm start; started from a ridge-damped solution";
  else if (best.status == FitStatus::Diverged)
    best.message = "iterates escaped to a degenerate solution; no finite local optimum was found";
  else if (!best.converged)
    best.message = "stopped before the estimating equation was solved (" + to_string(best.status) + ")";
  return best;
}

std::vector<double> default_eta_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 30; ++k) g.push_back(k / 100.0);
  return g;
}

EtaProfile profile_constant_mislabel(const Dataset& data, const std::vector<double>& grid,
                                     const SolverOptions& opts) {
  if (grid.empty()) throw ValidationError("eta grid is empty");
  EtaProfile prof;
  prof.grid = grid;
  bool any = false;
  double best = -std::numeric_limits<double>::infinity();
  for (double eta : grid) {
    FitResult r = fit(data, EstimatorSpec::constant_mislabel(eta), opts);
    const double ll = r.converged ? constant_mislabel_loglik(data, r.beta_hat, eta)
                                  : std::numeric_limits<double>::quiet_NaN();
    prof.loglik.push_back(ll);
    if (r.converged && ll > best) {
      best = ll;
      prof.best_eta = eta;
      prof.best_fit = std::move(r);
      any = true;
    }
  }
  if (!any) throw ConvergenceError("no constant-mislabel fit on the eta grid converged");
  return prof;
}

}  // namespace glogit
