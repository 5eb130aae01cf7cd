#pragma once

#include <memory>

#include "glogit/estimators.hpp"

namespace glogit::detail {

// One estimator seen by the generic solvers. The objective is maximized.
class Problem {
 public:
  explicit Problem(const Dataset& data) : data_(data) {}
  virtual ~Problem() = default;

  virtual double objective(const Vector& beta) const = 0;
  virtual Vector gradient(const Vector& beta) const = 0;
  virtual Vector score(const Vector& beta) const = 0;
  // Positive semidefinite stand-in for the negative Hessian of the objective.
  virtual Matrix curvature(const Vector& beta) const = 0;
  // Frozen-weight update used by the fixed-point solver.
  virtual Vector fixed_point_step(const Vector& beta) const = 0;
  // Margin multiplier used when checking for a degenerate (escaping) solution.
  virtual double margin_scale() const { return 1.0; }

 protected:
  const Dataset& data_;
};

std::unique_ptr<Problem> make_problem(const Dataset& data, const EstimatorSpec& spec);

// Maximizes sum_i w_i {a_i t_i - c log(1 + e^{t_i})} - sum_i b_i t_i over theta, t = X theta.
Vector weighted_logistic_solve(const Matrix& X, const Vector& a, const Vector& w, const Vector& b, double c,
                               Vector theta);

}  // namespace glogit::detail
