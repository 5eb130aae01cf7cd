#pragma once

#include <string>

#include "glogit/model.hpp"

namespace glogit {

// Inverse of a symmetric matrix through its eigendecomposition. Refuses when the
// ratio of extreme absolute eigenvalues exceeds max_condition.
struct SymmetricInverse {
  Matrix inverse;
  double condition = 0.0;
};

SymmetricInverse invert_symmetric(const Matrix& A, double max_condition, const std::string& what);

double condition_number(const Matrix& A);

// Nodes and weights for E[g(Z)], Z ~ N(0, 1); weights sum to 1.
struct Quadrature {
  Vector nodes;
  Vector weights;
};

Quadrature gauss_hermite_normal(int order);

}  // namespace glogit
