#include "glogit/linalg.hpp"

#include <cmath>
#include <sstream>

#include "glogit/error.hpp"

namespace glogit {

double condition_number(const Matrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues().cwiseAbs();
  const double lo = ev.minCoeff();
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return ev.maxCoeff() / lo;
}

SymmetricInverse invert_symmetric(const Matrix& A, double max_condition, const std::string& what) {
  if (A.rows() != A.cols()) throw ValidationError(what + " is not square");
  if (!A.allFinite()) throw ConvergenceError(what + " has non-finite entries");
  const Matrix S = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  const Vector ev = es.eigenvalues();
  const double hi = ev.cwiseAbs().maxCoeff();
  const double lo = ev.cwiseAbs().minCoeff();
  SymmetricInverse out;
  out.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(out.condition <= max_condition)) {
    std::ostringstream msg;
    msg << what << " is numerically singular (condition number " << out.condition << " exceeds "
        << max_condition << ")";
    throw ConvergenceError(msg.str());
  }
  const Matrix& V = es.eigenvectors();
  out.inverse = V * ev.cwiseInverse().asDiagonal() * V.transpose();
  out.inverse = 0.5 * (out.inverse + out.inverse.transpose()).eval();
  return out;
}

Quadrature gauss_hermite_normal(int order) {
  if (order < 1) throw ValidationError("quadrature order must be positive");
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
  Matrix J = Matrix::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    J(k, k - 1) = std::sqrt(static_cast<double>(k));
    J(k - 1, k) = J(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(J);
  Quadrature q;
  q.nodes = es.eigenvalues();
  q.weights = es.eigenvectors().row(0).transpose().array().square();
  q.weights /= q.weights.sum();
  return q;
}

}  // namespace glogit
