#pragma once

#include <cmath>
#include <functional>

#include <glogit/dataset.hpp>
#include <glogit/model.hpp>
#include <glogit/random.hpp>

namespace testutil {

using glogit::Matrix;
using glogit::Vector;

// Gaussian covariates with an intercept in the last column, labels from the logistic model.
inline glogit::Dataset logistic_data(int n, int p, const Vector& beta, std::uint64_t seed) {
  glogit::Philox4x32 rng(seed, 1);
  glogit::Dataset d;
  d.X.resize(n, p);
  d.y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j + 1 < p; ++j) d.X(i, j) = rng.normal();
    d.X(i, p - 1) = 1.0;
    const double t = d.X.row(i).dot(beta);
    d.y(i) = rng.uniform() < 1.0 / (1.0 + std::exp(-t)) ? 1 : 0;
  }
  return d;
}

inline Vector random_vector(glogit::Philox4x32& rng, int p, double sd) {
  Vector v(p);
  for (int j = 0; j < p; ++j) v(j) = rng.normal(0.0, sd);
  return v;
}

inline Vector central_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vector a = x, b = x;
    a(j) += h;
    b(j) -= h;
    g(j) = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

inline Matrix central_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double h) {
  const Vector f0 = f(x);
  Matrix J(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vector a = x, b = x;
    a(j) += h;
    b(j) -= h;
    J.col(j) = (f(a) - f(b)) / (2.0 * h);
  }
  return J;
}

// Plain-formula reference values, written independently of the library kernels.
inline double ref_pi(double t) { return 1.0 / (1.0 + std::exp(-t)); }

inline double ref_weight_gamma(int y, double t, double g) {
  const double pg = ref_pi((g + 1.0) * t);
  const double f = y == 1 ? pg : 1.0 - pg;
  return std::pow(f, g / (g + 1.0));
}

inline double ref_weight_alpha(int y, double t, double a) {
  const double p = ref_pi(t);
  return std::pow(y == 1 ? p : 1.0 - p, a);
}

inline double ref_norm(double t, double g) {
  const double p = ref_pi(t);
  return std::pow(std::pow(p, g + 1.0) + std::pow(1.0 - p, g + 1.0), 1.0 / (g + 1.0));
}

}  // namespace testutil
