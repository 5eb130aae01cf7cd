#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glogit/model.hpp"

namespace glogit {

using Labels = Eigen::VectorXi;

struct Dataset {
  Matrix X;  // n x p, intercept column included by the caller
  Labels y;  // 0/1

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

// Throws ValidationError if the dataset violates n >= p, finiteness or binary labels.
void validate(const Dataset& data);

// Index of the first column whose entries are all exactly 1.
std::optional<Eigen::Index> intercept_column(const Matrix& X);

Dataset make_dataset(Matrix X, Labels y);

}  // namespace glogit
