#include "glogit/dataset.hpp"

#include <string>

#include "glogit/error.hpp"

namespace glogit {

void validate(const Dataset& data) {
  if (data.n() == 0) throw ValidationError("dataset is empty");
  if (data.y.size() != data.n())
    throw ValidationError("label count " + std::to_string(data.y.size()) + " does not match row count " +
                          std::to_string(data.n()));
  if (data.n() < data.p())
    throw ValidationError("need at least as many rows as columns (n=" + std::to_string(data.n()) +
                          ", p=" + std::to_string(data.p()) + ")");
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (!data.X.row(i).allFinite()) throw ValidationError("row " + std::to_string(i) + " has a non-finite entry");
    if (data.y(i) != 0 && data.y(i) != 1)
      throw ValidationError("row " + std::to_string(i) + " has label " + std::to_string(data.y(i)));
  }
}

std::optional<Eigen::Index> intercept_column(const Matrix& X) {
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    if ((X.col(j).array() == 1.0).all()) return j;
  return std::nullopt;
}

Dataset make_dataset(Matrix X, Labels y) {
  Dataset d{std::move(X), std::move(y)};
  validate(d);
  return d;
}

}  // namespace glogit
