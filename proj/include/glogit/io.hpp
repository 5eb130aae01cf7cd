#pragma once

#include <string>
#include <vector>

#include "glogit/dataset.hpp"

namespace glogit {

// Covariates as read from the file, without an intercept column.
struct LoadedData {
  Dataset data;
  std::vector<std::string> covariate_names;
  std::string response_name;
  std::string path;
};

LoadedData load_csv(const std::string& path, const std::string& response_column);
void write_csv(const std::string& path, const Dataset& data, const std::vector<std::string>& covariate_names,
               const std::string& response_name);

struct Standardization {
  std::vector<std::string> names;
  Vector mean;
  Vector sd;  // sample sd, divisor n - 1
};

struct StandardizedData {
  Dataset data;  // standardized covariates with the intercept appended last
  Standardization transform;
};

StandardizedData standardize(const Dataset& raw, const std::vector<std::string>& names = {});
Matrix apply_standardization(const Matrix& raw, const Standardization& tr);
// Coefficients on the raw covariate scale (intercept last) giving the same margins.
Vector back_transform(const Vector& beta_standardized, const Standardization& tr);

std::string bundled_pima_path();
// Rows with a zero in Glucose, BloodPressure, SkinThickness or BMI removed.
LoadedData complete_cases(const LoadedData& pima);

// Standardized bundled Pima covariates with the intercept last.
Matrix pima_design(bool complete_cases_only = false);

std::string format_double(double v);

}  // namespace glogit
