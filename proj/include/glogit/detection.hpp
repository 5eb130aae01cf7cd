#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "glogit/dataset.hpp"
#include "glogit/estimators.hpp"

namespace glogit {

struct PvReport {
  Vector pv;
  int b_prime = 0;
  double threshold = 0.01;
  Labels flags;  // 1 where pv < threshold
  std::uint64_t seed = 0;
  Vector observed_weights;
};

// Share of draws that do not exceed the observed weight.
double pvalue_from_draws(double observed, const Vector& draws);

PvReport bootstrap_pvalues(const Dataset& data, const FitResult& fit, int b_prime, std::uint64_t seed,
                           double threshold = 0.01, unsigned workers = 1);

Labels flags_from_pvalues(const Vector& pv, double threshold);

Dataset flip_labels(const Dataset& data, const PvReport& report);
Dataset flip_labels(const Dataset& data, const Labels& flags);

// Area under the ROC curve of scores against 0/1 labels, ties counted 0.5.
double auc(const Vector& scores, const Labels& labels);

struct DriverGroup {
  int group = 0;
  bool analyzed = false;
  std::string notice;
  Vector coefficients;
  double auc = 0.0;
  Eigen::Index size = 0;
  Eigen::Index flagged = 0;
  bool separation = false;
};

// Within each corrected-label group, logistic regression of the flag on the covariates.
std::array<DriverGroup, 2> driver_analysis(const Dataset& data, const PvReport& report);

}  // namespace glogit
