#pragma once

#include <string>
#include <vector>

#include "glogit/dataset.hpp"
#include "glogit/estimators.hpp"

namespace glogit {

struct SelectionOptions {
  SolverOptions solver;
  // Start each grid fit from the previous grid fit instead of the MLE.
  bool chain_warm_start = false;
};

struct SelectionResult {
  std::vector<double> grid;
  std::vector<double> criterion;  // NaN where the fit was excluded
  double chosen_gamma = 0.0;
  std::size_t chosen_index = 0;
  std::vector<FitResult> fits;
  std::vector<std::string> warnings;
};

std::vector<double> default_gamma_grid();

// Mean of the gamma0-norm of the fitted pmf.
double adaptive_criterion(const Dataset& data, const Vector& beta, double gamma0);

// Argmax with ties going to the earliest entry; NaN entries are skipped.
std::size_t argmax_first(const std::vector<double>& values);

std::vector<FitResult> fit_gamma_grid(const Dataset& data, const std::vector<double>& grid,
                                      const SelectionOptions& opts = {});

SelectionResult select_gamma_adaptive(const Dataset& data, const std::vector<double>& grid, double gamma0 = 0.1,
                                      const SelectionOptions& opts = {});

// Same rule on already computed fits.
SelectionResult select_gamma_adaptive(const Dataset& data, std::vector<FitResult> fits, double gamma0);

// Mean clean log-likelihood of beta.
double oracle_loglik(const Dataset& clean, const Vector& beta);

struct OracleChoice {
  double tuning = 0.0;
  std::size_t index = 0;
  std::vector<double> loglik;
};

// Picks the tuning value whose fit has the largest clean-data likelihood; works
// for any estimator family. Non-converged fits are skipped.
OracleChoice select_oracle(const std::vector<FitResult>& fits, const Dataset& clean);
double select_gamma_oracle(const std::vector<FitResult>& fits, const Dataset& clean);

}  // namespace glogit
