#include "glogit/selection.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "glogit/error.hpp"

namespace glogit {

std::vector<double> default_gamma_grid() {
  std::vector<double> g;
  for (int k = 5; k <= 25; ++k) g.push_back(k / 10.0);
  return g;
}

double adaptive_criterion(const Dataset& data, const Vector& beta, double gamma0) {
  if (!(gamma0 > 0.0)) throw ValidationError("gamma0 must be positive");
  if (beta.size() != data.p()) throw ValidationError("coefficient length does not match covariates");
  const Vector t = data.X * beta;
  double s = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) s += gamma_norm_margin(t(i), gamma0);
  return s / static_cast<double>(t.size());
}

std::size_t argmax_first(const std::vector<double>& values) {
  std::size_t best = values.size();
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (std::isnan(values[k])) continue;
    if (best == values.size() || values[k] > values[best]) best = k;
  }
  return best;
}

std::vector<FitResult> fit_gamma_grid(const Dataset& data, const std::vector<double>& grid,
                                      const SelectionOptions& opts) {
  if (grid.empty()) throw ValidationError("gamma grid is empty");
  for (double g : grid)
    if (!(g > 0.0)) throw ValidationError("gamma grid values must be positive");
  std::vector<FitResult> fits;
  fits.reserve(grid.size());
  SolverOptions so = opts.solver;
  for (double g : grid) {
    fits.push_back(fit(data, EstimatorSpec::gamma(g), so));
    if (opts.chain_warm_start && fits.back().converged) so.initial = fits.back().beta_hat;
  }
  return fits;
}

SelectionResult select_gamma_adaptive(const Dataset& data, std::vector<FitResult> fits, double gamma0) {
  if (!(gamma0 > 0.0)) throw ValidationError("gamma0 must be positive");
  if (fits.empty()) throw ValidationError("gamma grid is empty");
  SelectionResult res;
  for (const FitResult& f : fits) {
    res.grid.push_back(f.spec.tuning);
    if (f.converged) {
      res.criterion.push_back(adaptive_criterion(data, f.beta_hat, gamma0));
    } else {
      res.criterion.push_back(std::numeric_limits<double>::quiet_NaN());
      std::ostringstream msg;
      msg << "gamma=" << f.spec.tuning << " excluded: fit did not converge (" << to_string(f.status) << ")";
      res.warnings.push_back(msg.str());
    }
  }
  res.chosen_index = argmax_first(res.criterion);
  if (res.chosen_index == res.criterion.size())
    throw ConvergenceError("no gamma on the grid produced a converged fit");
  res.chosen_gamma = res.grid[res.chosen_index];
  res.fits = std::move(fits);
  return res;
}

SelectionResult select_gamma_adaptive(const Dataset& data, const std::vector<double>& grid, double gamma0,
                                      const SelectionOptions& opts) {
  if (!(gamma0 > 0.0)) throw ValidationError("gamma0 must be positive");
  return select_gamma_adaptive(data, fit_gamma_grid(data, grid, opts), gamma0);
}

double oracle_loglik(const Dataset& clean, const Vector& beta) { return log_likelihood(clean, beta); }

OracleChoice select_oracle(const std::vector<FitResult>& fits, const Dataset& clean) {
  if (clean.n() == 0) throw ValidationError("clean dataset is empty");
  if (fits.empty()) throw ValidationError("no fits to choose from");
  OracleChoice oc;
  for (const FitResult& f : fits)
    oc.loglik.push_back(f.converged ? oracle_loglik(clean, f.beta_hat) : std::numeric_limits<double>::quiet_NaN());
  oc.index = argmax_first(oc.loglik);
  if (oc.index == oc.loglik.size()) throw ConvergenceError("no converged fit to choose from");
  oc.tuning = fits[oc.index].spec.tuning;
  return oc;
}

double select_gamma_oracle(const std::vector<FitResult>& fits, const Dataset& clean) {
  return select_oracle(fits, clean).tuning;
}

}  // namespace glogit
