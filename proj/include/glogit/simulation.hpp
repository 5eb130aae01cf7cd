#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glogit/dataset.hpp"
#include "glogit/model.hpp"
#include "glogit/random.hpp"
#include "glogit/selection.hpp"

namespace glogit {

enum class MislabelSetting { S1, S2, S3, S4 };
std::string to_string(MislabelSetting s);
MislabelSetting mislabel_setting_from_string(const std::string& name);

// eta0(x), eta1(x) generator. S3 uses b0, b1 and S4 uses a; both are redrawn per replicate.
// S4 reads the first three covariates, x(0), x(1), x(2).
struct MislabelMechanism {
  MislabelSetting setting = MislabelSetting::S1;
  double u0 = 0.05;
  double u1 = 0.05;
  Vector b0;
  Vector b1;
  double a = 2.0;

  static MislabelMechanism draw(MislabelSetting setting, double u0, double u1, Eigen::Index p, Philox4x32& rng);
};

void validate(const MislabelMechanism& mech);
MislabelPair eta_functions(const MislabelMechanism& mech, const Vector& x, const Vector& beta0);

struct ContaminatedSample {
  Dataset observed;  // labels Y after flipping
  Labels y0;         // true labels
};

ContaminatedSample generate_contaminated(const Matrix& X, const Vector& beta0, const MislabelMechanism& mech,
                                         Philox4x32& rng);
ContaminatedSample generate_contaminated(const Matrix& X, const Vector& beta0, const MislabelMechanism& mech,
                                         std::uint64_t seed);

double mislabel_rate_tau(const MislabelMechanism& mech, const Vector& beta0, const Matrix& X);
double classification_accuracy(const Vector& beta_hat, const Dataset& clean);

enum class StudyMode { Table1, Selection };
enum class BetaRule { Fixed, RandomNormal };
enum class StudyMethod { Logistic, Gamma, GammaOracle, AlphaOracle, ConstantMislabel, Xi };
constexpr int kStudyMethodCount = 6;
std::string to_string(StudyMethod m);
StudyMethod study_method_from_string(const std::string& name);

// How the nine reference coefficients (0, 1, -1, 1, 0, ...) map onto storage
// where the intercept is the last coordinate.
enum class Table1Indexing { InterceptFirst, CovariateFirst };

struct StudyConfig {
  StudyMode mode = StudyMode::Table1;
  MislabelSetting setting = MislabelSetting::S1;
  double u0 = 0.05;
  std::vector<double> u1_values{0.1};
  int replicates = 500;
  int n = 500;
  Matrix covariates;  // standardized, intercept last
  BetaRule beta_rule = BetaRule::Fixed;
  Table1Indexing indexing = Table1Indexing::InterceptFirst;
  double beta_sd = 2.0;
  double gamma = 2.0;  // Table-1 mode
  std::vector<StudyMethod> methods{StudyMethod::Logistic, StudyMethod::Gamma, StudyMethod::GammaOracle};
  std::vector<double> gamma_grid = default_gamma_grid();
  std::vector<double> alpha_grid = default_gamma_grid();
  double gamma0 = 0.1;
  std::vector<double> eta_grid;
  double xi0 = 0.05;
  double xi1 = 0.05;
  SelectionOptions solver;
  unsigned workers = 1;
};

void validate(const StudyConfig& cfg);
Vector table1_beta(Table1Indexing indexing, Eigen::Index p);
// Position in storage of the k-th reference coefficient.
Eigen::Index table1_storage_index(Table1Indexing indexing, Eigen::Index k, Eigen::Index p);

struct ReplicateRecord {
  int u1_index = 0;
  int replicate = 0;
  double u1 = 0.0;
  double tau = 0.0;
  Vector beta0;
  // Table-1 mode
  Vector beta_hat;
  Vector se;
  bool converged = false;
  // Selection mode; NaN when unavailable
  double gamma_selected;
  double gamma_oracle;
  double alpha_oracle;
  double eta_selected;
  std::vector<double> ca;  // indexed by StudyMethod
};

struct Table1Row {
  std::string label;  // beta_k in reference order
  Eigen::Index storage_index = 0;
  double truth = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
};

struct Table2Row {
  double u1 = 0.0;
  double mean_gamma = 0.0;
  double mean_gamma_oracle = 0.0;
  int valid_gamma = 0;
  int valid_oracle = 0;
};

struct Figure3Row {
  StudyMethod method = StudyMethod::Logistic;
  double u1 = 0.0;
  double tau = 0.0;
  double mean_ca = 0.0;
  double se_ca = 0.0;
  int valid = 0;
};

struct ReplicateReport {
  StudyConfig config;
  std::uint64_t seed = 0;
  std::vector<ReplicateRecord> records;
  std::vector<Table1Row> table1;
  int table1_converged = 0;
  int table1_failed = 0;
  std::vector<Table2Row> table2;
  std::vector<Figure3Row> figure3;
  std::vector<std::string> notes;
};

ReplicateReport run_study(const StudyConfig& config, std::uint64_t seed);

std::string table1_csv(const ReplicateReport& r);
std::string table2_csv(const ReplicateReport& r);
std::string figure3_csv(const ReplicateReport& r);
std::string replicates_csv(const ReplicateReport& r);

}  // namespace glogit
