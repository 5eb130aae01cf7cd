#include "glogit/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "glogit/error.hpp"

namespace glogit {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  std::string t = s.substr(b, e - b + 1);
  if (t.size() >= 2 && t.front() == '"' && t.back() == '"') t = t.substr(1, t.size() - 2);
  return t;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) {
      out.push_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  out.push_back(trim(cell));
  return out;
}

bool parse_number(const std::string& s, double& v) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size() && std::isfinite(v);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

LoadedData load_csv(const std::string& path, const std::string& response_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string header;
  while (std::getline(in, header) && trim(header).empty()) {
  }
  if (trim(header).empty()) throw ValidationError("'" + path + "': empty file, no header row");
  if (header.size() >= 3 && header.compare(0, 3, "\xEF\xBB\xBF") == 0) header = header.substr(3);
  const std::vector<std::string> cols = split(header);
  std::size_t resp = cols.size();
  for (std::size_t j = 0; j < cols.size(); ++j)
    if (cols[j] == response_column) resp = j;
  if (resp == cols.size())
    throw ValidationError("'" + path + "': response column '" + response_column + "' not found in header");

  LoadedData out;
  out.path = path;
  out.response_name = response_column;
  for (std::size_t j = 0; j < cols.size(); ++j)
    if (j != resp) out.covariate_names.push_back(cols[j]);

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != cols.size())
      throw ValidationError("'" + path + "' line " + std::to_string(line_no) + ": expected " +
                            std::to_string(cols.size()) + " fields, found " + std::to_string(cells.size()));
    std::vector<double> row;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v;
      if (!parse_number(cells[j], v))
        throw ValidationError("'" + path + "' line " + std::to_string(line_no) + ", column '" + cols[j] +
                              "': non-numeric value '" + cells[j] + "'");
      if (j == resp) {
        if (v != 0.0 && v != 1.0)
          throw ValidationError("'" + path + "' line " + std::to_string(line_no) + ": response '" +
                                response_column + "' must be 0 or 1, found '" + cells[j] + "'");
        labels.push_back(static_cast<int>(v));
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("'" + path + "': no data rows");
  out.data.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(out.covariate_names.size()));
  out.data.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      out.data.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    out.data.y(static_cast<Eigen::Index>(i)) = labels[i];
  }
  return out;
}

void write_csv(const std::string& path, const Dataset& data, const std::vector<std::string>& covariate_names,
               const std::string& response_name) {
  if (static_cast<Eigen::Index>(covariate_names.size()) != data.p())
    throw ValidationError("need one name per covariate column");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (const auto& n : covariate_names) out << n << ',';
  out << response_name << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.p(); ++j) out << format_double(data.X(i, j)) << ',';
    out << data.y(i) << '\n';
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

StandardizedData standardize(const Dataset& raw, const std::vector<std::string>& names) {
  const Eigen::Index n = raw.n();
  const Eigen::Index p = raw.p();
  if (n < 2) throw ValidationError("standardization needs at least two rows");
  StandardizedData out;
  out.transform.names = names;
  if (out.transform.names.empty())
    for (Eigen::Index j = 0; j < p; ++j) out.transform.names.push_back("x" + std::to_string(j + 1));
  if (static_cast<Eigen::Index>(out.transform.names.size()) != p)
    throw ValidationError("need one name per covariate column");
  out.transform.mean = raw.X.colwise().mean().transpose();
  out.transform.sd.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double ss = (raw.X.col(j).array() - out.transform.mean(j)).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw ValidationError("column '" + out.transform.names[j] + "' has zero variance");
    out.transform.sd(j) = sd;
  }
  out.data.X = apply_standardization(raw.X, out.transform);
  out.data.y = raw.y;
  return out;
}

Matrix apply_standardization(const Matrix& raw, const Standardization& tr) {
  if (raw.cols() != tr.mean.size()) throw ValidationError("column count does not match the transform");
  Matrix Z(raw.rows(), raw.cols() + 1);
  for (Eigen::Index j = 0; j < raw.cols(); ++j)
    Z.col(j) = (raw.col(j).array() - tr.mean(j)) / tr.sd(j);
  Z.col(raw.cols()).setOnes();
  return Z;
}

Vector back_transform(const Vector& beta, const Standardization& tr) {
  const Eigen::Index p = tr.mean.size();
  if (beta.size() != p + 1) throw ValidationError("coefficient length does not match the transform");
  Vector out(p + 1);
  double icpt = beta(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    out(j) = beta(j) / tr.sd(j);
    icpt -= beta(j) * tr.mean(j) / tr.sd(j);
  }
  out(p) = icpt;
  return out;
}

std::string bundled_pima_path() {
  if (const char* env = std::getenv("GLOGIT_DATA_DIR")) return std::string(env) + "/pima.csv";
  return std::string(GLOGIT_DATA_DIR) + "/pima.csv";
}

LoadedData complete_cases(const LoadedData& pima) {
  const char* required[] = {"Glucose", "BloodPressure", "SkinThickness", "BMI"};
  std::vector<Eigen::Index> cols;
  for (const char* name : required) {
    bool found = false;
    for (std::size_t j = 0; j < pima.covariate_names.size(); ++j)
      if (pima.covariate_names[j] == name) {
        cols.push_back(static_cast<Eigen::Index>(j));
        found = true;
      }
    if (!found) throw ValidationError(std::string("complete-case filter needs column '") + name + "'");
  }
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < pima.data.n(); ++i) {
    bool ok = true;
    for (Eigen::Index j : cols) ok = ok && pima.data.X(i, j) != 0.0;
    if (ok) keep.push_back(i);
  }
  LoadedData out = pima;
  out.data.X.resize(static_cast<Eigen::Index>(keep.size()), pima.data.p());
  out.data.y.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.data.X.row(static_cast<Eigen::Index>(k)) = pima.data.X.row(keep[k]);
    out.data.y(static_cast<Eigen::Index>(k)) = pima.data.y(keep[k]);
  }
  return out;
}

Matrix pima_design(bool complete_cases_only) {
  LoadedData d = load_csv(bundled_pima_path(), "Outcome");
  if (complete_cases_only) d = complete_cases(d);
  return standardize(d.data, d.covariate_names).data.X;
}

}  // namespace glogit
