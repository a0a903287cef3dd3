// Apache License, Version 2.0, refer to LICENSE.txt

#include "pmgp/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace pmgp {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    // Trim whitespace and CR.
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos
                         ? std::string()
                         : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool parse_double(const std::string& s, double* out) {
  if (s.empty()) return false;
  try {
    std::size_t pos = 0;
    *out = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(*out);
  } catch (...) {
    return false;
  }
}

}  // namespace

Dataset load_dataset(const std::string& path, const LoadSpec& spec,
                     LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open dataset file: " + path);

  LoadReport local_report;
  std::string line;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty())
    throw std::invalid_argument("dataset file has no header row: " + path);

  int label_col = -1;
  std::vector<int> feature_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == spec.label_column) {
      label_col = static_cast<int>(i);
    } else if (std::find(spec.drop_columns.begin(), spec.drop_columns.end(),
                         header[i]) == spec.drop_columns.end()) {
      feature_cols.push_back(static_cast<int>(i));
    }
  }
  if (label_col < 0)
    throw std::invalid_argument("label column '" + spec.label_column +
                                "' not found in " + path);
  if (feature_cols.empty())
    throw std::invalid_argument("no feature columns in " + path);

  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    ++local_report.rows_read;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      ++local_report.rows_rejected;
      continue;
    }

    std::vector<double> row(feature_cols.size());
    bool ok = true;
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      if (!parse_double(fields[static_cast<std::size_t>(feature_cols[j])],
                        &row[j])) {
        ok = false;
        break;
      }
    }

    const std::string& raw_label = fields[static_cast<std::size_t>(label_col)];
    double label = 0.0;
    if (ok) {
      if (spec.glass_rule) {
        double cls = 0.0;
        ok = parse_double(raw_label, &cls);
        if (ok) label = cls <= 4.0 ? 1.0 : -1.0;
      } else if (std::find(spec.positive_labels.begin(),
                           spec.positive_labels.end(),
                           raw_label) != spec.positive_labels.end()) {
        label = 1.0;
      } else if (raw_label.empty()) {
        ok = false;
      } else {
        label = -1.0;
      }
    }

    if (!ok) {
      ++local_report.rows_rejected;
      continue;
    }
    rows.push_back(std::move(row));
    labels.push_back(label);
  }
  if (rows.empty())
    throw std::invalid_argument("no usable rows in " + path);

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = static_cast<Eigen::Index>(feature_cols.size());
  Dataset data;
  data.X.resize(n, d);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j)
      data.X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    data.y[i] = labels[static_cast<std::size_t>(i)];
  }

  data.feature_means = Eigen::VectorXd::Zero(d);
  data.feature_sds = Eigen::VectorXd::Ones(d);
  if (spec.normalize) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double mean = data.X.col(j).mean();
      const double var =
          (data.X.col(j).array() - mean).square().sum() /
          std::max<double>(1.0, static_cast<double>(n - 1));
      double sd = std::sqrt(var);
      if (sd <= 0.0) {
        sd = 1.0;
        local_report.warnings.push_back("constant feature '" +
                                        header[static_cast<std::size_t>(
                                            feature_cols[static_cast<std::size_t>(j)])] +
                                        "': sd fallback 1");
      }
      data.X.col(j) = (data.X.col(j).array() - mean) / sd;
      data.feature_means[j] = mean;
      data.feature_sds[j] = sd;
    }
  }

  data.validate();
  if (report) *report = std::move(local_report);
  return data;
}

Eigen::MatrixXd load_feature_matrix(const std::string& path,
                                    const std::string& label_column,
                                    LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);

  LoadReport local_report;
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty())
    throw std::invalid_argument("file has no header row: " + path);

  std::vector<int> feature_cols;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] != label_column) feature_cols.push_back(static_cast<int>(i));
  if (feature_cols.empty())
    throw std::invalid_argument("no feature columns in " + path);

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    ++local_report.rows_read;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      ++local_report.rows_rejected;
      continue;
    }
    std::vector<double> row(feature_cols.size());
    bool ok = true;
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      if (!parse_double(fields[static_cast<std::size_t>(feature_cols[j])],
                        &row[j])) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      ++local_report.rows_rejected;
      continue;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("no usable rows in " + path);

  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(feature_cols.size()));
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  if (report) *report = std::move(local_report);
  return X;
}

void write_dataset_csv(std::ostream& out, const Dataset& data,
                       std::span<const std::string> comment_lines) {
  for (const std::string& c : comment_lines) out << "# " << c << "\n";
  for (Eigen::Index j = 0; j < data.d(); ++j) out << 'x' << (j + 1) << ',';
  out << "label\n";
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.d(); ++j) out << data.X(i, j) << ',';
    out << static_cast<int>(data.y[i]) << "\n";
  }
}

}  // namespace pmgp
