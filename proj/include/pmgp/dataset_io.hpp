// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pmgp/model.hpp"

namespace pmgp {

/// How to turn a CSV file into a Dataset. Every column other than the label
/// column is a feature. Raw label values listed in positive_labels map to +1
/// and the rest to -1; glass_rule instead maps numeric classes 1-4 to +1
/// (window glass) and 5-7 to -1.
struct LoadSpec {
  std::string label_column = "label";
  std::vector<std::string> positive_labels = {"1", "+1", "1.0"};
  bool glass_rule = false;
  bool normalize = true;  // zero mean, unit sd per feature
  std::vector<std::string> drop_columns;  // e.g. row ids
};

struct LoadReport {
  std::size_t rows_read = 0;
  std::size_t rows_rejected = 0;  // missing or non-numeric values
  std::vector<std::string> warnings;
};

/// Loads a header-row CSV. Rows with missing values are rejected and
/// reported; constant features get sd fallback 1 with a warning.
Dataset load_dataset(const std::string& path, const LoadSpec& spec,
                     LoadReport* report = nullptr);

/// Writes a dataset as CSV (x1..xd, label), preceded by '#' comment lines.
void write_dataset_csv(std::ostream& out, const Dataset& data,
                       std::span<const std::string> comment_lines);

/// Reads the numeric feature columns of a header-row CSV, dropping
/// `label_column` if present. No normalization; rows with missing values are
/// rejected.
Eigen::MatrixXd load_feature_matrix(const std::string& path,
                                    const std::string& label_column,
                                    LoadReport* report = nullptr);

}  // namespace pmgp
