#pragma once

#include <string>
#include <vector>

#include "spinpair/detection.hpp"
#include "spinpair/inference.hpp"

// Bit-exactly defined file formats: UTF-8, '\n' line endings, %.12g numbers.
// Model curves:   header "x,P0,P1,P2"; measured data: "x,shots,n0,n1,n2".
// Leading '#' comment lines carry the tool version, the x-axis name and the
// resolved configuration as one JSON line.

namespace spinpair {

std::string format_number(double value);  // %.12g

/// Write content to path via a temp file + rename, so readers never observe
/// a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string model_curve_csv(const std::string& x_name, const std::vector<double>& x,
                            const std::vector<OutcomeDistribution>& curve,
                            const std::vector<std::string>& meta_lines);

std::string count_data_csv(const std::string& x_name, const CountData& data,
                           const std::vector<std::string>& meta_lines);

struct ParsedCountData {
  CountData data;
  std::string x_name;  // empty when the file does not declare it
};

ParsedCountData read_count_data_csv(const std::string& path);

}  // namespace spinpair
