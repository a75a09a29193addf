#include "spinpair/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spinpair {

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open output file: " + tmp);
    }
    out << content;
    if (!out.flush()) {
      throw std::runtime_error("failed writing output file: " + tmp);
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string model_curve_csv(const std::string& x_name, const std::vector<double>& x,
                            const std::vector<OutcomeDistribution>& curve,
                            const std::vector<std::string>& meta_lines) {
  if (x.size() != curve.size()) {
    throw std::invalid_argument("model_curve_csv: grid and curve lengths differ");
  }
  std::ostringstream out;
  for (const std::string& line : meta_lines) {
    out << "# " << line << "\n";
  }
  out << "# x: " << x_name << "\n";
  out << "x,P0,P1,P2\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << format_number(x[i]) << ',' << format_number(curve[i].p0) << ','
        << format_number(curve[i].p1) << ',' << format_number(curve[i].p2) << "\n";
  }
  return out.str();
}

std::string count_data_csv(const std::string& x_name, const CountData& data,
                           const std::vector<std::string>& meta_lines) {
  data.validate();
  std::ostringstream out;
  for (const std::string& line : meta_lines) {
    out << "# " << line << "\n";
  }
  out << "# x: " << x_name << "\n";
  out << "x,shots,n0,n1,n2\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << format_number(data.x[i]) << ',' << format_number(data.shots[i]) << ','
        << format_number(data.n0[i]) << ',' << format_number(data.n1[i]) << ','
        << format_number(data.n2[i]) << "\n";
  }
  return out.str();
}

ParsedCountData read_count_data_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open data file: " + path);
  }
  ParsedCountData parsed;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (line.front() == '#') {
      const std::string x_tag = "# x: ";
      if (line.rfind(x_tag, 0) == 0) {
        parsed.x_name = line.substr(x_tag.size());
      }
      continue;
    }
    if (!header_seen) {
      if (line != "x,shots,n0,n1,n2") {
        throw std::runtime_error(path + ": expected header \"x,shots,n0,n1,n2\", got \"" +
                                 line + "\"");
      }
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    double values[5];
    std::string cell;
    for (int i = 0; i < 5; ++i) {
      if (!std::getline(row, cell, ',')) {
        throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                 ": expected 5 comma-separated values");
      }
      std::size_t used = 0;
      values[i] = std::stod(cell, &used);
      if (used != cell.size()) {
        throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                 ": bad number \"" + cell + "\"");
      }
    }
    if (std::getline(row, cell, ',')) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected 5 comma-separated values");
    }
    parsed.data.x.push_back(values[0]);
    parsed.data.shots.push_back(values[1]);
    parsed.data.n0.push_back(values[2]);
    parsed.data.n1.push_back(values[3]);
    parsed.data.n2.push_back(values[4]);
  }
  if (!header_seen) {
    throw std::runtime_error(path + ": missing header row");
  }
  parsed.data.validate();
  return parsed;
}

}  // namespace spinpair
