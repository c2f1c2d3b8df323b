// Copyright 2026 The dpdirichlet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpdir/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dpdir {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    // Trim surrounding whitespace.
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    out.push_back(begin == std::string::npos
                      ? std::string()
                      : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

IngestResult ingest_csv(const std::string& path,
                        const std::string& group_column, bool drop_zero) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("ingest_csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("ingest_csv: empty file " + path);
  }
  const std::vector<std::string> header = split_line(line);
  std::size_t group_idx = header.size();
  std::vector<std::size_t> value_idx;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (!group_column.empty() && header[j] == group_column) {
      group_idx = j;
    } else {
      value_idx.push_back(j);
    }
  }
  if (!group_column.empty() && group_idx == header.size()) {
    throw std::runtime_error("ingest_csv: group column '" + group_column +
                             "' not found in header");
  }
  if (value_idx.size() < 2) {
    throw std::runtime_error("ingest_csv: need at least 2 component columns");
  }

  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  std::vector<std::size_t> row_lines;
  std::vector<std::size_t> bad_lines;
  std::size_t dropped = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != header.size()) {
      bad_lines.push_back(line_no);
      continue;
    }
    std::vector<double> row(value_idx.size());
    bool ok = true;
    for (std::size_t j = 0; j < value_idx.size(); ++j) {
      if (!parse_double(fields[value_idx[j]], row[j])) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      bad_lines.push_back(line_no);
      continue;
    }
    if (drop_zero) {
      bool has_zero = false;
      for (double v : row) {
        if (v == 0.0) has_zero = true;
      }
      if (has_zero) {
        ++dropped;
        continue;
      }
    }
    rows.push_back(std::move(row));
    row_lines.push_back(line_no);
    if (group_idx < header.size()) labels.push_back(fields[group_idx]);
  }
  if (!bad_lines.empty()) {
    std::ostringstream os;
    os << "ingest_csv: unparseable rows at lines";
    for (std::size_t k = 0; k < bad_lines.size() && k < 20; ++k) {
      os << " " << bad_lines[k];
    }
    if (bad_lines.size() > 20) os << " ... (" << bad_lines.size() << " total)";
    throw std::runtime_error(os.str());
  }
  if (rows.empty()) {
    throw std::runtime_error("ingest_csv: no data rows in " + path);
  }
  IngestResult result;
  try {
    result.data = CompositionalDataset::validate(rows);
  } catch (const std::invalid_argument&) {
    // Re-validate row by row to report the file's line numbers.
    std::vector<std::size_t> offending;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      double sum = 0.0;
      bool pos = true;
      for (double v : rows[k]) {
        if (!(v > 0.0)) pos = false;
        sum += v;
      }
      if (!pos || std::abs(sum - 1.0) > 1e-9) offending.push_back(row_lines[k]);
    }
    std::ostringstream os2;
    os2 << "ingest_csv: invalid rows (non-positive entry or row sum != 1) at "
           "lines";
    for (std::size_t k = 0; k < offending.size() && k < 20; ++k) {
      os2 << " " << offending[k];
    }
    if (offending.size() > 20) {
      os2 << " ... (" << offending.size() << " total)";
    }
    throw std::runtime_error(os2.str());
  }
  result.group_labels = std::move(labels);
  result.dropped_zero_rows = dropped;
  return result;
}

}  // namespace dpdir
