#pragma once

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vpw/harness/runner.hpp"

namespace vpw::harness {

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct SummaryRow {
  std::vector<std::string> group;
  std::string metric;
  MetricSummary stats;
};

/// Per-group mean and standard error of `metric` over an episode CSV.
/// Groups appear in order of first occurrence; empty metric cells are
/// skipped.
inline std::vector<SummaryRow> summarize(std::istream& in, const std::vector<std::string>& group_by,
                                         const std::string& metric = "total_reward") {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty input: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw SchemaError("unexpected header: " + line);
  const auto header = split_csv_line(line);
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw SchemaError("unknown column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  std::vector<std::size_t> group_cols;
  for (const auto& g : group_by) group_cols.push_back(column(g));
  const std::size_t metric_col = column(metric);

  std::vector<std::vector<std::string>> keys;
  std::map<std::vector<std::string>, std::vector<double>> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw SchemaError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                        " fields, got " + std::to_string(fields.size()));
    }
    std::vector<std::string> key;
    for (std::size_t c : group_cols) key.push_back(fields[c]);
    if (!values.count(key)) keys.push_back(key);
    auto& bucket = values[key];
    const std::string& cell = fields[metric_col];
    if (cell.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0') {
      throw SchemaError("line " + std::to_string(line_no) + ": non-numeric " + metric + " '" + cell + "'");
    }
    bucket.push_back(v);
  }
  std::vector<SummaryRow> out;
  for (const auto& k : keys) out.push_back({k, metric, summarize_values(values[k])});
  return out;
}

inline std::vector<SummaryRow> summarize_file(const std::string& path, const std::vector<std::string>& group_by,
                                              const std::string& metric = "total_reward") {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  return summarize(f, group_by, metric);
}

inline void write_summary_csv(std::ostream& os, const std::vector<std::string>& group_by,
                              const std::vector<SummaryRow>& rows) {
  for (const auto& g : group_by) os << g << ',';
  os << "metric,count,mean,stderr\n";
  for (const auto& r : rows) {
    for (const auto& g : r.group) os << g << ',';
    os << r.metric << ',' << r.stats.n << ',' << (r.stats.n ? fmt(r.stats.mean) : "") << ','
       << (r.stats.stderr_ ? fmt(*r.stats.stderr_) : "") << '\n';
  }
}

/// Same table with space-padded columns.
inline void write_summary_text(std::ostream& os, const std::vector<std::string>& group_by,
                               const std::vector<SummaryRow>& rows) {
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> head = group_by;
  for (const char* h : {"metric", "count", "mean", "stderr"}) head.emplace_back(h);
  table.push_back(head);
  for (const auto& r : rows) {
    std::vector<std::string> line = r.group;
    line.push_back(r.metric);
    line.push_back(std::to_string(r.stats.n));
    line.push_back(r.stats.n ? fmt(r.stats.mean) : "");
    line.push_back(r.stats.stderr_ ? fmt(*r.stats.stderr_) : "");
    table.push_back(std::move(line));
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& line : table) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  for (const auto& line : table) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      os << line[i];
      if (i + 1 < line.size()) os << std::string(width[i] - line[i].size() + 2, ' ');
    }
    os << '\n';
  }
}

}  // namespace vpw::harness
