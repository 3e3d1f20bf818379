#pragma once

// CSV result tables: `x,series,value,stderr` rows preceded by `# key=value`
// comment lines (config_hash and seed first).

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace cwsradar {

struct ResultRow {
  double x;
  std::string series;
  double value;
  std::optional<double> standard_error;  // Monte Carlo rows only

  bool operator==(const ResultRow&) const = default;
};

struct ResultTable {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> metadata;  // emitted in order
  std::vector<ResultRow> rows;

  void add(double x, std::string series, double value,
           std::optional<double> standard_error = std::nullopt);
  void note(std::string key, std::string value);
  std::optional<std::string> meta(const std::string& key) const;
  /// Rows of one series in insertion order.
  std::vector<ResultRow> series(const std::string& name) const;
};

/// Throws InvalidArgument on a duplicate (x, series) pair or a series label
/// containing a comma or newline.
void emit_table(const ResultTable& table, std::ostream& out);
void emit_table(const ResultTable& table, const std::string& path);

ResultTable parse_table(std::istream& in);
ResultTable parse_table_file(const std::string& path);

}  // namespace cwsradar
