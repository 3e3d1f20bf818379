#include "cwsradar/result_table.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "cwsradar/common.hpp"

namespace cwsradar {

namespace {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, int line) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InvalidArgument("parse_table: bad number '" + s + "' on line " + std::to_string(line));
  return x;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void ResultTable::add(double x, std::string series, double value,
                      std::optional<double> standard_error) {
  rows.push_back({x, std::move(series), value, standard_error});
}

void ResultTable::note(std::string key, std::string value) {
  metadata.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> ResultTable::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return v;
  return std::nullopt;
}

std::vector<ResultRow> ResultTable::series(const std::string& name) const {
  std::vector<ResultRow> out;
  for (const auto& r : rows)
    if (r.series == name) out.push_back(r);
  return out;
}

void emit_table(const ResultTable& table, std::ostream& out) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : table.rows) {
    if (r.series.find_first_of(",\n\r") != std::string::npos)
      throw InvalidArgument("emit_table: series label '" + r.series + "' contains a separator");
    if (!seen.emplace(format_double(r.x), r.series).second)
      throw InvalidArgument("emit_table: duplicate row for x=" + format_double(r.x) +
                            " series=" + r.series);
  }
  out << "# config_hash=" << table.config_hash << '\n';
  out << "# seed=" << table.seed << '\n';
  for (const auto& [k, v] : table.metadata) {
    if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos)
      throw InvalidArgument("emit_table: metadata key/value '" + k + "' not representable");
    out << "# " << k << '=' << v << '\n';
  }
  out << "x,series,value,stderr\n";
  for (const auto& r : table.rows) {
    out << format_double(r.x) << ',' << r.series << ',' << format_double(r.value) << ',';
    if (r.standard_error) out << format_double(*r.standard_error);
    out << '\n';
  }
}

void emit_table(const ResultTable& table, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("emit_table: cannot open " + path);
  emit_table(table, f);
  if (!f) throw InvalidArgument("emit_table: write failed for " + path);
}

ResultTable parse_table(std::istream& in) {
  ResultTable t;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const auto key = body.substr(0, eq), value = body.substr(eq + 1);
      if (key == "config_hash")
        t.config_hash = value;
      else if (key == "seed")
        t.seed = std::stoull(value);
      else
        t.metadata.emplace_back(key, value);
      continue;
    }
    if (!header) {
      if (line != "x,series,value,stderr")
        throw InvalidArgument("parse_table: unexpected header '" + line + "'");
      header = true;
      continue;
    }
    const auto cells = split_commas(line);
    if (cells.size() != 4)
      throw InvalidArgument("parse_table: expected 4 columns on line " + std::to_string(lineno));
    ResultRow r{parse_double(cells[0], lineno), cells[1], parse_double(cells[2], lineno),
                std::nullopt};
    if (!cells[3].empty()) r.standard_error = parse_double(cells[3], lineno);
    t.rows.push_back(std::move(r));
  }
  if (!header) throw InvalidArgument("parse_table: missing header row");
  return t;
}

ResultTable parse_table_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("parse_table: cannot open " + path);
  return parse_table(f);
}

}  // namespace cwsradar
