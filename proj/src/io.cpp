#include "fuzzwatch/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "fuzzwatch/errors.hpp"

namespace fuzzwatch {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
  if (cell == "nan" || cell == "NaN") return std::numeric_limits<double>::quiet_NaN();
  if (cell == "inf") return std::numeric_limits<double>::infinity();
  if (cell == "-inf") return -std::numeric_limits<double>::infinity();
  if (cell == "true") return 1.0;
  if (cell == "false") return 0.0;
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || cell.empty()) {
    throw ConfigError("line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
  }
  return v;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
  return std::string(buf, ptr);
}

std::vector<std::string> RunManifest::lines() const {
  std::vector<std::string> out;
  out.push_back("tool: fuzzwatch " + tool_version);
  out.push_back("subcommand: " + subcommand);
  std::string configs;
  for (std::size_t i = 0; i < config_paths.size(); ++i) {
    if (i) configs += ", ";
    configs += config_paths[i];
  }
  out.push_back("config: " + (configs.empty() ? std::string("(defaults)") : configs));
  out.push_back("seed: " + std::to_string(seed));
  out.push_back("output_directory: " + output_directory);
  out.push_back("timestamp: " + timestamp);
  for (const auto& [k, v] : extra) out.push_back(k + ": " + v);
  return out;
}

void write_comment_header(std::ostream& out, const std::vector<std::string>& lines) {
  for (const auto& line : lines) out << "# " << line << '\n';
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ConfigError("CSV has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      table.comments.push_back(trim(line.substr(1)));
      continue;
    }
    auto cells = split(line, ',');
    if (!have_header) {
      table.columns = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.columns.size()) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(table.columns.size()) + " fields, found " +
                        std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_cell(c, line_no));
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw ConfigError("CSV has no header row");
  return table;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  write_comment_header(out, table.comments);
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

void write_matrix_csv(std::ostream& out, const Matrix& m, const std::vector<std::string>& header) {
  write_comment_header(out, header);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) out << (c ? "," : "") << format_number(m(r, c));
    out << '\n';
  }
}

Matrix read_matrix_csv(std::istream& in) {
  Matrix m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (m.rows == 0) m.cols = cells.size();
    if (cells.size() != m.cols) {
      throw ConfigError("line " + std::to_string(line_no) + ": ragged matrix row");
    }
    for (const auto& c : cells) m.data.push_back(parse_cell(c, line_no));
    ++m.rows;
  }
  return m;
}

void write_pgm(std::ostream& out, const Matrix& m, double scale,
               const std::vector<std::string>& header) {
  out << "P5\n";
  for (const auto& line : header) out << "# " << line << '\n';
  out << m.cols << ' ' << m.rows << "\n255\n";
  for (double v : m.data) {
    double x = scale > 0.0 ? 255.0 * v / scale : 0.0;
    x = std::clamp(x, 0.0, 255.0);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(x))));
  }
}

std::ofstream open_output(const std::filesystem::path& path, bool binary) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace fuzzwatch
