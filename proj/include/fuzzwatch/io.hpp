#pragma once

// Text formats shared by the CLI and the tests: manifest headers, numeric CSV, PGM.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace fuzzwatch {

/// Shortest decimal that parses back to the same double ("%.17g" fallback).
std::string format_number(double x);

/// Provenance of one CLI invocation. Rendered as "# key: value" lines at the top of every file.
struct RunManifest {
  std::string tool_version;
  std::string subcommand;
  std::vector<std::string> config_paths;
  std::uint64_t seed = 0;
  std::string output_directory;
  std::string timestamp;
  /// Extra key/value pairs (prior parameters, sizes, ...), kept in insertion order.
  std::vector<std::pair<std::string, std::string>> extra;

  std::vector<std::string> lines() const;
};

void write_comment_header(std::ostream& out, const std::vector<std::string>& lines);

/// Numeric CSV with a single header row; '#' lines are collected as comments.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a named column; throws ConfigError if absent.
  std::size_t column(const std::string& name) const;
};

/// Throws ConfigError on malformed input. Accepts "nan", "inf", "true"/"false" (as 1/0).
CsvTable read_csv(std::istream& in);
void write_csv(std::ostream& out, const CsvTable& table);

/// Row-major matrix of non-negative values.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Plain CSV matrix, one row per line.
void write_matrix_csv(std::ostream& out, const Matrix& m, const std::vector<std::string>& header);
Matrix read_matrix_csv(std::istream& in);

/// Binary 8-bit PGM (P5); values scaled by `scale` (pixel = round(255 * v / scale)).
/// Header lines are emitted as PGM comments.
void write_pgm(std::ostream& out, const Matrix& m, double scale,
               const std::vector<std::string>& header);

/// Creates parent directories and opens for writing; throws Error on failure.
std::ofstream open_output(const std::filesystem::path& path, bool binary = false);

}  // namespace fuzzwatch
