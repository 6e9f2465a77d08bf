#pragma once

// Flat "key = value" configuration files.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fuzzwatch/dynamics.hpp"
#include "fuzzwatch/ensemble.hpp"
#include "fuzzwatch/readout.hpp"
#include "fuzzwatch/scattering.hpp"

namespace fuzzwatch {

/// Parsed key/value pairs with their line numbers, in file order.
class KeyValueFile {
 public:
  struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
  };

  /// Throws ConfigError on malformed lines or duplicate keys. `source` names the input in messages.
  static KeyValueFile parse(std::istream& in, std::string source = "<input>");
  static KeyValueFile load(const std::filesystem::path& path);

  const std::vector<Entry>& entries() const { return entries_; }
  const std::string& source() const { return source_; }

 private:
  std::vector<Entry> entries_;
  std::string source_;
};

/// Strict number parsing; "inf" accepted. Throws ConfigError naming `key`.
double parse_double(const std::string& key, const std::string& text);
std::uint64_t parse_count(const std::string& key, const std::string& text);

/// Everything an RPI run needs.
struct RunConfig {
  MeasurementConfig measurement;
  ReadoutProcess process = ReadoutProcess::defaults_for(MeasurementConfig{});
  EnsembleOptions ensemble;
  std::size_t n = 10000;
  std::uint64_t seed = 0;
  std::size_t grid_t_bins = 100;
  std::size_t grid_y_bins = 100;

  /// Applies one key; later keys override earlier ones. Throws ConfigError for unknown keys or
  /// bad values. Readout defaults follow the measurement unless set explicitly.
  void set(const std::string& key, const std::string& value);
  /// Throws ConfigError; returns warnings.
  std::vector<std::string> validate() const;
  /// Canonical key = value rendering (round-trips through `set`).
  std::vector<std::pair<std::string, std::string>> describe() const;

  static RunConfig from_file(const KeyValueFile& file);
  static RunConfig load(const std::filesystem::path& path);

 private:
  bool process_mean_set_ = false;
  bool process_stddev_set_ = false;
  bool process_tau_set_ = false;
  bool process_lower_set_ = false;
  bool process_upper_set_ = false;
  bool window_set_ = false;
  enum class Strength { Kappa, Tlr, Ratio };
  Strength strength_kind_ = Strength::Ratio;
  double strength_value_ = 5.0 / 3.0;
  void refresh_defaults();

 public:
  RunConfig();
};

/// SI key/value input to ScatteringSetup (see docs/formats.md for the key list).
ScatteringSetup setup_from_file(const KeyValueFile& file);
ScatteringSetup load_setup(const std::filesystem::path& path);
void set_setup_key(ScatteringSetup& setup, const std::string& key, const std::string& value);

}  // namespace fuzzwatch
