// fuzzwatch command-line tool. Talks to the library through the C interface only.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fuzzwatch/fuzzwatch.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct Failure {
  int code;
};

int exit_code_for(fw_status status) {
  switch (status) {
    case FW_OK: return kExitOk;
    case FW_ERR_CONFIG:
    case FW_ERR_USAGE:
    case FW_ERR_DOMAIN:
    case FW_ERR_DEGENERATE:
    case FW_ERR_INFINITE_FUZZINESS: return kExitConfig;
    default: return kExitRuntime;
  }
}

void check(fw_status status, const std::string& context) {
  if (status == FW_OK) return;
  std::cerr << "fuzzwatch: " << context << ": " << fw_status_name(status) << ": " << fw_last_error()
            << "\n";
  throw Failure{exit_code_for(status)};
}

template <class F>
std::string fetch_text(F&& call, const std::string& context) {
  std::size_t needed = 0;
  check(call(nullptr, 0, &needed), context);
  std::string text(needed, '\0');
  check(call(text.data(), text.size(), &needed), context);
  text.resize(needed > 0 ? needed - 1 : 0);
  return text;
}

struct ConfigDeleter {
  void operator()(fw_config* c) const { fw_config_free(c); }
};
struct SetupDeleter {
  void operator()(fw_setup* s) const { fw_setup_free(s); }
};
struct EnsembleDeleter {
  void operator()(fw_ensemble* e) const { fw_ensemble_free(e); }
};
struct CrossCheckDeleter {
  void operator()(fw_cross_check* c) const { fw_cross_check_free(c); }
};
using ConfigPtr = std::unique_ptr<fw_config, ConfigDeleter>;
using SetupPtr = std::unique_ptr<fw_setup, SetupDeleter>;
using EnsemblePtr = std::unique_ptr<fw_ensemble, EnsembleDeleter>;
using CrossCheckPtr = std::unique_ptr<fw_cross_check, CrossCheckDeleter>;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> n;
  unsigned threads = 0;
  std::string out = "fuzzwatch-out";
  std::string timestamp;
  std::vector<std::string> overrides;
  std::vector<std::string> setup_overrides;
};

std::string utc_timestamp(const Globals& g) {
  if (!g.timestamp.empty()) return g.timestamp;
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    try {
      t = static_cast<std::time_t>(std::stoll(epoch));
    } catch (const std::exception&) {
      std::cerr << "fuzzwatch: ignoring malformed SOURCE_DATE_EPOCH\n";
    }
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t parse_u64(const std::string& text, const char* what) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(text, &pos);
    if (pos == text.size() && text.find('-') == std::string::npos) return v;
  } catch (const std::exception&) {
  }
  std::cerr << "fuzzwatch: " << what << " is not an unsigned integer: '" << text << "'\n";
  throw Failure{kExitConfig};
}

std::pair<std::string, std::string> split_override(const std::string& item, const char* option) {
  const auto eq = item.find('=');
  if (eq == std::string::npos) {
    std::cerr << "fuzzwatch: " << option << " expects key=value, got '" << item << "'\n";
    throw Failure{kExitConfig};
  }
  return {item.substr(0, eq), item.substr(eq + 1)};
}

ConfigPtr load_config(const std::string& path, const Globals& g) {
  fw_config* raw = nullptr;
  check(fw_config_load(path.c_str(), &raw), "loading " + path);
  ConfigPtr config(raw);
  for (const auto& item : g.overrides) {
    const auto [key, value] = split_override(item, "--set");
    check(fw_config_set(config.get(), key.c_str(), value.c_str()), "--set " + key);
  }
  if (g.seed) check(fw_config_set(config.get(), "seed", std::to_string(*g.seed).c_str()), "--seed");
  if (g.n) check(fw_config_set(config.get(), "n", std::to_string(*g.n).c_str()), "--n");
  const std::string warnings = fetch_text(
      [&](char* b, std::size_t c, std::size_t* n) { return fw_config_validate(config.get(), b, c, n); },
      path);
  if (!warnings.empty()) std::cerr << warnings;
  return config;
}

SetupPtr load_setup(const std::string& path, const Globals& g) {
  fw_setup* raw = nullptr;
  check(fw_setup_load(path.c_str(), &raw), "loading " + path);
  SetupPtr setup(raw);
  for (const auto& item : g.setup_overrides) {
    const auto [key, value] = split_override(item, "--set-setup");
    check(fw_setup_set(setup.get(), key.c_str(), value.c_str()), "--set-setup " + key);
  }
  return setup;
}

std::uint64_t config_count(const fw_config* config, const char* key) {
  const std::string text = fetch_text(
      [&](char* b, std::size_t c, std::size_t* n) { return fw_config_get(config, key, b, c, n); }, key);
  return parse_u64(text, key);
}

struct Manifest {
  std::string subcommand;
  std::vector<std::string> paths;
  std::vector<const char*> path_ptrs;
  std::string out;
  std::string timestamp;
  fw_manifest raw{};

  Manifest(std::string sub, std::vector<std::string> config_paths, std::uint64_t seed,
           std::string directory, std::string stamp)
      : subcommand(std::move(sub)), paths(std::move(config_paths)), out(std::move(directory)),
        timestamp(std::move(stamp)) {
    for (const auto& p : paths) path_ptrs.push_back(p.c_str());
    raw.subcommand = subcommand.c_str();
    raw.config_paths = path_ptrs.data();
    raw.config_count = path_ptrs.size();
    raw.seed = seed;
    raw.output_directory = out.c_str();
    raw.timestamp = timestamp.c_str();
  }
  Manifest(const Manifest&) = delete;
  Manifest& operator=(const Manifest&) = delete;
};

void print_summary(const fw_ensemble_summary& s) {
  static const char* names[4] = {"E11", "E12", "E21", "E22"};
  std::printf("records: %zu\n", s.records);
  std::printf("effective_sample_size: %.6g\n", s.effective_sample_size);
  for (int c = 0; c < 4; ++c) {
    std::printf("P(%s): %.6f +- %.6f\n", names[c], s.classes[c], s.class_errors[c]);
  }
  std::printf("transition: %.6f +- %.6f\n", s.transition, s.transition_error);
  std::printf("E[final P2 | E12]: %.6f\n", s.e12_final_p2);
  std::printf("E[final P2 | E11]: %.6f\n", s.e11_final_p2);
}

int cmd_ensemble(const Globals& g, const std::string& config_path) {
  auto config = load_config(config_path, g);
  const std::uint64_t n = config_count(config.get(), "n");
  const std::uint64_t seed = config_count(config.get(), "seed");
  fw_ensemble* raw = nullptr;
  check(fw_ensemble_run(config.get(), n, seed, g.threads, &raw), "ensemble");
  EnsemblePtr ensemble(raw);
  Manifest m("ensemble", {config_path}, seed, g.out, utc_timestamp(g));
  check(fw_ensemble_write(ensemble.get(), &m.raw, g.out.c_str()), "writing " + g.out);
  fw_ensemble_summary s{};
  check(fw_ensemble_summarize(ensemble.get(), &s), "summary");
  print_summary(s);
  return kExitOk;
}

int cmd_scan(const Globals& g, const std::string& config_path, const std::vector<std::string>& list) {
  std::vector<double> tlr;
  for (const auto& item : list) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      tlr.push_back(v);
    } catch (const std::exception&) {
      std::cerr << "fuzzwatch: --tlr-list entry is not a number: '" << item << "'\n";
      return kExitConfig;
    }
  }
  if (tlr.size() < 2) {
    std::cerr << "fuzzwatch: --tlr-list needs at least two values\n";
    return kExitConfig;
  }
  auto config = load_config(config_path, g);
  const std::uint64_t n = config_count(config.get(), "n");
  const std::uint64_t seed = config_count(config.get(), "seed");
  std::vector<fw_scan_row> rows(tlr.size());
  check(fw_scan_run(config.get(), tlr.data(), tlr.size(), n, seed, g.threads, rows.data()), "scan");
  Manifest m("scan", {config_path}, seed, g.out, utc_timestamp(g));
  const std::string path = (std::filesystem::path(g.out) / "scan.csv").string();
  check(fw_scan_write(rows.data(), rows.size(), &m.raw, path.c_str()), "writing " + path);
  std::printf("tlr,tlr_ratio,transition,transition_err\n");
  for (const auto& r : rows) {
    std::printf("%.6g,%.6g,%.6f,%.6f\n", r.tlr, r.tlr_ratio, r.transition, r.transition_error);
  }
  return kExitOk;
}

int cmd_feasibility(const Globals& g, const std::string& setup_path, bool write_file) {
  if (!g.overrides.empty()) {
    std::cerr << "fuzzwatch: feasibility reads no run config; use --set-setup for setup keys\n";
    return kExitConfig;
  }
  auto setup = load_setup(setup_path, g);
  const std::string report = fetch_text(
      [&](char* b, std::size_t c, std::size_t* n) { return fw_feasibility_format(setup.get(), b, c, n); },
      "feasibility");
  std::cout << report;
  if (write_file) {
    const std::filesystem::path dir(g.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::FILE* f = std::fopen((dir / "feasibility.txt").c_str(), "wb");
    if (!f) {
      std::cerr << "fuzzwatch: cannot write " << (dir / "feasibility.txt") << "\n";
      return kExitRuntime;
    }
    std::fprintf(f, "# tool: fuzzwatch %s\n# subcommand: feasibility\n# config: %s\n# timestamp: %s\n",
                 fw_version(), setup_path.c_str(), utc_timestamp(g).c_str());
    std::fwrite(report.data(), 1, report.size(), f);
    std::fclose(f);
  }
  return kExitOk;
}

struct EventOptions {
  double window = 0.0;
  std::optional<std::size_t> logged;
  std::uint64_t n_min = 20;
  double time_unit = 0.0;
  double rms_max = 0.05;
  double ks_max = 0.1;
};

int run_events(const Globals& g, const std::string& subcommand, const std::string& config_path,
               const std::string& setup_path, const EventOptions& o, bool enforce) {
  auto config = load_config(config_path, g);
  auto setup = load_setup(setup_path, g);
  const std::uint64_t n = config_count(config.get(), "n");
  const std::uint64_t seed = config_count(config.get(), "seed");
  fw_cross_check* raw = nullptr;
  const std::size_t logged = o.logged.value_or(enforce ? 0 : 1);
  check(fw_cross_check_run(config.get(), setup.get(), n, seed, g.threads, logged, o.time_unit, &raw),
        subcommand);
  CrossCheckPtr cc(raw);
  Manifest m(subcommand, {config_path, setup_path}, seed, g.out, utc_timestamp(g));
  check(fw_cross_check_write(cc.get(), &m.raw, g.out.c_str(), o.window, o.n_min), "writing " + g.out);
  std::cout << fetch_text(
      [&](char* b, std::size_t c, std::size_t* k) { return fw_cross_check_format(cc.get(), b, c, k); },
      subcommand);
  if (!enforce) return kExitOk;
  fw_cross_check_metrics metrics{};
  check(fw_cross_check_metrics_get(cc.get(), &metrics), subcommand);
  const bool rms_ok = metrics.rms < o.rms_max;
  const bool ks_ok = metrics.ks < o.ks_max;
  std::printf("rms_check: %s (%.6g < %.6g)\n", rms_ok ? "pass" : "FAIL", metrics.rms, o.rms_max);
  std::printf("ks_check: %s (%.6g < %.6g)\n", ks_ok ? "pass" : "FAIL", metrics.ks, o.ks_max);
  return rms_ok && ks_ok ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy continuous measurement of a two-level atom: RPI ensembles, scattering "
               "estimates and event simulation."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("fuzzwatch ") + fw_version());

  Globals g;
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
  auto* n_opt = app.add_option("--n", n, "Ensemble size (overrides the config)");
  app.add_option("--threads", g.threads, "Worker threads; 0 uses FUZZWATCH_THREADS or all cores");
  auto* out_opt = app.add_option("--out", g.out, "Output directory");
  app.add_option("--timestamp", g.timestamp,
                 "Manifest timestamp (default: SOURCE_DATE_EPOCH, else current UTC time)");
  app.add_option("--set", g.overrides, "Override a run-config key, key=value (repeatable)");
  app.add_option("--set-setup", g.setup_overrides,
                 "Override a scattering-setup key, key=value in SI (repeatable)");
  app.fallthrough();

  std::string config_path, setup_path;
  std::vector<std::string> tlr_list;
  EventOptions events;

  auto* ensemble = app.add_subcommand("ensemble", "RPI ensemble, class probabilities and density grids");
  ensemble->add_option("config", config_path, "Run config")->required()->check(CLI::ExistingFile);

  auto* scan = app.add_subcommand("scan", "Transition and class probabilities over T_lr values");
  scan->add_option("config", config_path, "Run config")->required()->check(CLI::ExistingFile);
  scan->add_option("--tlr-list", tlr_list, "T_lr values in units of T_R ('inf' for no measurement)")
      ->required()
      ->delimiter(',');

  auto* feasibility = app.add_subcommand("feasibility", "Scattering estimates and validity checks");
  feasibility->add_option("setup", setup_path, "Scattering setup")->required()->check(CLI::ExistingFile);

  auto add_event_options = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "Run config")->required()->check(CLI::ExistingFile);
    sub->add_option("setup", setup_path, "Scattering setup")->required()->check(CLI::ExistingFile);
    sub->add_option("--window", events.window, "Reconstruction window W (default T/5)");
    sub->add_option("--logged", events.logged,
                    "Trajectories with full event logs (event-sim: 1, cross-check: 0)");
    sub->add_option("--n-min", events.n_min, "Minimum arrivals per valid window");
    sub->add_option("--time-unit", events.time_unit,
                    "Seconds per dynamics time unit (default: matched T_lr)");
  };
  auto* event_sim = app.add_subcommand("event-sim", "Event-by-event simulation with reconstruction");
  add_event_options(event_sim);
  auto* cross = app.add_subcommand("cross-check", "Event simulation against the matched RPI ensemble");
  add_event_options(cross);
  cross->add_option("--rms-max", events.rms_max, "Largest accepted RMS of mean P2(t)");
  cross->add_option("--ks-max", events.ks_max, "Largest accepted KS distance of final P2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (*seed_opt) g.seed = seed;
  if (*n_opt) g.n = n;

  try {
    if (*ensemble) return cmd_ensemble(g, config_path);
    if (*scan) return cmd_scan(g, config_path, tlr_list);
    if (*feasibility) return cmd_feasibility(g, setup_path, out_opt->count() > 0);
    if (*event_sim) return run_events(g, "event-sim", config_path, setup_path, events, false);
    if (*cross) return run_events(g, "cross-check", config_path, setup_path, events, true);
  } catch (const Failure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "fuzzwatch: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
