#include "fuzzwatch/fuzzwatch.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <new>
#include <string>

#include "fuzzwatch/config.hpp"
#include "fuzzwatch/cross_check.hpp"
#include "fuzzwatch/ensemble.hpp"
#include "fuzzwatch/errors.hpp"
#include "fuzzwatch/report.hpp"
#include "fuzzwatch/scattering.hpp"
#include "fuzzwatch/units.hpp"

struct fw_config {
  fuzzwatch::RunConfig run;
};

struct fw_setup {
  fuzzwatch::ScatteringSetup setup;
};

struct fw_ensemble {
  fuzzwatch::EnsembleResult result;
  std::size_t t_bins = 100;
  std::size_t y_bins = 100;
};

struct fw_cross_check {
  fuzzwatch::CrossCheck check;
  std::size_t logged = 0;
};

namespace {

thread_local std::string last_error;

fw_status fail(fw_status status, const char* message) {
  last_error = message;
  return status;
}

template <class F>
fw_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return FW_OK;
  } catch (const fuzzwatch::ConfigError& e) {
    return fail(FW_ERR_CONFIG, e.what());
  } catch (const fuzzwatch::UsageError& e) {
    return fail(FW_ERR_USAGE, e.what());
  } catch (const fuzzwatch::DomainError& e) {
    return fail(FW_ERR_DOMAIN, e.what());
  } catch (const fuzzwatch::DegenerateMeasurementError& e) {
    return fail(FW_ERR_DEGENERATE, e.what());
  } catch (const fuzzwatch::InfiniteFuzzinessError& e) {
    return fail(FW_ERR_INFINITE_FUZZINESS, e.what());
  } catch (const fuzzwatch::IntegrationError& e) {
    return fail(FW_ERR_INTEGRATION, e.what());
  } catch (const fuzzwatch::Error& e) {
    return fail(FW_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FW_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FW_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FW_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw fuzzwatch::UsageError(std::string(what) + " must not be null");
}

void copy_out(const std::string& text, char* buffer, std::size_t capacity, std::size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (buffer == nullptr || capacity == 0) {
    if (needed) return;
    throw fuzzwatch::UsageError("no output buffer");
  }
  const std::size_t n = std::min(capacity - 1, text.size());
  std::memcpy(buffer, text.data(), n);
  buffer[n] = '\0';
  if (n < text.size()) throw fuzzwatch::UsageError("output buffer too small");
}

fuzzwatch::RunManifest to_manifest(const fw_manifest* m) {
  fuzzwatch::RunManifest out;
  out.tool_version = FUZZWATCH_VERSION;
  if (m == nullptr) return out;
  if (m->subcommand) out.subcommand = m->subcommand;
  for (std::size_t i = 0; i < m->config_count; ++i) {
    if (m->config_paths && m->config_paths[i]) out.config_paths.emplace_back(m->config_paths[i]);
  }
  out.seed = m->seed;
  if (m->output_directory) out.output_directory = m->output_directory;
  if (m->timestamp) out.timestamp = m->timestamp;
  return out;
}

void add_config(fuzzwatch::RunManifest& m, const fuzzwatch::RunConfig& run) {
  for (auto& [k, v] : run.describe()) {
    if (k == "n" || k == "seed") continue;
    m.extra.emplace_back("param " + k, v);
  }
}

}  // namespace

extern "C" {

const char* fw_version(void) { return FUZZWATCH_VERSION; }

const char* fw_status_name(fw_status status) {
  switch (status) {
    case FW_OK: return "ok";
    case FW_ERR_CONFIG: return "configuration error";
    case FW_ERR_USAGE: return "usage error";
    case FW_ERR_DOMAIN: return "domain error";
    case FW_ERR_DEGENERATE: return "degenerate measurement";
    case FW_ERR_INFINITE_FUZZINESS: return "infinite fuzziness";
    case FW_ERR_INTEGRATION: return "integration error";
    case FW_ERR_IO: return "i/o error";
    case FW_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* fw_last_error(void) { return last_error.c_str(); }

fw_status fw_config_create(fw_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new fw_config{};
  });
}

fw_status fw_config_load(const char* path, fw_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto cfg = std::make_unique<fw_config>();
    cfg->run = fuzzwatch::RunConfig::load(path);
    *out = cfg.release();
  });
}

fw_status fw_config_set(fw_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    config->run.set(key, value);
  });
}

fw_status fw_config_get(const fw_config* config, const char* key, char* buffer, size_t capacity,
                        size_t* needed) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    for (const auto& [k, v] : config->run.describe()) {
      if (k == key) {
        copy_out(v, buffer, capacity, needed);
        return;
      }
    }
    throw fuzzwatch::ConfigError(std::string("unknown key '") + key + "'");
  });
}

fw_status fw_config_validate(const fw_config* config, char* warnings, size_t capacity, size_t* needed) {
  return guarded([&] {
    require(config, "config");
    std::string text;
    for (const auto& w : config->run.validate()) text += w + "\n";
    if (warnings || needed) copy_out(text, warnings, capacity, needed);
  });
}

void fw_config_free(fw_config* config) { delete config; }

fw_status fw_grid_size(const fw_config* config, size_t* size) {
  return guarded([&] {
    require(config, "config");
    require(size, "size");
    *size = config->run.measurement.grid().size();
  });
}

fw_status fw_readout_probability(const fw_config* config, const double* readout, size_t length,
                                 double* probability) {
  return guarded([&] {
    require(config, "config");
    require(readout, "readout");
    require(probability, "probability");
    const auto& m = config->run.measurement;
    (void)m.validate();
    if (length != m.grid().size()) {
      throw fuzzwatch::UsageError("readout has " + std::to_string(length) + " samples, the grid " +
                                  std::to_string(m.grid().size()));
    }
    fuzzwatch::ReadoutCurve curve{m.grid(), std::vector<double>(readout, readout + length)};
    *probability = fuzzwatch::readout_probability(fuzzwatch::evolve(m, curve));
  });
}

fw_status fw_setup_create(fw_setup** out) {
  return guarded([&] {
    require(out, "out");
    *out = new fw_setup{};
  });
}

fw_status fw_setup_load(const char* path, fw_setup** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto s = std::make_unique<fw_setup>();
    s->setup = fuzzwatch::load_setup(path);
    *out = s.release();
  });
}

fw_status fw_setup_set(fw_setup* setup, const char* key, const char* value) {
  return guarded([&] {
    require(setup, "setup");
    require(key, "key");
    require(value, "value");
    fuzzwatch::set_setup_key(setup->setup, key, value);
  });
}

void fw_setup_free(fw_setup* setup) { delete setup; }

fw_status fw_feasibility_compute(const fw_setup* setup, fw_feasibility* out) {
  return guarded([&] {
    require(setup, "setup");
    require(out, "out");
    namespace u = fuzzwatch::units;
    const auto r = fuzzwatch::feasibility(setup->setup);
    *out = fw_feasibility{};
    out->d0 = u::dipole_cgs_to_si(r.derived.d0);
    out->delta_d = u::dipole_cgs_to_si(r.derived.delta_d);
    out->sigma0 = u::length_cgs_to_si(r.derived.sigma0);
    out->chi = u::length_cgs_to_si(r.derived.chi);
    out->beta = u::length_cgs_to_si(r.at_sigma0.beta);
    out->gamma = r.at_sigma0.gamma;
    out->sigma_exact = u::length_cgs_to_si(r.sigma_exact);
    out->sigma_approx = u::length_cgs_to_si(r.sigma_approx);
    out->born_ratio = r.born_ratio;
    out->flux = r.flux.scattered;
    out->incoming_rate = r.flux.incoming;
    out->level_resolution_time = r.level_resolution;
    out->flux_times_pulse = r.flux_times_pulse;
    out->flux_discrepancy = r.flux_discrepancy;
    out->born_ok = r.born_ok;
    out->small_dipole_ok = r.small_dipole_ok;
    out->slit_ok = r.slit_ok;
    out->flux_pulse_ok = r.flux_pulse_ok;
    out->lifetime_ok = r.lifetime_ok;
    out->informative = r.informative;
  });
}

fw_status fw_feasibility_format(const fw_setup* setup, char* buffer, size_t capacity, size_t* needed) {
  return guarded([&] {
    require(setup, "setup");
    const auto r = fuzzwatch::feasibility(setup->setup);
    copy_out(fuzzwatch::format_feasibility(r, setup->setup), buffer, capacity, needed);
  });
}

fw_status fw_total_cross_section_exact(double beta, double gamma, double* sigma) {
  return guarded([&] {
    require(sigma, "sigma");
    *sigma = fuzzwatch::total_cross_section_exact(beta, gamma);
  });
}

fw_status fw_total_cross_section_approx(double beta, double gamma, double* sigma) {
  return guarded([&] {
    require(sigma, "sigma");
    *sigma = fuzzwatch::total_cross_section_approx(beta, gamma);
  });
}

fw_status fw_ensemble_run(const fw_config* config, uint64_t n, uint64_t seed, unsigned threads,
                          fw_ensemble** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = nullptr;
    (void)config->run.validate();
    auto options = config->run.ensemble;
    options.threads = threads;
    auto e = std::make_unique<fw_ensemble>();
    e->result = fuzzwatch::run_ensemble(config->run.measurement, config->run.process, n, seed, options);
    e->t_bins = config->run.grid_t_bins;
    e->y_bins = config->run.grid_y_bins;
    *out = e.release();
  });
}

fw_status fw_ensemble_summarize(const fw_ensemble* ensemble, fw_ensemble_summary* out) {
  return guarded([&] {
    require(ensemble, "ensemble");
    require(out, "out");
    const auto s = fuzzwatch::summarize(ensemble->result);
    *out = fw_ensemble_summary{};
    for (std::size_t c = 0; c < 4; ++c) {
      out->classes[c] = s.classes[c];
      out->class_errors[c] = s.errors.class_probabilities[c];
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out->transition = s.transition;
    out->transition_error = s.errors.transition;
    out->e12_final_p2 = s.e12_final_p2.value_or(nan);
    out->e11_final_p2 = s.e11_final_p2.value_or(nan);
    out->effective_sample_size = s.effective_sample_size;
    out->total_weight = ensemble->result.total_weight;
    out->records = ensemble->result.records.size();
    out->resampling_events = ensemble->result.resampling_events;
  });
}

fw_status fw_ensemble_record(const fw_ensemble* ensemble, size_t index, fw_record* out) {
  return guarded([&] {
    require(ensemble, "ensemble");
    require(out, "out");
    if (index >= ensemble->result.records.size()) throw fuzzwatch::UsageError("record index out of range");
    const auto& r = ensemble->result.records[index];
    *out = fw_record{r.weight, r.probability, r.log_probability, r.final_p2(), static_cast<int>(r.cls)};
  });
}

fw_status fw_ensemble_mean_population(const fw_ensemble* ensemble, double* out, size_t length) {
  return guarded([&] {
    require(ensemble, "ensemble");
    require(out, "out");
    const auto mean = fuzzwatch::mean_population(ensemble->result);
    if (length != mean.size()) throw fuzzwatch::UsageError("length must equal the grid size");
    std::copy(mean.begin(), mean.end(), out);
  });
}

fw_status fw_ensemble_write(const fw_ensemble* ensemble, const fw_manifest* manifest,
                            const char* directory) {
  return guarded([&] {
    require(ensemble, "ensemble");
    require(directory, "directory");
    auto m = to_manifest(manifest);
    m.extra.emplace_back("records", std::to_string(ensemble->result.records.size()));
    fuzzwatch::RunConfig shown;
    shown.measurement = ensemble->result.config;
    shown.process = ensemble->result.process;
    shown.ensemble = ensemble->result.options;
    shown.grid_t_bins = ensemble->t_bins;
    shown.grid_y_bins = ensemble->y_bins;
    add_config(m, shown);
    fuzzwatch::write_ensemble_outputs(directory, ensemble->result, m, ensemble->t_bins, ensemble->y_bins);
  });
}

void fw_ensemble_free(fw_ensemble* ensemble) { delete ensemble; }

fw_status fw_scan_run(const fw_config* config, const double* tlr, size_t count, uint64_t n,
                      uint64_t seed, unsigned threads, fw_scan_row* rows) {
  return guarded([&] {
    require(config, "config");
    require(tlr, "tlr");
    require(rows, "rows");
    (void)config->run.validate();
    auto options = config->run.ensemble;
    options.threads = threads;
    const double period = config->run.measurement.rabi_period();
    std::vector<double> values;
    for (std::size_t i = 0; i < count; ++i) {
      if (!(tlr[i] > 0.0)) throw fuzzwatch::ConfigError("T_lr values must be positive");
      values.push_back(std::isinf(tlr[i]) ? tlr[i] : tlr[i] * period);
    }
    const auto out = fuzzwatch::regime_scan(config->run.measurement, config->run.process, values, n,
                                            seed, options);
    for (std::size_t i = 0; i < out.size(); ++i) {
      fw_scan_row& r = rows[i];
      r.tlr = std::isinf(out[i].level_resolution_time) ? out[i].level_resolution_time
                                                       : out[i].level_resolution_time / period;
      r.tlr_ratio = out[i].tlr_ratio;
      r.transition = out[i].transition;
      r.transition_error = out[i].transition_error;
      for (std::size_t c = 0; c < 4; ++c) {
        r.classes[c] = out[i].classes[c];
        r.class_errors[c] = out[i].class_errors[c];
      }
      r.effective_sample_size = out[i].effective_sample_size;
    }
  });
}

fw_status fw_scan_write(const fw_scan_row* rows, size_t count, const fw_manifest* manifest,
                        const char* path) {
  return guarded([&] {
    require(rows, "rows");
    require(path, "path");
    std::vector<fuzzwatch::ScanRow> out(count);
    for (std::size_t i = 0; i < count; ++i) {
      out[i].level_resolution_time = rows[i].tlr;
      out[i].tlr_ratio = rows[i].tlr_ratio;
      out[i].transition = rows[i].transition;
      out[i].transition_error = rows[i].transition_error;
      for (std::size_t c = 0; c < 4; ++c) {
        out[i].classes[c] = rows[i].classes[c];
        out[i].class_errors[c] = rows[i].class_errors[c];
      }
      out[i].effective_sample_size = rows[i].effective_sample_size;
    }
    fuzzwatch::write_scan_table(path, out, to_manifest(manifest));
  });
}

fw_status fw_cross_check_run(const fw_config* config, const fw_setup* setup, uint64_t n,
                             uint64_t seed, unsigned threads, size_t logged,
                             double time_unit_seconds, fw_cross_check** out) {
  return guarded([&] {
    require(config, "config");
    require(setup, "setup");
    require(out, "out");
    *out = nullptr;
    (void)config->run.validate();
    (void)setup->setup.validate();
    auto options = config->run.ensemble;
    options.threads = threads;
    auto c = std::make_unique<fw_cross_check>();
    c->check = fuzzwatch::run_cross_check(config->run.measurement, config->run.process, options,
                                          setup->setup, n, seed, logged, time_unit_seconds);
    c->logged = logged;
    *out = c.release();
  });
}

fw_status fw_cross_check_metrics_get(const fw_cross_check* check, fw_cross_check_metrics* out) {
  return guarded([&] {
    require(check, "check");
    require(out, "out");
    const auto& cc = check->check;
    out->time_unit_seconds = cc.time_unit_seconds;
    out->arrival_rate = cc.events.model.arrival_rate;
    out->sigma0_over_q = cc.events.model.sigma0_over_q();
    out->event_final_mean_p2 = cc.event_mean.back();
    out->rpi_final_mean_p2 = cc.rpi_mean.back();
    out->rms = cc.rms;
    out->ks = cc.ks;
  });
}

fw_status fw_cross_check_write(const fw_cross_check* check, const fw_manifest* manifest,
                               const char* directory, double window, uint64_t n_min) {
  return guarded([&] {
    require(check, "check");
    require(directory, "directory");
    const auto& cfg = check->check.rpi.config;
    if (!(window > 0.0)) window = cfg.pulse_duration() / 5.0;
    auto m = to_manifest(manifest);
    m.extra.emplace_back("trajectories", std::to_string(check->check.events.trajectories.size()));
    m.extra.emplace_back("window", fuzzwatch::format_number(window));
    m.extra.emplace_back("n_min", std::to_string(n_min));
    fuzzwatch::write_cross_check_outputs(directory, check->check, m, window, n_min, check->logged);
  });
}

fw_status fw_cross_check_format(const fw_cross_check* check, char* buffer, size_t capacity,
                                size_t* needed) {
  return guarded([&] {
    require(check, "check");
    copy_out(fuzzwatch::format_cross_check(check->check), buffer, capacity, needed);
  });
}

void fw_cross_check_free(fw_cross_check* check) { delete check; }

}  // extern "C"
