#ifndef FUZZWATCH_H
#define FUZZWATCH_H

/* C interface of libfuzzwatch. All handles are opaque; every fallible call returns an
 * fw_status and leaves a message for fw_last_error() (per thread). */

#include <stddef.h>
#include <stdint.h>

#if defined(FUZZWATCH_BUILDING_LIBRARY)
#define FW_API __attribute__((visibility("default")))
#else
#define FW_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fw_status {
  FW_OK = 0,
  FW_ERR_CONFIG = 1,
  FW_ERR_USAGE = 2,
  FW_ERR_DOMAIN = 3,
  FW_ERR_DEGENERATE = 4,
  FW_ERR_INFINITE_FUZZINESS = 5,
  FW_ERR_INTEGRATION = 6,
  FW_ERR_IO = 7,
  FW_ERR_INTERNAL = 8
} fw_status;

FW_API const char* fw_version(void);
FW_API const char* fw_status_name(fw_status status);
/* Message of the last failed call on this thread; "" if none. */
FW_API const char* fw_last_error(void);

/* Provenance written at the top of every output file. */
typedef struct fw_manifest {
  const char* subcommand;
  const char* const* config_paths;
  size_t config_count;
  uint64_t seed;
  const char* output_directory;
  const char* timestamp;
} fw_manifest;

/* ---- run configuration (dimensionless RPI problem, readout prior, ensemble options) ---- */

typedef struct fw_config fw_config;

FW_API fw_status fw_config_create(fw_config** out);
FW_API fw_status fw_config_load(const char* path, fw_config** out);
FW_API fw_status fw_config_set(fw_config* config, const char* key, const char* value);
/* Canonical value of a key as text. *needed receives the length including the terminator. */
FW_API fw_status fw_config_get(const fw_config* config, const char* key, char* buffer,
                               size_t capacity, size_t* needed);
/* Validates; warnings are written newline separated. */
FW_API fw_status fw_config_validate(const fw_config* config, char* warnings, size_t capacity,
                                    size_t* needed);
FW_API void fw_config_free(fw_config* config);

/* P[E] for one readout sampled on the configuration grid (length = fw_grid_size). */
FW_API fw_status fw_readout_probability(const fw_config* config, const double* readout,
                                        size_t length, double* probability);
FW_API fw_status fw_grid_size(const fw_config* config, size_t* size);

/* ---- scattering setup (SI keys) ---- */

typedef struct fw_setup fw_setup;

FW_API fw_status fw_setup_create(fw_setup** out);
FW_API fw_status fw_setup_load(const char* path, fw_setup** out);
FW_API fw_status fw_setup_set(fw_setup* setup, const char* key, const char* value);
FW_API void fw_setup_free(fw_setup* setup);

/* SI results of the feasibility analysis. */
typedef struct fw_feasibility {
  double d0, delta_d;           /* C m */
  double sigma0, chi;           /* m */
  double beta;                  /* m */
  double gamma;
  double sigma_exact, sigma_approx; /* m */
  double born_ratio;
  double flux;                  /* s^-1 */
  double incoming_rate;         /* g q, s^-1 */
  double level_resolution_time; /* s */
  double flux_times_pulse;
  double flux_discrepancy;
  int born_ok, small_dipole_ok, slit_ok, flux_pulse_ok, lifetime_ok, informative;
} fw_feasibility;

FW_API fw_status fw_feasibility_compute(const fw_setup* setup, fw_feasibility* out);
FW_API fw_status fw_feasibility_format(const fw_setup* setup, char* buffer, size_t capacity,
                                       size_t* needed);

/* Cross sections in the units of beta. */
FW_API fw_status fw_total_cross_section_exact(double beta, double gamma, double* sigma);
FW_API fw_status fw_total_cross_section_approx(double beta, double gamma, double* sigma);

/* ---- RPI ensembles ---- */

typedef struct fw_ensemble fw_ensemble;

typedef struct fw_ensemble_summary {
  double classes[4]; /* E11, E12, E21, E22 */
  double class_errors[4];
  double transition;
  double transition_error;
  double e12_final_p2; /* NaN if the class is empty */
  double e11_final_p2;
  double effective_sample_size;
  double total_weight;
  size_t records;
  size_t resampling_events;
} fw_ensemble_summary;

typedef struct fw_record {
  double weight;
  double probability;
  double log_probability;
  double final_p2;
  int class_code; /* 0 = E11, 1 = E12, 2 = E21, 3 = E22 */
} fw_record;

/* threads = 0 uses FUZZWATCH_THREADS or the hardware concurrency. */
FW_API fw_status fw_ensemble_run(const fw_config* config, uint64_t n, uint64_t seed,
                                 unsigned threads, fw_ensemble** out);
FW_API fw_status fw_ensemble_summarize(const fw_ensemble* ensemble, fw_ensemble_summary* out);
FW_API fw_status fw_ensemble_record(const fw_ensemble* ensemble, size_t index, fw_record* out);
FW_API fw_status fw_ensemble_mean_population(const fw_ensemble* ensemble, double* out,
                                             size_t length);
FW_API fw_status fw_ensemble_write(const fw_ensemble* ensemble, const fw_manifest* manifest,
                                   const char* directory);
FW_API void fw_ensemble_free(fw_ensemble* ensemble);

/* ---- regime scans ---- */

typedef struct fw_scan_row {
  double tlr;
  double tlr_ratio;
  double transition;
  double transition_error;
  double classes[4];
  double class_errors[4];
  double effective_sample_size;
} fw_scan_row;

/* tlr values in units of T_R; INFINITY means no measurement. rows has `count` entries. */
FW_API fw_status fw_scan_run(const fw_config* config, const double* tlr, size_t count,
                             uint64_t n, uint64_t seed, unsigned threads, fw_scan_row* rows);
FW_API fw_status fw_scan_write(const fw_scan_row* rows, size_t count, const fw_manifest* manifest,
                               const char* path);

/* ---- event simulation against the matched RPI ensemble ---- */

typedef struct fw_cross_check fw_cross_check;

typedef struct fw_cross_check_metrics {
  double time_unit_seconds;
  double arrival_rate;
  double sigma0_over_q;
  double event_final_mean_p2;
  double rpi_final_mean_p2;
  double rms;
  double ks;
} fw_cross_check_metrics;

/* Event logs are kept for the first `logged` trajectories. time_unit_seconds <= 0 matches the
 * setup's T_lr to the config's; otherwise the RPI side takes the setup's T_lr in that unit. */
FW_API fw_status fw_cross_check_run(const fw_config* config, const fw_setup* setup, uint64_t n,
                                    uint64_t seed, unsigned threads, size_t logged,
                                    double time_unit_seconds, fw_cross_check** out);
FW_API fw_status fw_cross_check_metrics_get(const fw_cross_check* check,
                                            fw_cross_check_metrics* out);
/* window <= 0 selects T/5. */
FW_API fw_status fw_cross_check_write(const fw_cross_check* check, const fw_manifest* manifest,
                                      const char* directory, double window, uint64_t n_min);
FW_API fw_status fw_cross_check_format(const fw_cross_check* check, char* buffer,
                                       size_t capacity, size_t* needed);
FW_API void fw_cross_check_free(fw_cross_check* check);

#ifdef __cplusplus
}
#endif

#endif
