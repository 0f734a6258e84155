/* SPDX-License-Identifier: Apache-2.0
 *
 * wdmopt public C API.
 *
 * A multi-span WDM link simulator and launch-power optimizer: a synthetic
 * EDFA characterization bench, data-driven gain/NF surrogates, an SRS + GN
 * fiber model, and gradient optimization of the per-channel input powers.
 *
 * All functions return WDM_OK on success; on failure they return a status
 * code and leave a human-readable message in wdm_last_error() (thread-local).
 * Objects are opaque handles owned by the caller and released with the
 * matching _free function. Handles are immutable after creation and safe to
 * share across threads.
 */
#ifndef WDMOPT_WDMOPT_H
#define WDMOPT_WDMOPT_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wdm_status {
  WDM_OK = 0,
  WDM_ERR_INVALID_ARGUMENT = 1,
  WDM_ERR_IO = 2,
  WDM_ERR_PARSE = 3,
  WDM_ERR_DOMAIN = 4,
  WDM_ERR_INFEASIBLE = 5,
  WDM_ERR_DIVERGED = 6,
  WDM_ERR_INTERNAL = 7
} wdm_status;

const char* wdm_version(void);
const char* wdm_status_name(wdm_status status);
/* Message from the most recent failing call on this thread. */
const char* wdm_last_error(void);

typedef struct wdm_oracle wdm_oracle;
typedef struct wdm_model wdm_model;
typedef struct wdm_link wdm_link;

/* ------------------------------------------------------------------ oracle */

wdm_status wdm_oracle_load(const char* path, wdm_oracle** out);
void wdm_oracle_free(wdm_oracle* oracle);
wdm_status wdm_oracle_channels(const wdm_oracle* oracle, int* out);
wdm_status wdm_oracle_save(const wdm_oracle* oracle, const char* path);
/* New unit of the same make: spectra scaled by smooth random fields bounded
 * by +/- magnitude relative (magnitude in [0, 0.2]). */
wdm_status wdm_oracle_perturb(const wdm_oracle* oracle, uint64_t seed, double magnitude,
                              wdm_oracle** out);
/* Gain and NF (dB, per channel) for an input profile in dBm at the requested
 * total output power. Arrays hold `channels` entries. */
wdm_status wdm_oracle_response(const wdm_oracle* oracle, const double* input_dbm, int channels,
                               double target_output_dbm, double* gain_db, double* nf_db);

typedef struct wdm_dataset_opts {
  int profiles;
  uint64_t seed;
  double excursion_max_db;
  double tilt_max_db;
} wdm_dataset_opts;
void wdm_dataset_opts_init(wdm_dataset_opts* opts);

/* Characterization sweep (profiles x total input -9..9 dBm x total output
 * 15..18 dBm) written as a dataset file. */
wdm_status wdm_generate_dataset(const wdm_oracle* oracle, const wdm_dataset_opts* opts,
                                const char* out_path, int* n_samples, int* n_skipped);

/* ---------------------------------------------------------------- training */

typedef struct wdm_train_opts {
  int hidden_dim;
  int max_epochs;
  int batch_size;
  double learning_rate;
  int plateau_epochs;
  uint64_t seed;
} wdm_train_opts;
void wdm_train_opts_init(wdm_train_opts* opts);

/* kind is "gain" or "nf". */
wdm_status wdm_train(const char* dataset_path, const char* kind, const wdm_train_opts* opts,
                     const char* model_out_path, double* best_validation_mse, int* best_epoch);

wdm_status wdm_model_load(const char* path, wdm_model** out);
void wdm_model_free(wdm_model* model);
wdm_status wdm_model_channels(const wdm_model* model, int* out);
/* Network output for a peak-normalized input spectrum (dB, max entry 0):
 * per-channel gain in dB for gain models, NF in dB for NF models.
 * envelope_warning is set to 1 when the query extrapolates beyond the
 * training envelope. */
wdm_status wdm_model_predict(const wdm_model* model, const double* input_normalized_db,
                             int channels, double total_in_dbm, double total_out_dbm, double* out,
                             int* envelope_warning);
/* Writes <prefix>_mse_gav.csv, <prefix>_mse_pout.csv, <prefix>_mse_channel.csv
 * and <prefix>_mae_hist.csv; label tags the rows (e.g. intra/inter). */
wdm_status wdm_model_evaluate(const wdm_model* model, const char* dataset_path, const char* label,
                              const char* out_csv_prefix, double* overall_mse);

/* Exact amplifier-noise conversions (h = 6.62607015e-34 J s). */
wdm_status wdm_nf_from_ase(double rho_ase_w_hz, double gain_linear, double frequency_thz,
                           double* nf_linear);
wdm_status wdm_ase_from_nf(double nf_linear, double gain_linear, double frequency_thz,
                           double* rho_ase_w_hz);

/* -------------------------------------------------------------------- link */

wdm_status wdm_link_load(const char* path, wdm_link** out);
void wdm_link_free(wdm_link* link);
wdm_status wdm_link_channels(const wdm_link* link, int* out);
wdm_status wdm_link_frequencies_thz(const wdm_link* link, double* out);
wdm_status wdm_link_spans(const wdm_link* link, int* out);

/* Reads/writes profile files (rows of frequency_THz value) on the link grid. */
wdm_status wdm_link_read_spectrum(const wdm_link* link, const char* path, double* out_dbm);
wdm_status wdm_link_write_spectrum(const wdm_link* link, const char* path,
                                   const double* values_dbm);

/* End-to-end prediction. input_dbm may be NULL for a flat profile at the
 * configured total input power; every output array may be NULL when not
 * wanted. */
wdm_status wdm_link_simulate(const wdm_link* link, const double* input_dbm, double* received_dbm,
                             double* ase_w, double* nli_w, double* snr_db,
                             int* envelope_warnings);
wdm_status wdm_link_simulate_csv(const wdm_link* link, const double* input_dbm,
                                 const char* out_csv);

typedef struct wdm_optimize_opts {
  const char* strategy; /* flat-input-reference | flat-received-power |
                           flat-snr-linear | flat-snr-full */
  const char* cost;     /* NULL = strategy default; min-snr | throughput | psd-flatness */
  int iterations;
  double learning_rate;
  double softmin_beta;
  uint64_t seed;
} wdm_optimize_opts;
void wdm_optimize_opts_init(wdm_optimize_opts* opts);

wdm_status wdm_link_optimize(const wdm_link* link, const wdm_optimize_opts* opts,
                             double* profile_dbm, double* min_snr_db, double* excursion_db,
                             int* converged, const char* trace_csv);

/* Re-optimizes at each launch power (per-span EDFA target output); strategies
 * is a comma-separated list. */
wdm_status wdm_link_sweep_power(const wdm_link* link, const double* powers_dbm, int n_powers,
                                const char* strategies, const wdm_optimize_opts* opts,
                                const char* out_csv);

/* ----------------------------------------------------------------- network */

typedef struct wdm_network_opts {
  const char* strategies; /* comma-separated */
  const char* gff_modes;  /* comma-separated: none,ideal */
  double launch_power_dbm;
  int iterations;
  double learning_rate;
  double softmin_beta;
  uint64_t seed;
  int threads; /* 0 = hardware concurrency */
} wdm_network_opts;
void wdm_network_opts_init(wdm_network_opts* opts);

/* Optimizes every topology link independently and writes network_report.csv
 * plus per-(link,strategy,gff) profile files into out_dir. */
wdm_status wdm_network_run(const char* topology_path, const char* link_template_path,
                           const wdm_network_opts* opts, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* WDMOPT_WDMOPT_H */
