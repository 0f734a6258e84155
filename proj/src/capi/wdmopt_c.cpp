// SPDX-License-Identifier: Apache-2.0
#include "wdmopt/wdmopt.h"

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "wdmopt/cascade.hpp"
#include "wdmopt/dataset.hpp"
#include "wdmopt/errors.hpp"
#include "wdmopt/network.hpp"
#include "wdmopt/optimize.hpp"
#include "wdmopt/oracle.hpp"
#include "wdmopt/surrogate.hpp"
#include "wdmopt/textio.hpp"

using namespace wdmopt;

namespace {

thread_local std::string g_last_error;

wdm_status status_from(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return WDM_ERR_INVALID_ARGUMENT;
    case ErrorCode::kIo: return WDM_ERR_IO;
    case ErrorCode::kParse: return WDM_ERR_PARSE;
    case ErrorCode::kDomain: return WDM_ERR_DOMAIN;
    case ErrorCode::kInfeasible: return WDM_ERR_INFEASIBLE;
    case ErrorCode::kDiverged: return WDM_ERR_DIVERGED;
    case ErrorCode::kInternal: return WDM_ERR_INTERNAL;
  }
  return WDM_ERR_INTERNAL;
}

template <typename Fn>
wdm_status guarded(Fn&& fn) {
  try {
    fn();
    return WDM_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return WDM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return WDM_ERR_INTERNAL;
  }
}

wdm_status invalid(const char* what) {
  g_last_error = what;
  return WDM_ERR_INVALID_ARGUMENT;
}

std::vector<Strategy> parse_strategies(const char* csv) {
  std::vector<Strategy> out;
  for (const auto& tok : tokenize(csv ? csv : "")) out.push_back(strategy_from_string(tok));
  if (out.empty()) fail(ErrorCode::kInvalidArgument, "no strategies given");
  return out;
}

}  // namespace

struct wdm_oracle {
  OracleParams params;
};
struct wdm_model {
  SurrogateModel model;
};
struct wdm_link {
  LinkConfig config;
  CascadeEvaluator evaluator;
  explicit wdm_link(LinkConfig cfg) : config(std::move(cfg)), evaluator(config) {}
};

namespace {

PowerSpectrum input_or_flat(const wdm_link* link, const double* input_dbm) {
  if (!input_dbm)
    return PowerSpectrum::flat_total_dbm(link->config.grid, link->config.first_edfa_input_dbm);
  return PowerSpectrum(link->config.grid, Domain::kDb,
                       std::vector<double>(input_dbm, input_dbm + link->config.grid->count()));
}

OptimizationSpec spec_from(const wdm_optimize_opts* opts) {
  OptimizationSpec spec;
  spec.strategy = strategy_from_string(opts->strategy ? opts->strategy : "flat-snr-full");
  spec.cost = opts->cost ? cost_kind_from_string(opts->cost) : default_cost_for(spec.strategy);
  spec.iterations = opts->iterations;
  spec.learning_rate = opts->learning_rate;
  spec.softmin_beta = opts->softmin_beta;
  spec.seed = opts->seed;
  return spec;
}

}  // namespace

extern "C" {

const char* wdm_version(void) { return "1.0.0"; }

const char* wdm_status_name(wdm_status status) {
  switch (status) {
    case WDM_OK: return "ok";
    case WDM_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case WDM_ERR_IO: return "io";
    case WDM_ERR_PARSE: return "parse";
    case WDM_ERR_DOMAIN: return "domain";
    case WDM_ERR_INFEASIBLE: return "infeasible";
    case WDM_ERR_DIVERGED: return "diverged";
    case WDM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* wdm_last_error(void) { return g_last_error.c_str(); }

/* ------------------------------------------------------------------ oracle */

wdm_status wdm_oracle_load(const char* path, wdm_oracle** out) {
  if (!path || !out) return invalid("wdm_oracle_load: null argument");
  return guarded([&] { *out = new wdm_oracle{load_oracle(path)}; });
}

void wdm_oracle_free(wdm_oracle* oracle) { delete oracle; }

wdm_status wdm_oracle_channels(const wdm_oracle* oracle, int* out) {
  if (!oracle || !out) return invalid("wdm_oracle_channels: null argument");
  *out = oracle->params.grid->count();
  return WDM_OK;
}

wdm_status wdm_oracle_save(const wdm_oracle* oracle, const char* path) {
  if (!oracle || !path) return invalid("wdm_oracle_save: null argument");
  return guarded([&] { save_oracle(oracle->params, path); });
}

wdm_status wdm_oracle_perturb(const wdm_oracle* oracle, uint64_t seed, double magnitude,
                              wdm_oracle** out) {
  if (!oracle || !out) return invalid("wdm_oracle_perturb: null argument");
  return guarded([&] { *out = new wdm_oracle{perturb_unit(oracle->params, seed, magnitude)}; });
}

wdm_status wdm_oracle_response(const wdm_oracle* oracle, const double* input_dbm, int channels,
                               double target_output_dbm, double* gain_db, double* nf_db) {
  if (!oracle || !input_dbm || !gain_db || !nf_db)
    return invalid("wdm_oracle_response: null argument");
  return guarded([&] {
    if (channels != oracle->params.grid->count())
      fail(ErrorCode::kInvalidArgument, "channel count does not match oracle grid");
    PowerSpectrum in(oracle->params.grid, Domain::kDb,
                     std::vector<double>(input_dbm, input_dbm + channels));
    OracleResponse r = oracle_response(oracle->params, in, target_output_dbm);
    std::memcpy(gain_db, r.gain_db.data(), sizeof(double) * r.gain_db.size());
    std::memcpy(nf_db, r.nf_db.data(), sizeof(double) * r.nf_db.size());
  });
}

void wdm_dataset_opts_init(wdm_dataset_opts* opts) {
  if (!opts) return;
  opts->profiles = 125;
  opts->seed = 1;
  opts->excursion_max_db = 20.0;
  opts->tilt_max_db = 8.0;
}

wdm_status wdm_generate_dataset(const wdm_oracle* oracle, const wdm_dataset_opts* opts,
                                const char* out_path, int* n_samples, int* n_skipped) {
  if (!oracle || !opts || !out_path) return invalid("wdm_generate_dataset: null argument");
  return guarded([&] {
    ProfileGenOptions pg{opts->excursion_max_db, opts->tilt_max_db};
    DatasetGenResult r = generate_dataset(oracle->params, opts->seed, opts->profiles, pg);
    Dataset ds{oracle->params.grid, std::move(r.samples)};
    save_dataset(ds, out_path, r.skipped_infeasible);
    if (n_samples) *n_samples = static_cast<int>(ds.samples.size());
    if (n_skipped) *n_skipped = r.skipped_infeasible;
  });
}

/* ---------------------------------------------------------------- training */

void wdm_train_opts_init(wdm_train_opts* opts) {
  if (!opts) return;
  opts->hidden_dim = 64;
  opts->max_epochs = 2000;
  opts->batch_size = 64;
  opts->learning_rate = 1e-3;
  opts->plateau_epochs = 100;
  opts->seed = 1;
}

wdm_status wdm_train(const char* dataset_path, const char* kind, const wdm_train_opts* opts,
                     const char* model_out_path, double* best_validation_mse, int* best_epoch) {
  if (!dataset_path || !kind || !opts || !model_out_path)
    return invalid("wdm_train: null argument");
  return guarded([&] {
    Dataset ds = load_dataset(dataset_path);
    TrainOptions topts;
    topts.hidden_dim = opts->hidden_dim;
    topts.max_epochs = opts->max_epochs;
    topts.batch_size = opts->batch_size;
    topts.learning_rate = opts->learning_rate;
    topts.plateau_epochs = opts->plateau_epochs;
    TrainResult r = train(ds, model_kind_from_string(kind), topts, opts->seed);
    save_model(r.model, model_out_path);
    if (best_validation_mse) *best_validation_mse = r.best_validation_mse;
    if (best_epoch) *best_epoch = r.best_epoch;
  });
}

wdm_status wdm_model_load(const char* path, wdm_model** out) {
  if (!path || !out) return invalid("wdm_model_load: null argument");
  return guarded([&] { *out = new wdm_model{load_model(path)}; });
}

void wdm_model_free(wdm_model* model) { delete model; }

wdm_status wdm_model_channels(const wdm_model* model, int* out) {
  if (!model || !out) return invalid("wdm_model_channels: null argument");
  *out = model->model.channels();
  return WDM_OK;
}

wdm_status wdm_model_predict(const wdm_model* model, const double* input_normalized_db,
                             int channels, double total_in_dbm, double total_out_dbm, double* out,
                             int* envelope_warning) {
  if (!model || !input_normalized_db || !out) return invalid("wdm_model_predict: null argument");
  return guarded([&] {
    std::vector<double> in(input_normalized_db, input_normalized_db + channels);
    bool warn = false;
    std::vector<double> result =
        model->model.kind == ModelKind::kGain
            ? predict_gain(model->model, in, total_in_dbm, total_out_dbm, &warn)
            : predict_nf(model->model, in, total_in_dbm, total_out_dbm, &warn);
    std::memcpy(out, result.data(), sizeof(double) * result.size());
    if (envelope_warning) *envelope_warning = warn ? 1 : 0;
  });
}

wdm_status wdm_model_evaluate(const wdm_model* model, const char* dataset_path, const char* label,
                              const char* out_csv_prefix, double* overall_mse) {
  if (!model || !dataset_path || !label || !out_csv_prefix)
    return invalid("wdm_model_evaluate: null argument");
  return guarded([&] {
    Dataset ds = load_dataset(dataset_path);
    EvalReport rep = evaluate(model->model, ds, label);
    std::string prefix = out_csv_prefix;
    {
      auto os = open_output(prefix + "_mse_gav.csv");
      write_version_line(os, "eval", 1);
      os << "label,gav_dB,mse_dB2,count\n";
      for (const auto& [c, v] : rep.mse_per_gav)
        os << rep.label << "," << c << "," << fmt_double(v.first) << "," << v.second << "\n";
    }
    {
      auto os = open_output(prefix + "_mse_pout.csv");
      write_version_line(os, "eval", 1);
      os << "label,pout_dBm,mse_dB2,count\n";
      for (const auto& [c, v] : rep.mse_per_pout)
        os << rep.label << "," << c << "," << fmt_double(v.first) << "," << v.second << "\n";
    }
    {
      auto os = open_output(prefix + "_mse_channel.csv");
      write_version_line(os, "eval", 1);
      os << "label,channel,mse_dB2\n";
      for (size_t i = 0; i < rep.mse_per_channel.size(); ++i)
        os << rep.label << "," << i << "," << fmt_double(rep.mse_per_channel[i]) << "\n";
    }
    {
      auto hist = rep.mae_histogram();
      auto os = open_output(prefix + "_mae_hist.csv");
      write_version_line(os, "eval", 1);
      os << "label,mae_bin_lo_dB,density\n";
      for (size_t i = 0; i < hist.density.size(); ++i)
        os << rep.label << "," << fmt_double(hist.origin + static_cast<double>(i) * hist.bin_width)
           << "," << fmt_double(hist.density[i]) << "\n";
    }
    if (overall_mse) *overall_mse = rep.overall_mse;
  });
}

wdm_status wdm_nf_from_ase(double rho_ase_w_hz, double gain_linear, double frequency_thz,
                           double* nf_linear) {
  if (!nf_linear) return invalid("wdm_nf_from_ase: null output");
  return guarded([&] { *nf_linear = nf_from_ase(rho_ase_w_hz, gain_linear, frequency_thz); });
}

wdm_status wdm_ase_from_nf(double nf_linear, double gain_linear, double frequency_thz,
                           double* rho_ase_w_hz) {
  if (!rho_ase_w_hz) return invalid("wdm_ase_from_nf: null output");
  return guarded([&] { *rho_ase_w_hz = ase_from_nf(nf_linear, gain_linear, frequency_thz); });
}

/* -------------------------------------------------------------------- link */

wdm_status wdm_link_load(const char* path, wdm_link** out) {
  if (!path || !out) return invalid("wdm_link_load: null argument");
  return guarded([&] { *out = new wdm_link(load_link(path)); });
}

void wdm_link_free(wdm_link* link) { delete link; }

wdm_status wdm_link_channels(const wdm_link* link, int* out) {
  if (!link || !out) return invalid("wdm_link_channels: null argument");
  *out = link->config.grid->count();
  return WDM_OK;
}

wdm_status wdm_link_frequencies_thz(const wdm_link* link, double* out) {
  if (!link || !out) return invalid("wdm_link_frequencies_thz: null argument");
  const auto& f = link->config.grid->frequencies_thz();
  std::memcpy(out, f.data(), sizeof(double) * f.size());
  return WDM_OK;
}

wdm_status wdm_link_spans(const wdm_link* link, int* out) {
  if (!link || !out) return invalid("wdm_link_spans: null argument");
  *out = static_cast<int>(link->config.spans.size());
  return WDM_OK;
}

wdm_status wdm_link_read_spectrum(const wdm_link* link, const char* path, double* out_dbm) {
  if (!link || !path || !out_dbm) return invalid("wdm_link_read_spectrum: null argument");
  return guarded([&] {
    PowerSpectrum s = load_spectrum_dbm(path, link->config.grid);
    std::memcpy(out_dbm, s.values().data(), sizeof(double) * s.values().size());
  });
}

wdm_status wdm_link_write_spectrum(const wdm_link* link, const char* path,
                                   const double* values_dbm) {
  if (!link || !path || !values_dbm) return invalid("wdm_link_write_spectrum: null argument");
  return guarded([&] {
    PowerSpectrum s(link->config.grid, Domain::kDb,
                    std::vector<double>(values_dbm, values_dbm + link->config.grid->count()));
    save_spectrum_dbm(s, path);
  });
}

wdm_status wdm_link_simulate(const wdm_link* link, const double* input_dbm, double* received_dbm,
                             double* ase_w, double* nli_w, double* snr_db,
                             int* envelope_warnings) {
  if (!link) return invalid("wdm_link_simulate: null link");
  return guarded([&] {
    SnrReport r = link->evaluator.simulate(input_or_flat(link, input_dbm));
    const int n = link->config.grid->count();
    for (int i = 0; i < n; ++i) {
      size_t k = static_cast<size_t>(i);
      if (received_dbm) received_dbm[i] = dbm_from_watt(r.received[i]);
      if (ase_w) ase_w[i] = r.noise.ase_w[k];
      if (nli_w) nli_w[i] = r.noise.nli_w[k];
      if (snr_db) snr_db[i] = r.snr_db[k];
    }
    if (envelope_warnings) *envelope_warnings = r.envelope_warnings;
  });
}

wdm_status wdm_link_simulate_csv(const wdm_link* link, const double* input_dbm,
                                 const char* out_csv) {
  if (!link || !out_csv) return invalid("wdm_link_simulate_csv: null argument");
  return guarded([&] {
    SnrReport r = link->evaluator.simulate(input_or_flat(link, input_dbm));
    save_snr_report_csv(r, out_csv);
  });
}

void wdm_optimize_opts_init(wdm_optimize_opts* opts) {
  if (!opts) return;
  opts->strategy = "flat-snr-full";
  opts->cost = nullptr;
  opts->iterations = 500;
  opts->learning_rate = 0.05;
  opts->softmin_beta = 10.0;
  opts->seed = 1;
}

wdm_status wdm_link_optimize(const wdm_link* link, const wdm_optimize_opts* opts,
                             double* profile_dbm, double* min_snr_db, double* excursion_db,
                             int* converged, const char* trace_csv) {
  if (!link || !opts) return invalid("wdm_link_optimize: null argument");
  return guarded([&] {
    OptimizeResult r = optimize(link->evaluator, spec_from(opts));
    if (profile_dbm)
      std::memcpy(profile_dbm, r.profile.values().data(),
                  sizeof(double) * r.profile.values().size());
    if (min_snr_db) *min_snr_db = r.full_report.min_snr_db();
    if (excursion_db) *excursion_db = r.full_report.excursion_db();
    if (converged) *converged = r.converged ? 1 : 0;
    if (trace_csv) save_trace_csv(r.trace, trace_csv);
  });
}

wdm_status wdm_link_sweep_power(const wdm_link* link, const double* powers_dbm, int n_powers,
                                const char* strategies, const wdm_optimize_opts* opts,
                                const char* out_csv) {
  if (!link || !powers_dbm || n_powers <= 0 || !opts || !out_csv)
    return invalid("wdm_link_sweep_power: null/empty argument");
  return guarded([&] {
    std::vector<double> powers(powers_dbm, powers_dbm + n_powers);
    OptimizationSpec base = spec_from(opts);
    auto rows = sweep_launch_power(link->config, powers, parse_strategies(strategies), base);
    save_sweep_csv(rows, out_csv);
  });
}

/* ----------------------------------------------------------------- network */

void wdm_network_opts_init(wdm_network_opts* opts) {
  if (!opts) return;
  opts->strategies = "flat-input-reference,flat-snr-full";
  opts->gff_modes = "none,ideal";
  opts->launch_power_dbm = 18.0;
  opts->iterations = 400;
  opts->learning_rate = 0.05;
  opts->softmin_beta = 10.0;
  opts->seed = 1;
  opts->threads = 0;
}

wdm_status wdm_network_run(const char* topology_path, const char* link_template_path,
                           const wdm_network_opts* opts, const char* out_dir) {
  if (!topology_path || !link_template_path || !opts || !out_dir)
    return invalid("wdm_network_run: null argument");
  return guarded([&] {
    Topology topo = load_topology(topology_path);
    LinkConfig base = load_link(link_template_path);
    NetworkOptions nopts;
    nopts.strategies = parse_strategies(opts->strategies);
    for (const auto& tok : tokenize(opts->gff_modes ? opts->gff_modes : "none"))
      nopts.gff_modes.push_back(gff_mode_from_string(tok));
    nopts.launch_power_dbm = opts->launch_power_dbm;
    nopts.iterations = opts->iterations;
    nopts.learning_rate = opts->learning_rate;
    nopts.softmin_beta = opts->softmin_beta;
    nopts.seed = opts->seed;
    nopts.threads = opts->threads;
    NetworkReport report = run_network(topo, base, nopts);

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    save_network_report_csv(report, (fs::path(out_dir) / "network_report.csv").string());
    for (const auto& row : report.rows) {
      if (row.failed || row.profile_dbm.empty()) continue;
      PowerSpectrum profile(base.grid, Domain::kDb, row.profile_dbm);
      std::string name = "profile_link" + std::to_string(row.link_id) + "_" +
                         to_string(row.strategy) + "_" + to_string(row.gff) + ".txt";
      save_spectrum_dbm(profile, (fs::path(out_dir) / name).string());
    }
  });
}

}  // extern "C"
