// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wdmopt/fiber.hpp"
#include "wdmopt/grid.hpp"
#include "wdmopt/surrogate.hpp"

namespace wdmopt {

enum class GffMode { kNone, kIdeal };

struct SpanConfig {
  std::string edfa_id;
  double target_output_dbm = 18.0;
  FiberParams fiber;
  bool include_srs = true;
  bool include_nli = true;
  GffMode gff = GffMode::kNone;
};

struct LinkConfig {
  GridPtr grid;
  double first_edfa_input_dbm = -2.0;
  std::vector<double> b2b_snr_db;  // per channel, interpolated onto the grid
  std::vector<SpanConfig> spans;
  // EDFA id -> (gain model, nf model); spans reference these by id.
  std::map<std::string, std::pair<SurrogateModel, SurrogateModel>> models;
  // Prototype span for topology-driven construction (lengths filled in later).
  std::optional<SpanConfig> span_template;

  void validate() const;
  const std::pair<SurrogateModel, SurrogateModel>& models_for(const std::string& id) const;
};

// Link config file: grid, first-EDFA input total, B2B profile path, EDFA
// model registrations and one line per span. Relative paths resolve against
// the config file's directory.
LinkConfig load_link(const std::string& path);

struct SnrReport {
  PowerSpectrum received;            // linear watts at the link end
  NoiseSpectrum noise;               // accumulated, at the link end
  std::vector<double> snr_db;
  std::vector<std::vector<double>> span_output_dbm;  // diagnostic, one per span
  int envelope_warnings = 0;         // surrogate queries outside the training envelope

  double min_snr_db() const;
  double max_snr_db() const;
  double excursion_db() const { return max_snr_db() - min_snr_db(); }
};

void save_snr_report_csv(const SnrReport& report, const std::string& path);

// Per-simulation overrides: a strategy may switch SRS/NLI off during
// optimization while the configured link keeps them on.
struct ModelFlags {
  bool allow_srs = true;
  bool allow_nli = true;
};

// Ideal gain-flattening stage: an extra amplifier with just enough gain to
// lift the weakest channel to the common level (complete-inversion noise,
// 3 dB NF in the high-gain limit) followed by a per-channel attenuator with
// minimum attenuation 0 dB. Signal leaves flat; noise sees the same chain.
void apply_ideal_gff(std::vector<double>& psd_w, NoiseSpectrum& noise, const ChannelGrid& grid);

// Reverse-mode record of one simulate() call: per-stage intermediates
// needed by backprop().
struct CascadeTape {
  ModelFlags flags;
  std::vector<double> raw_input_w;
  std::vector<double> p0_w;  // after renormalization to the first-EDFA total

  struct EdfaCtx {
    std::vector<double> p_in_w;
    std::vector<double> pi_dbm;
    int peak_idx = 0;
    double total_in_w = 0.0;
    std::vector<double> features;  // normalized spectrum + tin + tout
    std::vector<double> hidden_gain, hidden_nf;
    std::vector<double> y;        // predicted normalized output shape (dB)
    std::vector<double> q;        // 10^(y/10)
    double q_sum = 0.0;
    double tout_w = 0.0;
    std::vector<double> out_w;    // renormalized EDFA output
    std::vector<double> gain_lin;
    std::vector<double> nf_db, nf_lin, rho;
    std::vector<double> ase_in, nli_in;
  };
  struct GffCtx {
    bool active = false;
    std::vector<double> p_in_w, ase_in, nli_in;
    int idx_max = 0, idx_min = 0;
    double mx = 0.0, mn = 0.0;
  };
  struct FiberCtx {
    bool srs_used = false;
    bool nli_used = false;
    std::vector<double> launch_w;
    SrsTrajectory traj;
    std::vector<double> transfer;
    std::vector<double> ase_in, nli_in;
  };
  struct SpanCtx {
    EdfaCtx edfa;
    GffCtx gff;
    FiberCtx fiber;
  };
  std::vector<SpanCtx> spans;

  std::vector<double> final_p, final_ase, final_nli, impl;
  std::vector<double> snr_lin;
};


class CascadeEvaluator {
 public:
  explicit CascadeEvaluator(const LinkConfig& link);

  const LinkConfig& link() const { return *link_; }

  // Runs the cascade on an input PSD (renormalized internally to the
  // configured first-EDFA total input power).
  SnrReport simulate(const PowerSpectrum& input) const;
  SnrReport simulate(const PowerSpectrum& input, const ModelFlags& flags) const;

  // As simulate(), but records a tape for reverse-mode differentiation.
  SnrReport simulate_taped(const std::vector<double>& input_w, const ModelFlags& flags,
                           CascadeTape& tape) const;

  // Pulls gradients back to the raw input powers (watts). Seeds may be given
  // with respect to the per-channel SNR in dB and/or the received power in
  // dBm; pass empty vectors to skip either.
  std::vector<double> backprop(const CascadeTape& tape, const std::vector<double>& grad_snr_db,
                               const std::vector<double>& grad_received_dbm) const;

 private:
  const LinkConfig* link_;
  std::vector<NliKernel> nli_kernels_;  // one per span
};

}  // namespace wdmopt
