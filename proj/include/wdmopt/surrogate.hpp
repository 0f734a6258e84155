// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wdmopt/dataset.hpp"
#include "wdmopt/grid.hpp"

namespace wdmopt {

enum class ModelKind { kGain, kNf };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

// Feed-forward network with one ReLU hidden layer, mapping the peak-normalized
// input spectrum (dB) plus total input/output powers (dBm) to either the
// peak-normalized output spectrum (gain model) or the NF profile in dB.
// Features are standardized with statistics frozen at training time.
struct SurrogateModel {
  ModelKind kind = ModelKind::kGain;
  int input_dim = 0;   // channels + 2
  int hidden_dim = 0;
  int output_dim = 0;  // channels
  std::uint64_t train_seed = 0;

  std::vector<double> feature_mean;   // input_dim
  std::vector<double> feature_scale;  // input_dim
  std::vector<double> w1;             // hidden_dim x input_dim, row-major
  std::vector<double> b1;             // hidden_dim
  std::vector<double> w2;             // output_dim x hidden_dim, row-major
  std::vector<double> b2;             // output_dim

  // Training envelope, used to flag (not reject) extrapolating queries.
  double tin_min_dbm = 0.0, tin_max_dbm = 0.0;
  double tout_min_dbm = 0.0, tout_max_dbm = 0.0;
  double max_input_excursion_db = 0.0;

  int channels() const { return output_dim; }

  // Raw network output for a feature vector [normalized spectrum, tin, tout].
  void forward(const double* features, double* out) const;

  // Reverse-mode pass: given d(loss)/d(out), accumulates d(loss)/d(features).
  // `hidden` must hold the pre-activation values saved by forward_cached.
  void forward_cached(const double* features, double* hidden_pre, double* out) const;
  void backward_features(const double* features, const double* hidden_pre,
                         const double* grad_out, double* grad_features) const;

  bool in_envelope(const std::vector<double>& normalized_db, double tin_dbm,
                   double tout_dbm) const;
};

SurrogateModel load_model(const std::string& path);
void save_model(const SurrogateModel& m, const std::string& path);

struct TrainOptions {
  int hidden_dim = 64;
  int max_epochs = 2000;
  int batch_size = 64;
  double learning_rate = 1e-3;
  int plateau_epochs = 100;  // early stop when validation has not improved for this many
  double validation_fraction = 0.2;
};

struct TrainResult {
  SurrogateModel model;
  double best_validation_mse = 0.0;
  int best_epoch = 0;
  int epochs_run = 0;
};

// Deterministic training: 80/20 split by profile, mean-squared-error loss,
// Adam updates, snapshot at the best validation epoch.
TrainResult train(const Dataset& dataset, ModelKind kind, const TrainOptions& opts,
                  std::uint64_t seed);

// Gain in dB per channel for a peak-normalized input (max entry 0 dB). The
// constant part of the gain is recovered from the total powers.
std::vector<double> predict_gain(const SurrogateModel& m,
                                 const std::vector<double>& input_normalized_db, double tin_dbm,
                                 double tout_dbm, bool* envelope_warning = nullptr);

std::vector<double> predict_nf(const SurrogateModel& m,
                               const std::vector<double>& input_normalized_db, double tin_dbm,
                               double tout_dbm, bool* envelope_warning = nullptr);

// Eq.-style NF <-> ASE density conversions (exact, h = 6.62607015e-34 J s).
double nf_from_ase(double rho_ase_w_hz, double gain_linear, double frequency_thz);
double ase_from_nf(double nf_linear, double gain_linear, double frequency_thz);

// Evaluation: MSE bucketed by average gain (+/- 1 dB windows around integer
// centers) and by total output power, per-channel MSE, and the distribution
// of per-sample maximum absolute error.
struct EvalReport {
  std::string label;  // "intra" or "inter"
  ModelKind kind = ModelKind::kGain;
  std::map<int, std::pair<double, int>> mse_per_gav;   // center dB -> (mse, count)
  std::map<int, std::pair<double, int>> mse_per_pout;  // dBm -> (mse, count)
  std::vector<double> mse_per_channel;
  std::vector<double> mae_per_sample;  // dB
  double overall_mse = 0.0;

  // Normalized histogram of mae_per_sample (integrates to 1).
  struct Histogram {
    double bin_width = 0.0;
    double origin = 0.0;
    std::vector<double> density;
  };
  Histogram mae_histogram(double bin_width = 0.05) const;
};

EvalReport evaluate(const SurrogateModel& m, const Dataset& dataset, const std::string& label);

// Maximum absolute per-channel error of one sample (dB).
double max_abs_error(const std::vector<double>& predicted, const std::vector<double>& truth);

// Featurization shared by training and evaluation.
struct SampleFeatures {
  std::vector<double> features;  // normalized input spectrum + tin + tout
  std::vector<double> target;    // normalized output (gain kind) or NF dB
};
SampleFeatures featurize(const CharacterizationSample& s, ModelKind kind);

}  // namespace wdmopt
