// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wdmopt/cascade.hpp"

namespace wdmopt {

enum class Strategy {
  kFlatInputReference,  // reference arm: flat profile, no optimization
  kFlatReceivedPower,   // flatten the received power profile
  kFlatSnrLinear,       // flatten the SNR with SRS and NLI disabled in the model
  kFlatSnrFull,         // flatten the SNR with the full model
};

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);
ModelFlags flags_for(Strategy s);

enum class CostKind { kMinSnr, kThroughput, kPsdFlatness };

std::string to_string(CostKind c);
CostKind cost_kind_from_string(const std::string& s);
CostKind default_cost_for(Strategy s);

// Cost functions. SNR costs take per-channel SNR; flatness takes the received
// power profile in dBm. All are "lower is better".
double cost_min_snr(const std::vector<double>& snr_db);
// Log-sum-exp smoothed minimum, normalized so equal inputs map to themselves;
// converges to the hard minimum as beta -> infinity. beta in 1/dB.
double cost_min_snr_soft(const std::vector<double>& snr_db, double beta);
double cost_throughput(const std::vector<double>& snr_linear);
double cost_psd_flatness(const std::vector<double>& received_dbm);

struct OptimizationSpec {
  Strategy strategy = Strategy::kFlatSnrFull;
  CostKind cost = CostKind::kMinSnr;
  int iterations = 500;
  double learning_rate = 0.05;        // dB-scale Adam step
  double softmin_beta = 10.0;         // 1/dB
  std::uint64_t seed = 1;
  double convergence_rel_tol = 1e-6;  // relative cost change over the window
  int convergence_window = 20;

  void validate() const;
};

struct TraceRow {
  int iteration = 0;
  double cost = 0.0;         // full-model cost of the candidate
  double min_snr_db = 0.0;   // full-model
  double excursion_db = 0.0; // full-model
};

struct OptimizeResult {
  PowerSpectrum profile;     // optimized input profile, dBm per channel
  SnrReport full_report;     // full-model evaluation of the returned profile
  std::vector<TraceRow> trace;
  bool converged = false;
  double initial_full_cost = 0.0;
  double final_full_cost = 0.0;
};

// Candidate construction used by the optimizer: unconstrained per-channel dB
// offsets mapped to a linear spectrum whose total equals the configured
// first-EDFA input power, so the constraint holds by construction.
PowerSpectrum candidate_profile(const CascadeEvaluator& evaluator,
                                const std::vector<double>& theta_db);

// Strategy-model cost of a candidate and its gradient with respect to the dB
// offsets (the exact quantity the optimizer steps on).
double optimization_cost_and_grad(const CascadeEvaluator& evaluator, const OptimizationSpec& spec,
                                  const std::vector<double>& theta_db, bool hard_min,
                                  std::vector<double>* grad_theta);

// Gradient optimization of the per-channel dB offsets. The strategy selects
// which effects the optimization model sees; candidate tracking and the
// returned report always use the full model.
OptimizeResult optimize(const CascadeEvaluator& evaluator, const OptimizationSpec& spec);

void save_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);

}  // namespace wdmopt
