// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "wdmopt/grid.hpp"

namespace wdmopt {

struct FiberParams {
  double length_km = 0.0;
  double attenuation_db_km = 0.0;       // flat power attenuation
  double beta2_ps2_km = 0.0;            // group velocity dispersion
  double gamma_w_km = 0.0;              // Kerr nonlinear coefficient, 1/(W km)
  double raman_slope_w_km_thz = 0.0;    // triangular Raman gain slope C_r
  double raman_peak_shift_thz = 13.0;   // slope valid up to this offset
  double connector_loss_db = 0.0;       // lumped at span end

  void validate() const;
};

// Result of propagating a comb through one span. `transfer` is the net
// per-channel power ratio output/input including the connector loss; the
// accumulated noise rides through the span with exactly this transfer.
struct SpanResult {
  std::vector<double> output_w;
  std::vector<double> transfer;
};

// Trajectory checkpoint store for the reverse pass (one state per RK step).
// A span with no Raman coupling skips the ODE entirely; the analytic loss
// factor is kept here so the reverse pass stays exact.
struct SrsTrajectory {
  int n_steps = 0;
  double step_km = 0.0;
  double flat_transfer = 1.0;  // pre-connector transfer when the ODE was skipped
  std::vector<double> states;  // (n_steps + 1) * channels, forward order
};

// Integrates dP_n/dz = P_n (-alpha + sum_m C_r clip(f_m - f_n) P_m) with
// fixed-step RK4 (step <= max_step_km) and applies the connector loss at the
// end. When `trajectory` is non-null the per-step states are recorded so
// srs_backward can run the adjoint afterwards.
SpanResult srs_propagate_raw(const std::vector<double>& launch_w, const FiberParams& params,
                             const ChannelGrid& grid, SrsTrajectory* trajectory = nullptr,
                             double max_step_km = 0.1);

// Reverse-mode pass: given d(loss)/d(output), returns d(loss)/d(launch).
std::vector<double> srs_backward(const SrsTrajectory& traj, const FiberParams& params,
                                 const ChannelGrid& grid, const std::vector<double>& grad_output);

PowerSpectrum srs_propagate(const PowerSpectrum& launch, const FiberParams& params);

// Closed-form incoherent GN-model kernel for a rectangular-spectrum comb.
// Depends only on the grid and fiber parameters, so spans cache it.
struct NliKernel {
  int channels = 0;
  double prefactor = 0.0;      // (16/27) gamma^2 Leff^2 / (2 pi |beta2| La)
  std::vector<double> psi;     // channels x channels; diagonal carries the SPM term weight
  double end_transfer = 1.0;   // net span attenuation applied to the generated NLI
  double symbol_rate_hz = 0.0;
};

NliKernel make_nli_kernel(const ChannelGrid& grid, const FiberParams& params);

// Per-channel NLI power (W, within the symbol-rate bandwidth) referred to the
// span output: the launch-referenced GN estimate times the net span loss.
// Homogeneous of degree 3 in the launch powers.
std::vector<double> nli_power_raw(const std::vector<double>& launch_w, const NliKernel& kernel);

// Accumulates d(loss)/d(launch) given d(loss)/d(nli).
void nli_backward(const std::vector<double>& launch_w, const NliKernel& kernel,
                  const std::vector<double>& grad_nli, std::vector<double>& grad_launch);

std::vector<double> nli_power(const PowerSpectrum& launch, const FiberParams& params);

// Applies a span's per-channel power transfer to the accumulated noise: ASE
// and NLI scale like the signal; the implementation penalty is a ratio and
// passes through unchanged.
NoiseSpectrum propagate_noise(const NoiseSpectrum& noise, const std::vector<double>& transfer);

}  // namespace wdmopt
