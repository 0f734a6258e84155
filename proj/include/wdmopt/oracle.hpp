// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wdmopt/grid.hpp"

namespace wdmopt {

// Synthetic ground-truth EDFA built on the homogeneous two-level gain model:
// per-channel gain is linear in a single spatially averaged inversion x,
//
//   G_dB(n, x) = length * (x * (alpha_n + gstar_n) - alpha_n - background_loss)
//
// with alpha/gstar the absorption and emission spectra in dB/m. The amplifier
// is driven in constant-output-power mode: x is solved so the total linear
// output hits the requested target. Spontaneous emission follows
//
//   n_sp(n) = x * gstar_n / (x * (alpha_n + gstar_n) - alpha_n)
//   rho_ase(n) = 2 * n_sp(n) * h * nu_n * (G_lin(n) - 1)        [dual pol]
//
// and the noise figure is rho_ase/(G h nu) + 1/G.
struct OracleParams {
  GridPtr grid;
  std::vector<double> alpha_db_m;  // absorption spectrum, > 0
  std::vector<double> gstar_db_m;  // emission spectrum, > 0
  double length_m = 0.0;
  double background_loss_db_m = 0.0;
  double max_total_output_dbm = 18.0;
  std::string unit_id;

  void validate() const;
};

struct OracleResponse {
  std::vector<double> gain_db;
  std::vector<double> nf_db;
  double inversion = 0.0;          // solved x
  int clamped_channels = 0;        // channels where the n_sp denominator hit the floor
};

// Solves the inversion by bisection (total output within 1e-6 relative) and
// returns per-channel gain and NF. Throws kInfeasible when no x in (0,1)
// reaches the target.
OracleResponse oracle_response(const OracleParams& params, const PowerSpectrum& input_psd,
                               double target_total_output_dbm);

// One characterization record: what the measurement bench would log.
struct CharacterizationSample {
  std::string unit_id;
  int profile_index = 0;
  double total_input_dbm = 0.0;
  double total_output_dbm = 0.0;
  std::vector<double> input_dbm;  // per-channel
  std::vector<double> gain_db;
  std::vector<double> nf_db;
};

struct ProfileGenOptions {
  double excursion_max_db = 20.0;
  double tilt_max_db = 8.0;
};

// Smooth random input shapes: up to four low-order cosine terms plus a linear
// tilt, rescaled so the peak-to-peak excursion is uniform in
// [0, excursion_max]. Shapes are relative (dB around zero); deterministic
// given the seed.
std::vector<std::vector<double>> generate_profiles(const ChannelGrid& grid, std::uint64_t seed,
                                                   int count, const ProfileGenOptions& opts);

struct DatasetGenResult {
  std::vector<CharacterizationSample> samples;
  int skipped_infeasible = 0;
};

// Cross product of profiles x total input sweep (-9..9 dBm, 2 dB steps) x
// total output {15,16,17,18} dBm, run through oracle_response. Infeasible
// combinations are skipped and counted.
DatasetGenResult generate_dataset(const OracleParams& params, std::uint64_t seed, int n_profiles,
                                  const ProfileGenOptions& opts = {});

// A "different physical unit of the same make": alpha and gstar scaled by
// smooth random fields bounded by +/- magnitude relative.
OracleParams perturb_unit(const OracleParams& params, std::uint64_t seed, double magnitude);

OracleParams load_oracle(const std::string& path);
void save_oracle(const OracleParams& params, const std::string& path);

}  // namespace wdmopt
