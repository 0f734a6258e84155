// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace wdmopt {

inline constexpr double kPlanck = 6.62607015e-34;  // J s

double db_from_linear(double ratio);
double linear_from_db(double db);
double dbm_from_watt(double watts);
double watt_from_dbm(double dbm);

// The fixed comb of carrier frequencies every spectrum in the system is
// defined on. Frequencies are uniform and strictly ascending; the symbol rate
// doubles as the per-channel noise integration bandwidth.
class ChannelGrid {
 public:
  ChannelGrid(double start_thz, double spacing_ghz, int count, double symbol_rate_gbd);

  // 40 channels, 192.1..196.0 THz in 0.1 THz steps, 32 GBd.
  static std::shared_ptr<const ChannelGrid> standard_cband();

  int count() const { return static_cast<int>(freq_thz_.size()); }
  double frequency_thz(int i) const { return freq_thz_[static_cast<size_t>(i)]; }
  double frequency_hz(int i) const { return freq_thz_[static_cast<size_t>(i)] * 1e12; }
  const std::vector<double>& frequencies_thz() const { return freq_thz_; }
  double spacing_ghz() const { return spacing_ghz_; }
  double spacing_thz() const { return spacing_ghz_ * 1e-3; }
  double symbol_rate_gbd() const { return symbol_rate_gbd_; }
  double symbol_rate_hz() const { return symbol_rate_gbd_ * 1e9; }
  bool equivalent(const ChannelGrid& other) const;

 private:
  std::vector<double> freq_thz_;
  double spacing_ghz_;
  double symbol_rate_gbd_;
};

using GridPtr = std::shared_ptr<const ChannelGrid>;

GridPtr load_grid(const std::string& path);
void save_grid(const ChannelGrid& grid, const std::string& path);

enum class Domain {
  kDb,      // dBm per channel
  kLinear,  // watts per channel
};

// Per-channel power comb. The linear domain is watts; dBm appears only at
// interfaces. Operations never change the grid a spectrum points to.
class PowerSpectrum {
 public:
  PowerSpectrum(GridPtr grid, Domain domain, std::vector<double> values);

  static PowerSpectrum flat_dbm(GridPtr grid, double level_dbm);
  // Flat profile whose linear sum equals `total_dbm`.
  static PowerSpectrum flat_total_dbm(GridPtr grid, double total_dbm);

  const GridPtr& grid() const { return grid_; }
  Domain domain() const { return domain_; }
  int count() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](int i) const { return values_[static_cast<size_t>(i)]; }

  double total_watt() const;  // valid in either domain
  double total_dbm() const;

 private:
  GridPtr grid_;
  Domain domain_;
  std::vector<double> values_;
};

PowerSpectrum to_db(const PowerSpectrum& s);
PowerSpectrum to_linear(const PowerSpectrum& s);

// Shifts a dB-domain spectrum so its maximum entry is exactly 0 dB; the
// returned offset restores the original.
std::pair<PowerSpectrum, double> normalize_peak(const PowerSpectrum& s);

// Rescales so the linear sum equals the target total power, preserving the
// ratios between channels.
PowerSpectrum normalize_total(const PowerSpectrum& s, double target_total_dbm);

// Accumulated noise riding with a signal: absolute ASE and NLI powers within
// the symbol-rate bandwidth, plus the implementation penalty expressed as a
// noise-to-signal ratio (invariant under gain and loss).
struct NoiseSpectrum {
  GridPtr grid;
  std::vector<double> ase_w;
  std::vector<double> nli_w;
  std::vector<double> impl_nsr;

  static NoiseSpectrum zero(GridPtr grid);
  void validate() const;  // all entries finite and >= 0
};

// Spectrum files: one row per channel, "frequency_THz value". Values are dBm
// for power profiles and dB for B2B SNR profiles.
PowerSpectrum load_spectrum_dbm(const std::string& path, GridPtr grid);
void save_spectrum_dbm(const PowerSpectrum& s, const std::string& path);

// Reads a possibly sparse per-frequency table (e.g. SNR measured at a few
// carriers) and interpolates it linearly in dB onto the grid, clamping
// outside the measured range.
std::vector<double> load_profile_db_interpolated(const std::string& path, const ChannelGrid& grid);

}  // namespace wdmopt
