// SPDX-License-Identifier: Apache-2.0
#include "wdmopt/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wdmopt/errors.hpp"
#include "wdmopt/textio.hpp"

namespace wdmopt {

double db_from_linear(double ratio) {
  if (!(ratio > 0.0)) fail(ErrorCode::kDomain, "dB conversion of non-positive value");
  return 10.0 * std::log10(ratio);
}

double linear_from_db(double db) { return std::pow(10.0, db / 10.0); }

double dbm_from_watt(double watts) {
  if (!(watts > 0.0)) fail(ErrorCode::kDomain, "dBm conversion of non-positive power");
  return 10.0 * std::log10(watts * 1e3);
}

double watt_from_dbm(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

ChannelGrid::ChannelGrid(double start_thz, double spacing_ghz, int count, double symbol_rate_gbd)
    : spacing_ghz_(spacing_ghz), symbol_rate_gbd_(symbol_rate_gbd) {
  if (count < 1) fail(ErrorCode::kInvalidArgument, "grid needs at least one channel");
  if (!(spacing_ghz > 0.0)) fail(ErrorCode::kInvalidArgument, "grid spacing must be positive");
  if (!(symbol_rate_gbd > 0.0) || symbol_rate_gbd > spacing_ghz)
    fail(ErrorCode::kInvalidArgument, "symbol rate must be in (0, spacing]");
  freq_thz_.resize(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i)
    freq_thz_[static_cast<size_t>(i)] = start_thz + i * spacing_ghz * 1e-3;
}

std::shared_ptr<const ChannelGrid> ChannelGrid::standard_cband() {
  static const auto grid = std::make_shared<const ChannelGrid>(192.1, 100.0, 40, 32.0);
  return grid;
}

bool ChannelGrid::equivalent(const ChannelGrid& other) const {
  return count() == other.count() && freq_thz_.front() == other.freq_thz_.front() &&
         spacing_ghz_ == other.spacing_ghz_ && symbol_rate_gbd_ == other.symbol_rate_gbd_;
}

GridPtr load_grid(const std::string& path) {
  auto is = open_input(path);
  expect_version_line(is, path, "grid", 1);
  std::string line;
  if (!next_content_line(is, line)) fail(ErrorCode::kParse, path + ": missing grid row");
  auto toks = tokenize(line);
  if (toks.size() != 4)
    fail(ErrorCode::kParse, path + ": grid row needs 'count start_THz spacing_GHz symbol_GBd'");
  int count = parse_int(toks[0], path);
  double start = parse_double(toks[1], path);
  double spacing = parse_double(toks[2], path);
  double sym = parse_double(toks[3], path);
  return std::make_shared<const ChannelGrid>(start, spacing, count, sym);
}

void save_grid(const ChannelGrid& grid, const std::string& path) {
  auto os = open_output(path);
  write_version_line(os, "grid", 1);
  os << "# count start_THz spacing_GHz symbol_rate_GBd\n";
  os << grid.count() << " " << fmt_double(grid.frequency_thz(0)) << " "
     << fmt_double(grid.spacing_ghz()) << " " << fmt_double(grid.symbol_rate_gbd()) << "\n";
}

PowerSpectrum::PowerSpectrum(GridPtr grid, Domain domain, std::vector<double> values)
    : grid_(std::move(grid)), domain_(domain), values_(std::move(values)) {
  if (!grid_) fail(ErrorCode::kInvalidArgument, "spectrum without grid");
  if (static_cast<int>(values_.size()) != grid_->count())
    fail(ErrorCode::kInvalidArgument, "spectrum length does not match grid");
  if (domain_ == Domain::kLinear)
    for (double v : values_)
      if (!(v > 0.0)) fail(ErrorCode::kDomain, "linear spectrum entries must be positive");
}

PowerSpectrum PowerSpectrum::flat_dbm(GridPtr grid, double level_dbm) {
  std::vector<double> v(static_cast<size_t>(grid->count()), level_dbm);
  return PowerSpectrum(std::move(grid), Domain::kDb, std::move(v));
}

PowerSpectrum PowerSpectrum::flat_total_dbm(GridPtr grid, double total_dbm) {
  int n = grid->count();
  double per = watt_from_dbm(total_dbm) / n;
  std::vector<double> v(static_cast<size_t>(n), dbm_from_watt(per));
  return PowerSpectrum(std::move(grid), Domain::kDb, std::move(v));
}

double PowerSpectrum::total_watt() const {
  double sum = 0.0;
  if (domain_ == Domain::kLinear) {
    for (double v : values_) sum += v;
  } else {
    for (double v : values_) sum += watt_from_dbm(v);
  }
  return sum;
}

double PowerSpectrum::total_dbm() const { return dbm_from_watt(total_watt()); }

PowerSpectrum to_db(const PowerSpectrum& s) {
  if (s.domain() != Domain::kLinear)
    fail(ErrorCode::kInvalidArgument, "to_db expects a linear-domain spectrum");
  std::vector<double> out(s.values().size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = dbm_from_watt(s.values()[i]);
  return PowerSpectrum(s.grid(), Domain::kDb, std::move(out));
}

PowerSpectrum to_linear(const PowerSpectrum& s) {
  if (s.domain() != Domain::kDb)
    fail(ErrorCode::kInvalidArgument, "to_linear expects a dB-domain spectrum");
  std::vector<double> out(s.values().size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = watt_from_dbm(s.values()[i]);
  return PowerSpectrum(s.grid(), Domain::kLinear, std::move(out));
}

std::pair<PowerSpectrum, double> normalize_peak(const PowerSpectrum& s) {
  if (s.domain() != Domain::kDb)
    fail(ErrorCode::kInvalidArgument, "normalize_peak expects a dB-domain spectrum");
  double peak = *std::max_element(s.values().begin(), s.values().end());
  std::vector<double> out(s.values().size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = s.values()[i] - peak;
  return {PowerSpectrum(s.grid(), Domain::kDb, std::move(out)), peak};
}

PowerSpectrum normalize_total(const PowerSpectrum& s, double target_total_dbm) {
  PowerSpectrum lin = s.domain() == Domain::kLinear ? s : to_linear(s);
  double scale = watt_from_dbm(target_total_dbm) / lin.total_watt();
  std::vector<double> out(lin.values().size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = lin.values()[i] * scale;
  PowerSpectrum scaled(s.grid(), Domain::kLinear, std::move(out));
  return s.domain() == Domain::kDb ? to_db(scaled) : scaled;
}

NoiseSpectrum NoiseSpectrum::zero(GridPtr grid) {
  size_t n = static_cast<size_t>(grid->count());
  return NoiseSpectrum{std::move(grid), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                       std::vector<double>(n, 0.0)};
}

void NoiseSpectrum::validate() const {
  auto check = [](const std::vector<double>& v, const char* what) {
    for (double x : v)
      if (!(x >= 0.0) || !std::isfinite(x))
        fail(ErrorCode::kDomain, std::string("noise spectrum: ") + what + " entry invalid");
  };
  check(ase_w, "ASE");
  check(nli_w, "NLI");
  check(impl_nsr, "implementation NSR");
}

PowerSpectrum load_spectrum_dbm(const std::string& path, GridPtr grid) {
  auto is = open_input(path);
  expect_version_line(is, path, "spectrum", 1);
  std::vector<double> vals(static_cast<size_t>(grid->count()),
                           std::numeric_limits<double>::quiet_NaN());
  std::string line;
  int row = 0;
  while (next_content_line(is, line)) {
    auto toks = tokenize(line);
    if (toks.size() != 2) fail(ErrorCode::kParse, path + ": expected 'frequency_THz value' rows");
    double f = parse_double(toks[0], path);
    double v = parse_double(toks[1], path);
    int idx = static_cast<int>(std::lround((f - grid->frequency_thz(0)) / grid->spacing_thz()));
    if (idx < 0 || idx >= grid->count() ||
        std::abs(grid->frequency_thz(idx) - f) > 1e-6)
      fail(ErrorCode::kParse, path + ": frequency " + toks[0] + " not on the grid");
    vals[static_cast<size_t>(idx)] = v;
    ++row;
  }
  if (row != grid->count())
    fail(ErrorCode::kParse, path + ": expected one row per grid channel");
  return PowerSpectrum(std::move(grid), Domain::kDb, std::move(vals));
}

void save_spectrum_dbm(const PowerSpectrum& s, const std::string& path) {
  const PowerSpectrum db = s.domain() == Domain::kDb ? s : to_db(s);
  auto os = open_output(path);
  write_version_line(os, "spectrum", 1);
  os << "# frequency_THz power_dBm\n";
  for (int i = 0; i < db.count(); ++i)
    os << fmt_double(db.grid()->frequency_thz(i)) << " " << fmt_double(db[i]) << "\n";
}

std::vector<double> load_profile_db_interpolated(const std::string& path,
                                                 const ChannelGrid& grid) {
  auto is = open_input(path);
  expect_version_line(is, path, "spectrum", 1);
  std::vector<std::pair<double, double>> pts;
  std::string line;
  while (next_content_line(is, line)) {
    auto toks = tokenize(line);
    if (toks.size() != 2) fail(ErrorCode::kParse, path + ": expected 'frequency_THz value' rows");
    pts.emplace_back(parse_double(toks[0], path), parse_double(toks[1], path));
  }
  if (pts.empty()) fail(ErrorCode::kParse, path + ": no data rows");
  std::sort(pts.begin(), pts.end());
  std::vector<double> out(static_cast<size_t>(grid.count()));
  for (int i = 0; i < grid.count(); ++i) {
    double f = grid.frequency_thz(i);
    if (f <= pts.front().first) {
      out[static_cast<size_t>(i)] = pts.front().second;
    } else if (f >= pts.back().first) {
      out[static_cast<size_t>(i)] = pts.back().second;
    } else {
      size_t k = 1;
      while (pts[k].first < f) ++k;
      double t = (f - pts[k - 1].first) / (pts[k].first - pts[k - 1].first);
      out[static_cast<size_t>(i)] = pts[k - 1].second + t * (pts[k].second - pts[k - 1].second);
    }
  }
  return out;
}

}  // namespace wdmopt
