// SPDX-License-Identifier: Apache-2.0
#include "wdmopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wdmopt/errors.hpp"
#include "wdmopt/rng.hpp"
#include "wdmopt/textio.hpp"

namespace wdmopt {

namespace {

constexpr double kNspDenominatorFloor = 1e-3;  // dB/m units; keeps NF finite near transparency

double gain_db_at(const OracleParams& p, int n, double x) {
  size_t i = static_cast<size_t>(n);
  return p.length_m * (x * (p.alpha_db_m[i] + p.gstar_db_m[i]) - p.alpha_db_m[i] -
                       p.background_loss_db_m);
}

double total_output_watt(const OracleParams& p, const std::vector<double>& input_w, double x) {
  double sum = 0.0;
  for (int n = 0; n < static_cast<int>(input_w.size()); ++n)
    sum += input_w[static_cast<size_t>(n)] * linear_from_db(gain_db_at(p, n, x));
  return sum;
}

}  // namespace

void OracleParams::validate() const {
  if (!grid) fail(ErrorCode::kInvalidArgument, "oracle params without grid");
  size_t n = static_cast<size_t>(grid->count());
  if (alpha_db_m.size() != n || gstar_db_m.size() != n)
    fail(ErrorCode::kInvalidArgument, "oracle spectra length does not match grid");
  if (!(length_m > 0.0)) fail(ErrorCode::kInvalidArgument, "oracle length must be positive");
  for (size_t i = 0; i < n; ++i) {
    if (!(alpha_db_m[i] > 0.0) || !(gstar_db_m[i] > 0.0))
      fail(ErrorCode::kInvalidArgument, "oracle spectra must be positive");
    // positive gain must be achievable at full inversion
    if (!(gstar_db_m[i] - background_loss_db_m > 0.0))
      fail(ErrorCode::kInvalidArgument, "oracle channel cannot reach positive gain");
  }
}

OracleResponse oracle_response(const OracleParams& params, const PowerSpectrum& input_psd,
                               double target_total_output_dbm) {
  params.validate();
  if (!input_psd.grid()->equivalent(*params.grid))
    fail(ErrorCode::kInvalidArgument, "input spectrum grid does not match oracle grid");
  if (target_total_output_dbm > params.max_total_output_dbm + 1e-9)
    fail(ErrorCode::kInvalidArgument, "target output exceeds device maximum");

  const PowerSpectrum lin =
      input_psd.domain() == Domain::kLinear ? input_psd : to_linear(input_psd);
  const std::vector<double>& input_w = lin.values();
  const double target_w = watt_from_dbm(target_total_output_dbm);

  // Total output is monotonically increasing in x, so bisection is exact.
  double lo = 0.0, hi = 1.0;
  if (total_output_watt(params, input_w, hi) < target_w ||
      total_output_watt(params, input_w, lo) > target_w)
    fail(ErrorCode::kInfeasible, "no inversion in (0,1) reaches the target output power for unit " +
                                     params.unit_id);
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    x = 0.5 * (lo + hi);
    double out = total_output_watt(params, input_w, x);
    if (std::abs(out - target_w) <= 1e-7 * target_w) break;
    (out < target_w ? lo : hi) = x;
  }

  OracleResponse resp;
  int n_ch = params.grid->count();
  resp.gain_db.resize(static_cast<size_t>(n_ch));
  resp.nf_db.resize(static_cast<size_t>(n_ch));
  resp.inversion = x;
  for (int n = 0; n < n_ch; ++n) {
    size_t i = static_cast<size_t>(n);
    double g_db = gain_db_at(params, n, x);
    double g = linear_from_db(g_db);
    double denom = x * (params.alpha_db_m[i] + params.gstar_db_m[i]) - params.alpha_db_m[i];
    if (denom < kNspDenominatorFloor) {
      denom = kNspDenominatorFloor;
      ++resp.clamped_channels;
    }
    double n_sp = x * params.gstar_db_m[i] / denom;
    double h_nu = kPlanck * params.grid->frequency_hz(n);
    double rho_ase = 2.0 * n_sp * h_nu * (g - 1.0);
    if (rho_ase < 0.0) rho_ase = 0.0;  // attenuating channel: treat as noiseless loss
    double nf_lin = rho_ase / (g * h_nu) + 1.0 / g;
    resp.gain_db[i] = g_db;
    resp.nf_db[i] = db_from_linear(nf_lin);
  }
  return resp;
}

std::vector<std::vector<double>> generate_profiles(const ChannelGrid& grid, std::uint64_t seed,
                                                   int count, const ProfileGenOptions& opts) {
  if (count <= 0) fail(ErrorCode::kInvalidArgument, "profile count must be positive");
  Rng master(seed);
  int n = grid.count();
  std::vector<std::vector<double>> profiles;
  profiles.reserve(static_cast<size_t>(count));
  for (int p = 0; p < count; ++p) {
    Rng rng = master.substream(static_cast<std::uint64_t>(p));
    int terms = 1 + static_cast<int>(rng.below(4));  // 1..4 cosine terms
    std::vector<double> amp(static_cast<size_t>(terms)), phase(static_cast<size_t>(terms));
    for (int k = 0; k < terms; ++k) {
      amp[static_cast<size_t>(k)] = rng.uniform(-1.0, 1.0);
      phase[static_cast<size_t>(k)] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    double tilt = rng.uniform(-opts.tilt_max_db, opts.tilt_max_db);
    double target_pp = rng.uniform(0.0, opts.excursion_max_db);

    std::vector<double> shape(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      double t = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
      double v = tilt * (t - 0.5);
      for (int k = 0; k < terms; ++k)
        v += amp[static_cast<size_t>(k)] *
             std::cos(std::numbers::pi * (k + 1) * t + phase[static_cast<size_t>(k)]);
      shape[static_cast<size_t>(i)] = v;
    }
    auto [mn, mx] = std::minmax_element(shape.begin(), shape.end());
    double pp = *mx - *mn;
    double scale = pp > 1e-12 ? target_pp / pp : 0.0;
    for (double& v : shape) v *= scale;
    profiles.push_back(std::move(shape));
  }
  return profiles;
}

DatasetGenResult generate_dataset(const OracleParams& params, std::uint64_t seed, int n_profiles,
                                  const ProfileGenOptions& opts) {
  params.validate();
  auto profiles = generate_profiles(*params.grid, seed, n_profiles, opts);
  DatasetGenResult result;
  for (int p = 0; p < n_profiles; ++p) {
    for (int tin_i = 0; tin_i < 10; ++tin_i) {
      double total_in = -9.0 + 2.0 * tin_i;  // -9..9 dBm
      PowerSpectrum shaped(params.grid, Domain::kDb, profiles[static_cast<size_t>(p)]);
      PowerSpectrum input = normalize_total(shaped, total_in);
      for (int tout_i = 0; tout_i < 4; ++tout_i) {
        double total_out = 15.0 + tout_i;
        try {
          OracleResponse r = oracle_response(params, input, total_out);
          CharacterizationSample s;
          s.unit_id = params.unit_id;
          s.profile_index = p;
          s.total_input_dbm = total_in;
          s.total_output_dbm = total_out;
          s.input_dbm = input.values();
          s.gain_db = std::move(r.gain_db);
          s.nf_db = std::move(r.nf_db);
          result.samples.push_back(std::move(s));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kInfeasible) throw;
          ++result.skipped_infeasible;
        }
      }
    }
  }
  return result;
}

OracleParams perturb_unit(const OracleParams& params, std::uint64_t seed, double magnitude) {
  if (magnitude < 0.0 || magnitude > 0.2)
    fail(ErrorCode::kInvalidArgument, "perturbation magnitude must be in [0, 0.2]");
  params.validate();
  OracleParams out = params;
  out.unit_id = params.unit_id + "-p" + std::to_string(seed);
  if (magnitude == 0.0) return out;

  // Smooth bounded field: a dominant common-mode term plus two low-order
  // cosines, normalized so |field| <= magnitude.
  Rng master(seed);
  int n = params.grid->count();
  auto make_field = [&](Rng rng) {
    double c0 = rng.uniform(-1.0, 1.0);
    double a1 = rng.uniform(-1.0, 1.0), ph1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double a2 = rng.uniform(-1.0, 1.0), ph2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    std::vector<double> f(static_cast<size_t>(n));
    double peak = 0.0;
    for (int i = 0; i < n; ++i) {
      double t = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
      double v = 0.7 * c0 + 0.3 * (a1 * std::cos(std::numbers::pi * t + ph1) +
                                   a2 * std::cos(2.0 * std::numbers::pi * t + ph2)) / 2.0;
      f[static_cast<size_t>(i)] = v;
      peak = std::max(peak, std::abs(v));
    }
    double norm = peak > 1.0 ? 1.0 / peak : 1.0;
    for (double& v : f) v *= magnitude * norm;
    return f;
  };
  auto fa = make_field(master.substream(0));
  auto fg = make_field(master.substream(1));
  for (int i = 0; i < n; ++i) {
    out.alpha_db_m[static_cast<size_t>(i)] *= 1.0 + fa[static_cast<size_t>(i)];
    out.gstar_db_m[static_cast<size_t>(i)] *= 1.0 + fg[static_cast<size_t>(i)];
  }
  return out;
}

OracleParams load_oracle(const std::string& path) {
  auto is = open_input(path);
  expect_version_line(is, path, "oracle", 1);
  OracleParams p;
  double start = 0, spacing = 0, sym = 0;
  int count = 0;
  bool have_grid = false;
  std::string line;
  std::vector<std::array<double, 3>> rows;
  while (next_content_line(is, line)) {
    auto toks = tokenize(line);
    if (toks[0] == "unit_id" && toks.size() == 2) {
      p.unit_id = toks[1];
    } else if (toks[0] == "length_m" && toks.size() == 2) {
      p.length_m = parse_double(toks[1], path);
    } else if (toks[0] == "background_loss_db_m" && toks.size() == 2) {
      p.background_loss_db_m = parse_double(toks[1], path);
    } else if (toks[0] == "max_total_output_dbm" && toks.size() == 2) {
      p.max_total_output_dbm = parse_double(toks[1], path);
    } else if (toks[0] == "grid" && toks.size() == 5) {
      count = parse_int(toks[1], path);
      start = parse_double(toks[2], path);
      spacing = parse_double(toks[3], path);
      sym = parse_double(toks[4], path);
      have_grid = true;
    } else if (toks.size() == 3) {
      rows.push_back({parse_double(toks[0], path), parse_double(toks[1], path),
                      parse_double(toks[2], path)});
    } else {
      fail(ErrorCode::kParse, path + ": unrecognized line '" + line + "'");
    }
  }
  if (!have_grid) fail(ErrorCode::kParse, path + ": missing grid line");
  p.grid = std::make_shared<const ChannelGrid>(start, spacing, count, sym);
  if (static_cast<int>(rows.size()) != count)
    fail(ErrorCode::kParse, path + ": expected one alpha/gstar row per channel");
  p.alpha_db_m.resize(rows.size());
  p.gstar_db_m.resize(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (std::abs(rows[i][0] - p.grid->frequency_thz(static_cast<int>(i))) > 1e-6)
      fail(ErrorCode::kParse, path + ": channel rows must follow grid order");
    p.alpha_db_m[i] = rows[i][1];
    p.gstar_db_m[i] = rows[i][2];
  }
  p.validate();
  return p;
}

void save_oracle(const OracleParams& params, const std::string& path) {
  params.validate();
  auto os = open_output(path);
  write_version_line(os, "oracle", 1);
  os << "unit_id " << params.unit_id << "\n";
  os << "length_m " << fmt_double(params.length_m) << "\n";
  os << "background_loss_db_m " << fmt_double(params.background_loss_db_m) << "\n";
  os << "max_total_output_dbm " << fmt_double(params.max_total_output_dbm) << "\n";
  os << "grid " << params.grid->count() << " " << fmt_double(params.grid->frequency_thz(0)) << " "
     << fmt_double(params.grid->spacing_ghz()) << " " << fmt_double(params.grid->symbol_rate_gbd())
     << "\n";
  os << "# frequency_THz alpha_dB_per_m gstar_dB_per_m\n";
  for (int i = 0; i < params.grid->count(); ++i)
    os << fmt_double(params.grid->frequency_thz(i)) << " "
       << fmt_double(params.alpha_db_m[static_cast<size_t>(i)]) << " "
       << fmt_double(params.gstar_db_m[static_cast<size_t>(i)]) << "\n";
}

}  // namespace wdmopt
