// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "testsupport.hpp"
#include "wdmopt/fiber.hpp"

using namespace wdmopt;
using wdmtest::rel_err;

namespace {

FiberParams ssmf(double length_km) {
  FiberParams p;
  p.length_km = length_km;
  p.attenuation_db_km = 0.2;
  p.beta2_ps2_km = -21.7;
  p.gamma_w_km = 1.3;
  p.raman_slope_w_km_thz = 0.028;
  p.raman_peak_shift_thz = 13.0;
  p.connector_loss_db = 0.5;
  return p;
}

// Reference GN estimate: direct numerical double integration of
//   G_nli(f) = (16/27) gamma^2 int int G(f1) G(f2) G(f1+f2-f) |mu|^2 df1 df2
// over the rectangular-channel comb, with the exact single-span link kernel
//   |mu|^2 = (1 - 2 e^{-aL} cos(bL) + e^{-2aL}) / (a^2 + b^2),
//   b = 4 pi^2 beta2 (f1-f)(f2-f),  a = power attenuation in 1/km.
// Completely independent of the closed form in fiber.cpp (no asinh, plain
// midpoint quadrature).
std::vector<double> nli_brute_force(const std::vector<double>& launch_w, const ChannelGrid& grid,
                                    const FiberParams& p, int steps_per_cell) {
  const double a = p.attenuation_db_km * std::log(10.0) / 10.0;  // 1/km
  const double beta2 = p.beta2_ps2_km * 1e-24;                   // s^2/km
  const double l = p.length_km;
  const double r = grid.symbol_rate_hz();
  const int n = grid.count();
  const double gamma2 = p.gamma_w_km * p.gamma_w_km;
  const double end_transfer =
      std::pow(10.0, -(p.attenuation_db_km * l + p.connector_loss_db) / 10.0);

  auto kernel = [&](double df1, double df2) {
    const double b = 4.0 * std::numbers::pi * std::numbers::pi * beta2 * df1 * df2;
    const double num = 1.0 - 2.0 * std::exp(-a * l) * std::cos(b * l) + std::exp(-2.0 * a * l);
    return num / (a * a + b * b);
  };

  std::vector<double> out(static_cast<size_t>(n), 0.0);
  for (int c = 0; c < n; ++c) {
    const double fc = grid.frequency_hz(c);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double gi = launch_w[static_cast<size_t>(i)] / r;
      for (int j = 0; j < n; ++j) {
        const double gj = launch_w[static_cast<size_t>(j)] / r;
        const double h = r / steps_per_cell;
        double cell = 0.0;
        for (int u = 0; u < steps_per_cell; ++u) {
          const double f1 = grid.frequency_hz(i) - r / 2 + (u + 0.5) * h;
          for (int v = 0; v < steps_per_cell; ++v) {
            const double f2 = grid.frequency_hz(j) - r / 2 + (v + 0.5) * h;
            const double f3 = f1 + f2 - fc;
            double g3 = 0.0;
            for (int k = 0; k < n; ++k) {
              if (std::abs(f3 - grid.frequency_hz(k)) <= r / 2) {
                g3 = launch_w[static_cast<size_t>(k)] / r;
                break;
              }
            }
            if (g3 == 0.0) continue;
            cell += gi * gj * g3 * kernel(f1 - fc, f2 - fc);
          }
        }
        acc += cell * h * h;
      }
    }
    out[static_cast<size_t>(c)] = (16.0 / 27.0) * gamma2 * acc * r * end_transfer;
  }
  return out;
}

}  // namespace

TEST_CASE("single channel reduces to exact exponential loss") {
  auto grid = std::make_shared<const ChannelGrid>(193.0, 100.0, 1, 32.0);
  FiberParams p = ssmf(100.0);
  p.connector_loss_db = 0.0;
  PowerSpectrum launch(grid, Domain::kLinear, {1e-3});
  PowerSpectrum out = srs_propagate(launch, p);
  // SRS term vanishes with one channel: output = input - 20 dB
  CHECK(rel_err(out[0], 1e-3 * std::pow(10.0, -2.0)) < 1e-12);
}

TEST_CASE("two-channel SRS with zero loss follows the logistic solution") {
  // Equal launch in both channels: the low-frequency channel follows
  // P_low(z) = T / (1 + exp(-k T z)) with T the conserved total and
  // k = C_r * delta_f.
  auto grid = std::make_shared<const ChannelGrid>(192.1, 3900.0, 2, 32.0);
  FiberParams p;
  p.length_km = 100.0;
  p.attenuation_db_km = 0.0;
  p.raman_slope_w_km_thz = 0.028;
  p.raman_peak_shift_thz = 13.0;
  PowerSpectrum launch(grid, Domain::kLinear, {10e-3, 10e-3});
  PowerSpectrum out = srs_propagate(launch, p);

  const double t = 20e-3;
  const double k = 0.028 * 3.9;
  const double expected_low = t / (1.0 + std::exp(-k * t * 100.0));
  CHECK(rel_err(out[0], expected_low) < 1e-6);
  CHECK(rel_err(out[1], t - expected_low) < 1e-6);
  CHECK(rel_err(out[0], 11.088e-3) < 1e-4);  // 20/(1+e^-0.2184) mW
}

TEST_CASE("zero attenuation conserves total power across the comb") {
  auto grid = ChannelGrid::standard_cband();
  FiberParams p = ssmf(120.0);
  p.attenuation_db_km = 0.0;
  p.connector_loss_db = 0.0;
  PowerSpectrum launch = to_linear(PowerSpectrum::flat_total_dbm(grid, 18.0));
  PowerSpectrum out = srs_propagate(launch, p);
  CHECK(rel_err(out.total_watt(), launch.total_watt()) < 1e-9);
  // and the comb did tilt: low frequencies gained
  CHECK(out[0] > launch[0]);
  CHECK(out[39] < launch[39]);
}

TEST_CASE("zero Raman slope reduces to per-channel exponential loss") {
  auto grid = ChannelGrid::standard_cband();
  FiberParams p = ssmf(80.0);
  p.raman_slope_w_km_thz = 0.0;
  PowerSpectrum launch = to_linear(PowerSpectrum::flat_total_dbm(grid, 15.0));
  PowerSpectrum out = srs_propagate(launch, p);
  const double t = std::pow(10.0, -(0.2 * 80.0 + 0.5) / 10.0);
  for (int i = 0; i < grid->count(); ++i) CHECK(rel_err(out[i], launch[i] * t) < 1e-12);
}

TEST_CASE("clipped Raman slope stays antisymmetric (wide-band comb)") {
  // Band wider than the slope validity: coupling saturates but total power
  // is still conserved at zero loss.
  auto grid = std::make_shared<const ChannelGrid>(185.0, 2000.0, 10, 32.0);  // 18 THz band
  FiberParams p;
  p.length_km = 50.0;
  p.attenuation_db_km = 0.0;
  p.raman_slope_w_km_thz = 0.028;
  p.raman_peak_shift_thz = 13.0;
  PowerSpectrum launch = to_linear(PowerSpectrum::flat_total_dbm(grid, 17.0));
  PowerSpectrum out = srs_propagate(launch, p);
  CHECK(rel_err(out.total_watt(), launch.total_watt()) < 1e-9);
}

TEST_CASE("halving the integrator step barely changes the output") {
  auto grid = ChannelGrid::standard_cband();
  FiberParams p = ssmf(100.0);
  PowerSpectrum launch = to_linear(PowerSpectrum::flat_total_dbm(grid, 18.0));
  SpanResult full = srs_propagate_raw(launch.values(), p, *grid, nullptr, 0.1);
  SpanResult half = srs_propagate_raw(launch.values(), p, *grid, nullptr, 0.05);
  for (int i = 0; i < grid->count(); ++i)
    CHECK(rel_err(full.output_w[static_cast<size_t>(i)], half.output_w[static_cast<size_t>(i)]) <
          1e-8);
}

TEST_CASE("SRS adjoint matches central finite differences") {
  auto grid = std::make_shared<const ChannelGrid>(192.1, 500.0, 8, 32.0);
  FiberParams p = ssmf(60.0);
  std::vector<double> launch(8);
  for (int i = 0; i < 8; ++i) launch[static_cast<size_t>(i)] = 1e-3 * (1.0 + 0.15 * i);
  std::vector<double> w(8);
  for (int i = 0; i < 8; ++i) w[static_cast<size_t>(i)] = std::cos(0.7 * i) + 1.5;

  auto f = [&](const std::vector<double>& x) {
    SpanResult r = srs_propagate_raw(x, p, *grid);
    double acc = 0.0;
    for (size_t i = 0; i < 8; ++i) acc += w[i] * r.output_w[i];
    return acc;
  };
  SrsTrajectory traj;
  srs_propagate_raw(launch, p, *grid, &traj);
  std::vector<double> grad = srs_backward(traj, p, *grid, w);
  for (size_t i = 0; i < 8; ++i) {
    double fd = wdmtest::central_diff(f, launch, i, 1e-9);
    CHECK(rel_err(grad[i], fd) < 1e-3);
  }
}

TEST_CASE("NLI is cubic in the launch powers and vanishes with gamma") {
  auto grid = std::make_shared<const ChannelGrid>(193.0, 100.0, 3, 32.0);
  FiberParams p = ssmf(80.0);
  std::vector<double> launch{1e-3, 2e-3, 1.5e-3};
  NliKernel kernel = make_nli_kernel(*grid, p);
  std::vector<double> base = nli_power_raw(launch, kernel);
  std::vector<double> scaled_launch{3e-3, 6e-3, 4.5e-3};
  std::vector<double> scaled = nli_power_raw(scaled_launch, kernel);
  for (size_t i = 0; i < 3; ++i) CHECK(rel_err(scaled[i], 27.0 * base[i]) < 1e-12);

  FiberParams lin = p;
  lin.gamma_w_km = 0.0;
  for (double v : nli_power(PowerSpectrum(grid, Domain::kLinear, launch), lin)) CHECK(v == 0.0);
}

TEST_CASE("closed-form NLI tracks the brute-force GN integral within 15%") {
  auto grid = std::make_shared<const ChannelGrid>(193.0, 100.0, 3, 32.0);
  FiberParams p = ssmf(80.0);
  std::vector<double> launch{1.6e-3, 1.6e-3, 1.6e-3};
  std::vector<double> closed = nli_power_raw(launch, make_nli_kernel(*grid, p));
  std::vector<double> brute = nli_brute_force(launch, *grid, p, 160);
  for (size_t i = 0; i < 3; ++i) {
    CAPTURE(i);
    CAPTURE(closed[i]);
    CAPTURE(brute[i]);
    CHECK(rel_err(closed[i], brute[i]) < 0.15);
  }
}

TEST_CASE("NLI symmetry for an equal-power comb around the band center") {
  auto grid = std::make_shared<const ChannelGrid>(193.0, 100.0, 5, 32.0);
  FiberParams p = ssmf(80.0);
  std::vector<double> launch(5, 1e-3);
  std::vector<double> nli = nli_power_raw(launch, make_nli_kernel(*grid, p));
  CHECK(rel_err(nli[0], nli[4]) < 1e-12);
  CHECK(rel_err(nli[1], nli[3]) < 1e-12);
  CHECK(nli[2] > nli[0]);  // center channel sees the most XPM
}

TEST_CASE("NLI reverse pass matches finite differences") {
  auto grid = std::make_shared<const ChannelGrid>(193.0, 100.0, 4, 32.0);
  FiberParams p = ssmf(80.0);
  NliKernel kernel = make_nli_kernel(*grid, p);
  std::vector<double> launch{1e-3, 2e-3, 0.7e-3, 1.4e-3};
  std::vector<double> w{1.0, -0.5, 2.0, 0.25};
  auto f = [&](const std::vector<double>& x) {
    std::vector<double> nli = nli_power_raw(x, kernel);
    double acc = 0.0;
    for (size_t i = 0; i < 4; ++i) acc += w[i] * nli[i];
    return acc;
  };
  std::vector<double> grad(4, 0.0);
  nli_backward(launch, kernel, w, grad);
  for (size_t i = 0; i < 4; ++i) {
    double fd = wdmtest::central_diff(f, launch, i, 1e-9);
    CHECK(rel_err(grad[i], fd) < 1e-6);
  }
}

TEST_CASE("noise rides through the span with the signal transfer") {
  auto grid = std::make_shared<const ChannelGrid>(192.5, 200.0, 6, 32.0);
  FiberParams p = ssmf(90.0);
  std::vector<double> launch(6);
  for (int i = 0; i < 6; ++i) launch[static_cast<size_t>(i)] = 1e-3 * (1.0 + 0.3 * i);
  SpanResult r = srs_propagate_raw(launch, p, *grid);

  NoiseSpectrum noise = NoiseSpectrum::zero(grid);
  for (int i = 0; i < 6; ++i) {
    noise.ase_w[static_cast<size_t>(i)] = 1e-6 * (i + 1);
    noise.nli_w[static_cast<size_t>(i)] = 1e-7 * (6 - i);
    noise.impl_nsr[static_cast<size_t>(i)] = 0.01;
  }
  NoiseSpectrum after = propagate_noise(noise, r.transfer);
  for (int i = 0; i < 6; ++i) {
    size_t k = static_cast<size_t>(i);
    // noise tilt equals signal tilt per channel
    CHECK(rel_err(after.ase_w[k] / noise.ase_w[k], r.output_w[k] / launch[k]) < 1e-9);
    CHECK(after.impl_nsr[k] == noise.impl_nsr[k]);
  }

  NoiseSpectrum zero = propagate_noise(NoiseSpectrum::zero(grid), r.transfer);
  for (double v : zero.ase_w) CHECK(v == 0.0);
}
