// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "testsupport.hpp"
#include "wdmopt/errors.hpp"
#include "wdmopt/optimize.hpp"
#include "wdmopt/rng.hpp"

using namespace wdmopt;
using wdmtest::rel_err;

namespace {

// One-span link with a flat-gain stub: the EDFA gain is the same scalar for
// every channel regardless of the input shape, so the equal-SNR optimum has a
// closed form (solved below by bisection on the common SNR).
LinkConfig analytic_link(int n) {
  LinkConfig link;
  link.grid = std::make_shared<const ChannelGrid>(192.1, 400.0, n, 32.0);
  link.first_edfa_input_dbm = -2.0;
  link.b2b_snr_db.resize(static_cast<size_t>(n));
  std::vector<double> nf(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    link.b2b_snr_db[static_cast<size_t>(i)] = 20.0 + 0.15 * i;
    nf[static_cast<size_t>(i)] = 4.5 + 0.25 * i;
  }
  link.models.emplace("FLATG",
                      std::make_pair(wdmtest::linear_gain_stub(n, std::vector<double>(n, 0.0)),
                                     wdmtest::constant_stub(ModelKind::kNf, n, nf)));
  SpanConfig s;
  s.edfa_id = "FLATG";
  s.target_output_dbm = 16.0;
  s.fiber.length_km = 60.0;
  s.fiber.attenuation_db_km = 0.2;
  s.fiber.connector_loss_db = 0.0;
  s.include_srs = false;
  s.include_nli = false;
  link.spans.push_back(s);
  return link;
}

// Closed-form equal-SNR launch profile for analytic_link.
std::vector<double> equal_snr_profile_w(const LinkConfig& link) {
  const int n = link.grid->count();
  const double tin_w = watt_from_dbm(link.first_edfa_input_dbm);
  const double tout_w = watt_from_dbm(link.spans[0].target_output_dbm);
  const double kappa = tout_w / tin_w;  // flat gain
  const double rs = link.grid->symbol_rate_hz();
  const auto& nf_model = link.models.at("FLATG").second;

  std::vector<double> ase(static_cast<size_t>(n)), b_lin(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double h_nu = kPlanck * link.grid->frequency_hz(i);
    double nf_lin = linear_from_db(nf_model.b2[static_cast<size_t>(i)]);
    ase[static_cast<size_t>(i)] = h_nu * (nf_lin * kappa - 1.0) * rs;
    b_lin[static_cast<size_t>(i)] = linear_from_db(link.b2b_snr_db[static_cast<size_t>(i)]);
  }
  // find the common SNR s with sum_n Q_n(s) = tout_w, Q_n = s A_n / (1 - s/B_n)
  auto total_for = [&](double s) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double denom = 1.0 - s / b_lin[static_cast<size_t>(i)];
      if (denom <= 0.0) return 1e300;
      total += s * ase[static_cast<size_t>(i)] / denom;
    }
    return total;
  };
  double lo = 0.0, hi = *std::min_element(b_lin.begin(), b_lin.end());
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (total_for(mid) < tout_w ? lo : hi) = mid;
  }
  double s = 0.5 * (lo + hi);
  std::vector<double> launch(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double q = s * ase[static_cast<size_t>(i)] / (1.0 - s / b_lin[static_cast<size_t>(i)]);
    launch[static_cast<size_t>(i)] = q / kappa;
  }
  return launch;
}

}  // namespace

TEST_CASE("cost functions: reference values") {
  CHECK(cost_min_snr({10.0, 20.0, 30.0}) == -10.0);
  CHECK(cost_min_snr({7.5}) == -7.5);

  // all-equal inputs map to themselves for both variants
  for (double beta : {1.0, 10.0, 100.0}) {
    CHECK(cost_min_snr_soft({12.0, 12.0, 12.0, 12.0}, beta) == doctest::Approx(-12.0));
  }
  // soft-min converges to the hard min as the temperature grows
  std::vector<double> s{15.0, 15.5, 18.0};
  double prev = 1e9;
  for (double beta : {1.0, 3.0, 10.0, 30.0, 100.0, 1000.0}) {
    double soft = cost_min_snr_soft(s, beta);
    double gap = std::abs(soft - cost_min_snr(s));
    CHECK(gap <= prev + 1e-12);
    prev = gap;
  }
  CHECK(std::abs(cost_min_snr_soft(s, 1000.0) - cost_min_snr(s)) < 5e-3);

  CHECK(cost_throughput({0.0, 0.0, 0.0}) == 0.0);
  CHECK(cost_throughput({1.0}) == doctest::Approx(-1.0));
  CHECK(cost_throughput({10.0, 20.0, 30.0}) == doctest::Approx(-12.8059).epsilon(1e-4));

  CHECK(cost_psd_flatness({3.0, 3.0, 3.0}) == 0.0);
  CHECK(cost_psd_flatness({-1.0, 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("flat-input-reference returns the flat profile untouched") {
  LinkConfig link = analytic_link(6);
  CascadeEvaluator ev(link);
  OptimizationSpec spec;
  spec.strategy = Strategy::kFlatInputReference;
  OptimizeResult r = optimize(ev, spec);
  CHECK(r.trace.size() == 1);
  CHECK(r.converged);
  for (int i = 1; i < 6; ++i) CHECK(r.profile[i] == doctest::Approx(r.profile[0]));
  CHECK(rel_err(to_linear(r.profile).total_watt(), watt_from_dbm(-2.0)) < 1e-9);
}

TEST_CASE("optimizer gradient equals finite differences of the composed cost") {
  LinkConfig link = analytic_link(6);
  CascadeEvaluator ev(link);
  OptimizationSpec spec;
  spec.strategy = Strategy::kFlatSnrLinear;
  spec.cost = CostKind::kMinSnr;
  spec.softmin_beta = 10.0;

  Rng rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> theta(6);
    for (double& v : theta) v = rng.uniform(-2.0, 2.0);
    std::vector<double> grad;
    optimization_cost_and_grad(ev, spec, theta, false, &grad);
    auto f = [&](const std::vector<double>& t) {
      return optimization_cost_and_grad(ev, spec, t, false, nullptr);
    };
    for (size_t i = 0; i < 6; ++i) {
      double fd = wdmtest::central_diff(f, theta, i, 1e-5);
      CHECK(rel_err(grad[i], fd) < 1e-3);
    }
  }
  // also for the throughput and flatness costs
  for (CostKind ck : {CostKind::kThroughput, CostKind::kPsdFlatness}) {
    spec.cost = ck;
    std::vector<double> theta(6);
    for (double& v : theta) v = rng.uniform(-2.0, 2.0);
    std::vector<double> grad;
    optimization_cost_and_grad(ev, spec, theta, false, &grad);
    auto f = [&](const std::vector<double>& t) {
      return optimization_cost_and_grad(ev, spec, t, false, nullptr);
    };
    for (size_t i = 0; i < 6; i += 2) {
      double fd = wdmtest::central_diff(f, theta, i, 1e-5);
      CHECK(rel_err(grad[i], fd) < 1e-3);
    }
  }
}

TEST_CASE("candidate profiles conserve the configured total input power") {
  LinkConfig link = analytic_link(6);
  CascadeEvaluator ev(link);
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> theta(6);
    for (double& v : theta) v = rng.uniform(-8.0, 8.0);
    PowerSpectrum p = candidate_profile(ev, theta);
    CHECK(rel_err(p.total_watt(), watt_from_dbm(-2.0)) < 1e-9);
  }
}

TEST_CASE("equal-SNR optimum of the flat-gain toy link is reached") {
  LinkConfig link = analytic_link(8);
  CascadeEvaluator ev(link);
  OptimizationSpec spec;
  spec.strategy = Strategy::kFlatSnrLinear;
  spec.cost = CostKind::kMinSnr;
  spec.iterations = 600;
  OptimizeResult r = optimize(ev, spec);

  std::vector<double> want_w = equal_snr_profile_w(link);
  PowerSpectrum got = to_linear(r.profile);
  for (int i = 0; i < 8; ++i) {
    double got_db = dbm_from_watt(got[i]);
    double want_db = dbm_from_watt(want_w[static_cast<size_t>(i)]);
    CAPTURE(i);
    CHECK(std::abs(got_db - want_db) < 0.05);
  }
  // the equalized SNR profile is flat
  CHECK(r.full_report.excursion_db() < 0.05);
  CHECK(r.final_full_cost <= r.initial_full_cost);
}

TEST_CASE("flatness cost drives the input to pre-compensate the gain tilt") {
  const int n = 8;
  LinkConfig link;
  link.grid = std::make_shared<const ChannelGrid>(192.1, 400.0, n, 32.0);
  link.first_edfa_input_dbm = -2.0;
  link.b2b_snr_db.assign(static_cast<size_t>(n), 20.0);
  std::vector<double> g0(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) g0[static_cast<size_t>(i)] = 2.0 - 0.55 * i;  // tilted gain
  link.models.emplace("TILT",
                      std::make_pair(wdmtest::linear_gain_stub(n, g0),
                                     wdmtest::constant_stub(ModelKind::kNf, n,
                                                            std::vector<double>(n, 5.0))));
  SpanConfig s;
  s.edfa_id = "TILT";
  s.target_output_dbm = 16.0;
  s.fiber.length_km = 50.0;
  s.fiber.attenuation_db_km = 0.2;
  s.include_srs = false;
  s.include_nli = false;
  link.spans.push_back(s);

  CascadeEvaluator ev(link);
  OptimizationSpec spec;
  spec.strategy = Strategy::kFlatReceivedPower;
  spec.cost = CostKind::kPsdFlatness;
  spec.iterations = 500;
  OptimizeResult r = optimize(ev, spec);

  // minimizer: input shape = -g0 up to a common offset
  double offset = r.profile[0] + g0[0];
  for (int i = 0; i < n; ++i)
    CHECK(std::abs(r.profile[i] - (offset - g0[static_cast<size_t>(i)])) < 0.05);
  CHECK(r.final_full_cost < 1e-4);  // received profile essentially flat
}

TEST_CASE("trace is well-formed and the CSV round-trips") {
  LinkConfig link = analytic_link(6);
  CascadeEvaluator ev(link);
  OptimizationSpec spec;
  spec.strategy = Strategy::kFlatSnrLinear;
  spec.iterations = 40;
  OptimizeResult r = optimize(ev, spec);
  REQUIRE(!r.trace.empty());
  CHECK(r.trace.front().iteration == 0);
  for (size_t i = 1; i < r.trace.size(); ++i)
    CHECK(r.trace[i].iteration == static_cast<int>(i));

  save_trace_csv(r.trace, "tmp_trace.csv");
  std::ifstream is("tmp_trace.csv");
  std::string line;
  std::getline(is, line);
  CHECK(line == "# wdmopt trace v1");
  std::getline(is, line);
  CHECK(line == "iteration,cost,min_snr_dB,excursion_dB");
  std::remove("tmp_trace.csv");
}

TEST_CASE("strategy and cost names round-trip") {
  for (Strategy s : {Strategy::kFlatInputReference, Strategy::kFlatReceivedPower,
                     Strategy::kFlatSnrLinear, Strategy::kFlatSnrFull})
    CHECK(strategy_from_string(to_string(s)) == s);
  for (CostKind c : {CostKind::kMinSnr, CostKind::kThroughput, CostKind::kPsdFlatness})
    CHECK(cost_kind_from_string(to_string(c)) == c);
  CHECK_THROWS_AS(strategy_from_string("nope"), Error);
  CHECK(default_cost_for(Strategy::kFlatReceivedPower) == CostKind::kPsdFlatness);
  CHECK(default_cost_for(Strategy::kFlatSnrFull) == CostKind::kMinSnr);
}
