// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "testsupport.hpp"
#include "wdmopt/cascade.hpp"
#include "wdmopt/errors.hpp"
#include "wdmopt/rng.hpp"

using namespace wdmopt;
using wdmtest::rel_err;

namespace {

// Small synthetic link on an 8-channel grid with smooth stub surrogates.
LinkConfig make_stub_link(int spans, double fiber_km, bool srs, bool nli,
                          GffMode gff = GffMode::kNone) {
  const int n = 8;
  LinkConfig link;
  link.grid = std::make_shared<const ChannelGrid>(192.1, 500.0, n, 32.0);
  link.first_edfa_input_dbm = -2.0;
  link.b2b_snr_db.assign(static_cast<size_t>(n), 20.0);
  for (int i = 0; i < n; ++i) link.b2b_snr_db[static_cast<size_t>(i)] += 0.05 * i;

  std::vector<double> g0(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) g0[static_cast<size_t>(i)] = 1.5 - 0.4 * i;  // falling tilt
  std::vector<double> nf(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) nf[static_cast<size_t>(i)] = 5.0 + 0.1 * i;
  link.models.emplace("STUB", std::make_pair(wdmtest::linear_gain_stub(n, g0),
                                             wdmtest::constant_stub(ModelKind::kNf, n, nf)));

  SpanConfig s;
  s.edfa_id = "STUB";
  s.target_output_dbm = 18.0;
  s.fiber.length_km = fiber_km;
  s.fiber.attenuation_db_km = 0.2;
  s.fiber.beta2_ps2_km = -21.7;
  s.fiber.gamma_w_km = 1.3;
  s.fiber.raman_slope_w_km_thz = 0.028;
  s.fiber.raman_peak_shift_thz = 13.0;
  s.fiber.connector_loss_db = 0.5;
  s.include_srs = srs;
  s.include_nli = nli;
  s.gff = gff;
  link.spans.assign(static_cast<size_t>(spans), s);
  return link;
}

}  // namespace

TEST_CASE("degenerate noiseless span reproduces the B2B profile exactly") {
  // flat gain stub, NF = 1/G (zero ASE), zero-length fiber, no NLI
  const int n = 8;
  LinkConfig link;
  link.grid = std::make_shared<const ChannelGrid>(192.1, 500.0, n, 32.0);
  link.first_edfa_input_dbm = -2.0;
  link.b2b_snr_db = {20.0, 19.5, 21.0, 20.2, 19.8, 20.6, 20.1, 19.9};
  const double gain_db = 20.0;  // = 18 - (-2)
  link.models.emplace(
      "IDEAL", std::make_pair(wdmtest::linear_gain_stub(n, std::vector<double>(n, 0.0)),
                              wdmtest::constant_stub(ModelKind::kNf, n,
                                                     std::vector<double>(n, -gain_db))));
  SpanConfig s;
  s.edfa_id = "IDEAL";
  s.target_output_dbm = 18.0;
  s.fiber.length_km = 0.0;
  s.include_nli = false;
  s.include_srs = false;
  link.spans.push_back(s);

  CascadeEvaluator ev(link);
  SnrReport r = ev.simulate(PowerSpectrum::flat_total_dbm(link.grid, -2.0));
  for (int i = 0; i < n; ++i)
    CHECK(rel_err(r.snr_db[static_cast<size_t>(i)], link.b2b_snr_db[static_cast<size_t>(i)]) <
          1e-12);
}

TEST_CASE("single span matches the textbook OSNR composition") {
  const int n = 8;
  LinkConfig link;
  link.grid = std::make_shared<const ChannelGrid>(192.1, 500.0, n, 32.0);
  link.first_edfa_input_dbm = -2.0;
  link.b2b_snr_db.assign(static_cast<size_t>(n), 21.0);
  const double nf_db = 5.0;
  link.models.emplace(
      "STUB", std::make_pair(wdmtest::linear_gain_stub(n, std::vector<double>(n, 0.0)),
                             wdmtest::constant_stub(ModelKind::kNf, n,
                                                    std::vector<double>(n, nf_db))));
  SpanConfig s;
  s.edfa_id = "STUB";
  s.target_output_dbm = 18.0;
  s.fiber.length_km = 60.0;
  s.fiber.attenuation_db_km = 0.2;
  s.include_srs = false;
  s.include_nli = false;
  link.spans.push_back(s);

  CascadeEvaluator ev(link);
  SnrReport r = ev.simulate(PowerSpectrum::flat_total_dbm(link.grid, -2.0));

  // hand computation: flat gain 20 dB, per-channel EDFA output 18 dBm / 8
  const double rs = link.grid->symbol_rate_hz();
  for (int i = 0; i < n; ++i) {
    double g = std::pow(10.0, 20.0 / 10.0);
    double q = watt_from_dbm(18.0) / n;
    double h_nu = kPlanck * link.grid->frequency_hz(i);
    double rho = (linear_from_db(nf_db) - 1.0 / g) * g * h_nu;
    double snr = q / (rho * rs + q / linear_from_db(21.0));  // loss cancels
    CHECK(rel_err(r.snr_db[static_cast<size_t>(i)], db_from_linear(snr)) < 1e-9);
  }
}

TEST_CASE("report is self-consistent: SNR recomputable from its fields") {
  LinkConfig link = make_stub_link(3, 70.0, true, true);
  CascadeEvaluator ev(link);
  SnrReport r = ev.simulate(PowerSpectrum::flat_total_dbm(link.grid, -2.0));
  for (int i = 0; i < link.grid->count(); ++i) {
    size_t k = static_cast<size_t>(i);
    double denom = r.noise.ase_w[k] + r.noise.nli_w[k] + r.noise.impl_nsr[k] * r.received[i];
    CHECK(rel_err(r.snr_db[k], db_from_linear(r.received[i] / denom)) < 1e-12);
  }
  CHECK(r.span_output_dbm.size() == 3);
  r.noise.validate();
}

TEST_CASE("ideal GFF stage: flattening, gain and noise arithmetic") {
  auto grid = std::make_shared<const ChannelGrid>(193.0, 100.0, 3, 32.0);
  std::vector<double> psd{0.5e-3, 1e-3, 2e-3};
  NoiseSpectrum noise = NoiseSpectrum::zero(grid);
  noise.nli_w = {1e-7, 2e-7, 3e-7};
  apply_ideal_gff(psd, noise, *grid);

  // G_e = 4 (6 dB); flattened at the old maximum; attenuations [1, 2, 4]
  for (double v : psd) CHECK(rel_err(v, 2e-3) < 1e-12);
  const double rs = grid->symbol_rate_hz();
  for (int i = 0; i < 3; ++i) {
    size_t k = static_cast<size_t>(i);
    double a = 4.0 * (i == 0 ? 0.5e-3 : i == 1 ? 1e-3 : 2e-3) / 2e-3;
    CHECK(rel_err(a, i == 0 ? 1.0 : i == 1 ? 2.0 : 4.0) < 1e-12);
    double rho_e = 2.0 * kPlanck * grid->frequency_hz(i) * (4.0 - 1.0);
    CHECK(rel_err(noise.ase_w[k], rho_e * rs / a) < 1e-12);
    double want_nli = (i == 0 ? 1e-7 : i == 1 ? 2e-7 : 3e-7) * 4.0 / a;
    CHECK(rel_err(noise.nli_w[k], want_nli) < 1e-12);
  }

  // already flat: unity gain, zero added ASE
  std::vector<double> flat{1e-3, 1e-3, 1e-3};
  NoiseSpectrum n2 = NoiseSpectrum::zero(grid);
  apply_ideal_gff(flat, n2, *grid);
  for (double v : flat) CHECK(v == 1e-3);
  for (double v : n2.ase_w) CHECK(v == 0.0);
}

TEST_CASE("monotonicity: adding NLI or raising NF only degrades SNR") {
  LinkConfig with_nli = make_stub_link(2, 80.0, true, true);
  LinkConfig no_nli = make_stub_link(2, 80.0, true, false);
  PowerSpectrum input = PowerSpectrum::flat_total_dbm(with_nli.grid, -2.0);
  SnrReport a = CascadeEvaluator(with_nli).simulate(input);
  SnrReport b = CascadeEvaluator(no_nli).simulate(input);
  for (int i = 0; i < 8; ++i)
    CHECK(a.snr_db[static_cast<size_t>(i)] < b.snr_db[static_cast<size_t>(i)]);

  LinkConfig hot = make_stub_link(2, 80.0, true, true);
  const int n = hot.grid->count();
  std::vector<double> worse_nf(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) worse_nf[static_cast<size_t>(i)] = 6.0 + 0.1 * i;  // +1 dB
  hot.models.at("STUB").second = wdmtest::constant_stub(ModelKind::kNf, n, worse_nf);
  SnrReport c = CascadeEvaluator(hot).simulate(input);
  for (int i = 0; i < n; ++i)
    CHECK(c.snr_db[static_cast<size_t>(i)] < a.snr_db[static_cast<size_t>(i)]);
}

TEST_CASE("identical spans with lossless fiber reach a per-span fixed point") {
  const int n = 8;
  LinkConfig link;
  link.grid = std::make_shared<const ChannelGrid>(192.1, 500.0, n, 32.0);
  link.first_edfa_input_dbm = 0.0;
  link.b2b_snr_db.assign(static_cast<size_t>(n), 20.0);
  std::vector<double> shape(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) shape[static_cast<size_t>(i)] = -0.3 * i;
  link.models.emplace(
      "CONST", std::make_pair(wdmtest::constant_stub(ModelKind::kGain, n, shape),
                              wdmtest::constant_stub(ModelKind::kNf, n,
                                                     std::vector<double>(n, 5.0))));
  SpanConfig s;
  s.edfa_id = "CONST";
  s.target_output_dbm = 18.0;
  s.fiber.length_km = 10.0;
  s.fiber.attenuation_db_km = 0.0;
  s.fiber.connector_loss_db = 0.0;
  s.include_srs = false;
  s.include_nli = false;
  link.spans.assign(4, s);

  CascadeEvaluator ev(link);
  SnrReport r = ev.simulate(PowerSpectrum::flat_total_dbm(link.grid, 0.0));
  for (size_t span = 1; span + 1 < r.span_output_dbm.size(); ++span)
    for (int i = 0; i < n; ++i)
      CHECK(rel_err(r.span_output_dbm[span + 1][static_cast<size_t>(i)],
                    r.span_output_dbm[span][static_cast<size_t>(i)]) < 1e-12);
}

TEST_CASE("reverse-mode input gradients match finite differences (all variants)") {
  for (bool srs : {false, true}) {
    for (bool nli : {false, true}) {
      LinkConfig link = make_stub_link(3, 60.0, srs, nli);
      CascadeEvaluator ev(link);
      const int n = link.grid->count();

      // tilted input so no peak-normalization or GFF ties
      std::vector<double> input_w(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i)
        input_w[static_cast<size_t>(i)] = watt_from_dbm(-12.0 + 0.35 * i);

      Rng rng(17);
      std::vector<double> seed_snr(static_cast<size_t>(n));
      for (double& v : seed_snr) v = rng.uniform(-1.0, 1.0);

      auto scalar = [&](const std::vector<double>& x) {
        CascadeTape tape;
        SnrReport r = ev.simulate_taped(x, ModelFlags{}, tape);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += seed_snr[static_cast<size_t>(i)] * r.snr_db[static_cast<size_t>(i)];
        return acc;
      };
      CascadeTape tape;
      ev.simulate_taped(input_w, ModelFlags{}, tape);
      std::vector<double> grad = ev.backprop(tape, seed_snr, {});
      for (int i = 0; i < n; i += 3) {
        double fd = wdmtest::central_diff(scalar, input_w, static_cast<size_t>(i),
                                          input_w[static_cast<size_t>(i)] * 1e-6);
        CAPTURE(srs);
        CAPTURE(nli);
        CAPTURE(i);
        CHECK(rel_err(grad[static_cast<size_t>(i)], fd) < 1e-3);
      }
    }
  }
}

TEST_CASE("reverse-mode gradients through the ideal GFF stage") {
  LinkConfig link = make_stub_link(2, 50.0, true, true, GffMode::kIdeal);
  CascadeEvaluator ev(link);
  const int n = link.grid->count();
  std::vector<double> input_w(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) input_w[static_cast<size_t>(i)] = watt_from_dbm(-13.0 + 0.45 * i);

  std::vector<double> seed_dbm(static_cast<size_t>(n));
  Rng rng(23);
  for (double& v : seed_dbm) v = rng.uniform(-0.5, 1.0);

  auto scalar = [&](const std::vector<double>& x) {
    CascadeTape tape;
    SnrReport r = ev.simulate_taped(x, ModelFlags{}, tape);
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += seed_dbm[static_cast<size_t>(i)] * dbm_from_watt(r.received[i]);
    return acc;
  };
  CascadeTape tape;
  ev.simulate_taped(input_w, ModelFlags{}, tape);
  std::vector<double> grad = ev.backprop(tape, {}, seed_dbm);
  for (int i = 0; i < n; i += 2) {
    double fd = wdmtest::central_diff(scalar, input_w, static_cast<size_t>(i),
                                      input_w[static_cast<size_t>(i)] * 1e-6);
    CHECK(rel_err(grad[static_cast<size_t>(i)], fd) < 1e-3);
  }
}

TEST_CASE("model flags switch SRS and NLI off during simulation") {
  LinkConfig link = make_stub_link(2, 80.0, true, true);
  CascadeEvaluator ev(link);
  PowerSpectrum input = PowerSpectrum::flat_total_dbm(link.grid, -2.0);
  SnrReport full = ev.simulate(input, ModelFlags{true, true});
  SnrReport bare = ev.simulate(input, ModelFlags{false, false});
  for (double v : bare.noise.nli_w) CHECK(v == 0.0);
  // with SRS off, the received comb keeps the EDFA shape scaled by flat loss
  CHECK(bare.snr_db != full.snr_db);
}

TEST_CASE("link config file: loading, validation errors") {
  // write models + config to temp files
  const int n = 8;
  std::vector<double> g0(static_cast<size_t>(n), 0.0);
  save_model(wdmtest::linear_gain_stub(n, g0), "tmp_gain_model.txt");
  save_model(wdmtest::constant_stub(ModelKind::kNf, n, std::vector<double>(n, 5.0)),
             "tmp_nf_model.txt");
  {
    std::ofstream os("tmp_b2b.txt");
    os << "# wdmopt spectrum v1\n192.1 20\n195.6 21\n";
  }
  {
    std::ofstream os("tmp_link.txt");
    os << "# wdmopt link v1\n";
    os << "grid 8 192.1 500 32\n";
    os << "first_input_dbm -2\n";
    os << "b2b_file tmp_b2b.txt\n";
    os << "edfa A1 tmp_gain_model.txt tmp_nf_model.txt\n";
    os << "fiber attenuation_db_km=0.2 beta2_ps2_km=-21.7 gamma_w_km=1.3"
          " raman_slope_w_km_thz=0.028 raman_peak_shift_thz=13 connector_loss_db=0.5\n";
    os << "span edfa=A1 target_output_dbm=18 length_km=80\n";
    os << "span edfa=A1 target_output_dbm=17 length_km=60 srs=off nli=off gff=ideal\n";
  }
  LinkConfig link = load_link("tmp_link.txt");
  CHECK(link.spans.size() == 2);
  CHECK(link.spans[0].fiber.length_km == 80.0);
  CHECK(link.spans[0].include_srs);
  CHECK(!link.spans[1].include_srs);
  CHECK(link.spans[1].gff == GffMode::kIdeal);
  CHECK(link.spans[1].target_output_dbm == 17.0);
  CHECK(link.b2b_snr_db[0] == 20.0);       // clamped end
  CHECK(link.b2b_snr_db[7] > 20.9);        // interpolated toward 21
  CascadeEvaluator ev(link);               // construct + validate
  SnrReport r = ev.simulate(PowerSpectrum::flat_total_dbm(link.grid, -2.0));
  CHECK(r.snr_db.size() == 8);

  {
    std::ofstream os("tmp_link_bad.txt");
    os << "# wdmopt link v1\ngrid 8 192.1 500 32\nfirst_input_dbm -2\n";
    os << "b2b_file tmp_b2b.txt\nedfa A1 tmp_gain_model.txt tmp_nf_model.txt\n";
    os << "fiber attenuation_db_km=0.2\n";
    os << "span edfa=A1 target_output_dbm=19 length_km=80\n";  // above device max
  }
  CHECK_THROWS_AS(load_link("tmp_link_bad.txt"), Error);
  for (const char* f : {"tmp_gain_model.txt", "tmp_nf_model.txt", "tmp_b2b.txt", "tmp_link.txt",
                        "tmp_link_bad.txt"})
    std::remove(f);
}

TEST_CASE("report CSV uses the documented columns") {
  LinkConfig link = make_stub_link(1, 40.0, true, true);
  SnrReport r = CascadeEvaluator(link).simulate(PowerSpectrum::flat_total_dbm(link.grid, -2.0));
  save_snr_report_csv(r, "tmp_report.csv");
  std::ifstream is("tmp_report.csv");
  std::string line;
  std::getline(is, line);
  CHECK(line == "# wdmopt report v1");
  std::getline(is, line);
  CHECK(line == "channel,frequency_THz,received_dBm,ase_W,nli_W,snr_dB");
  int rows = 0;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 8);
  std::remove("tmp_report.csv");
}
