// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "testsupport.hpp"
#include "wdmopt/errors.hpp"
#include "wdmopt/grid.hpp"

using namespace wdmopt;
using wdmtest::rel_err;

TEST_CASE("standard C-band grid") {
  auto grid = ChannelGrid::standard_cband();
  CHECK(grid->count() == 40);
  CHECK(grid->frequency_thz(0) == doctest::Approx(192.1));
  CHECK(grid->frequency_thz(39) == doctest::Approx(196.0));
  CHECK(grid->spacing_ghz() == 100.0);
  CHECK(grid->symbol_rate_gbd() == 32.0);
  for (int i = 1; i < 40; ++i)
    CHECK(grid->frequency_thz(i) - grid->frequency_thz(i - 1) == doctest::Approx(0.1));
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(ChannelGrid(193.0, 100.0, 0, 32.0), Error);
  CHECK_THROWS_AS(ChannelGrid(193.0, 100.0, 4, 0.0), Error);
  CHECK_THROWS_AS(ChannelGrid(193.0, 32.0, 4, 64.0), Error);  // symbol rate > spacing
}

TEST_CASE("dBm conversions") {
  CHECK(dbm_from_watt(1e-3) == 0.0);                                // 1 mW
  CHECK(dbm_from_watt(100e-3) == doctest::Approx(20.0));            // decade
  CHECK(dbm_from_watt(0.5e-3) == doctest::Approx(-3.0102999566));   // 10 log10(0.5)
  CHECK_THROWS_AS(dbm_from_watt(0.0), Error);
  CHECK_THROWS_AS(dbm_from_watt(-1.0), Error);
}

TEST_CASE("dB <-> linear round trip") {
  auto grid = std::make_shared<const ChannelGrid>(193.0, 100.0, 5, 32.0);
  PowerSpectrum s(grid, Domain::kDb, {-3.0, 0.0, 2.5, -11.0, 7.25});
  PowerSpectrum back = to_db(to_linear(s));
  for (int i = 0; i < 5; ++i) CHECK(rel_err(back[i], s[i]) < 1e-12);
  CHECK(back.grid().get() == s.grid().get());  // no silent regridding
  CHECK_THROWS_AS(to_db(s), Error);            // wrong domain tag
  CHECK(rel_err(to_linear(s).total_watt(), s.total_watt()) < 1e-12);
}

TEST_CASE("normalize_peak") {
  auto grid = std::make_shared<const ChannelGrid>(193.0, 100.0, 3, 32.0);
  auto [norm, offset] = normalize_peak(PowerSpectrum(grid, Domain::kDb, {9.0, 10.0, 7.0}));
  CHECK(norm.values() == std::vector<double>{-1.0, 0.0, -3.0});
  CHECK(offset == 10.0);

  auto [again, offset2] = normalize_peak(norm);
  CHECK(again.values() == norm.values());
  CHECK(offset2 == 0.0);

  auto [flat, offset3] = normalize_peak(PowerSpectrum(grid, Domain::kDb, {0.0, 0.0, 0.0}));
  CHECK(flat.values() == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(offset3 == 0.0);

  // adding the offset back reproduces the input
  PowerSpectrum restored = norm;
  for (double& v : restored.values()) v += offset;
  for (int i = 0; i < 3; ++i) CHECK(std::abs(restored[i] - 9.0 - (i == 1 ? 1.0 : (i == 2 ? -2.0 : 0.0))) < 1e-12);
  CHECK(norm.grid().get() == grid.get());
}

TEST_CASE("normalize_total") {
  auto grid = std::make_shared<const ChannelGrid>(193.0, 100.0, 2, 32.0);

  PowerSpectrum a(grid, Domain::kLinear, {1e-3, 1e-3});
  PowerSpectrum a4 = normalize_total(a, dbm_from_watt(4e-3));
  CHECK(rel_err(a4[0], 2e-3) < 1e-9);
  CHECK(rel_err(a4[1], 2e-3) < 1e-9);

  PowerSpectrum b(grid, Domain::kLinear, {1e-3, 3e-3});
  PowerSpectrum b_same = normalize_total(b, dbm_from_watt(4e-3));
  CHECK(rel_err(b_same[0], 1e-3) < 1e-9);
  CHECK(rel_err(b_same[1], 3e-3) < 1e-9);

  PowerSpectrum c(grid, Domain::kLinear, {2e-3, 6e-3});
  PowerSpectrum c2 = normalize_total(c, dbm_from_watt(2e-3));
  CHECK(rel_err(c2[0], 0.5e-3) < 1e-9);
  CHECK(rel_err(c2[1], 1.5e-3) < 1e-9);

  // idempotence and total contract
  PowerSpectrum once = normalize_total(b, 5.0);
  PowerSpectrum twice = normalize_total(once, 5.0);
  CHECK(rel_err(once.total_watt(), watt_from_dbm(5.0)) < 1e-9);
  for (int i = 0; i < 2; ++i) CHECK(rel_err(twice[i], once[i]) < 1e-12);
  // shape preserved
  CHECK(rel_err(once[1] / once[0], 3.0) < 1e-12);
  // dB-domain input comes back in dB
  PowerSpectrum d = normalize_total(PowerSpectrum(grid, Domain::kDb, {0.0, 3.0}), 10.0);
  CHECK(d.domain() == Domain::kDb);
  CHECK(rel_err(d.total_watt(), watt_from_dbm(10.0)) < 1e-9);
}

TEST_CASE("flat spectra constructors") {
  auto grid = ChannelGrid::standard_cband();
  PowerSpectrum f = PowerSpectrum::flat_total_dbm(grid, -2.0);
  CHECK(rel_err(f.total_watt(), watt_from_dbm(-2.0)) < 1e-12);
  for (int i = 1; i < f.count(); ++i) CHECK(f[i] == f[0]);
}

TEST_CASE("noise spectrum validation") {
  auto grid = std::make_shared<const ChannelGrid>(193.0, 100.0, 2, 32.0);
  NoiseSpectrum n = NoiseSpectrum::zero(grid);
  n.validate();
  n.ase_w[0] = -1e-9;
  CHECK_THROWS_AS(n.validate(), Error);
}

TEST_CASE("spectrum file round trip and grid/spectrum IO errors") {
  auto grid = std::make_shared<const ChannelGrid>(193.0, 100.0, 3, 32.0);
  PowerSpectrum s(grid, Domain::kDb, {-1.25, 0.5, 3.75});
  std::string path = "test_spectrum_tmp.txt";
  save_spectrum_dbm(s, path);
  PowerSpectrum r = load_spectrum_dbm(path, grid);
  for (int i = 0; i < 3; ++i) CHECK(r[i] == s[i]);

  // wrong grid: frequencies do not line up
  auto other = std::make_shared<const ChannelGrid>(190.0, 100.0, 3, 32.0);
  CHECK_THROWS_AS(load_spectrum_dbm(path, other), Error);
  std::remove(path.c_str());
}

TEST_CASE("sparse dB profile interpolation") {
  auto grid = std::make_shared<const ChannelGrid>(193.0, 100.0, 5, 32.0);
  std::string path = "test_b2b_tmp.txt";
  {
    std::ofstream os(path);
    os << "# wdmopt spectrum v1\n193.1 10\n193.3 12\n";
  }
  std::vector<double> v = load_profile_db_interpolated(path, *grid);
  CHECK(v[0] == 10.0);  // clamped below
  CHECK(v[1] == 10.0);
  CHECK(v[2] == doctest::Approx(11.0));  // midpoint
  CHECK(v[3] == 12.0);
  CHECK(v[4] == 12.0);  // clamped above
  std::remove(path.c_str());
}

TEST_CASE("version line enforcement") {
  std::string path = "test_badversion_tmp.txt";
  {
    std::ofstream os(path);
    os << "# wdmopt spectrum v9\n193.0 1\n";
  }
  auto grid = std::make_shared<const ChannelGrid>(193.0, 100.0, 1, 32.0);
  CHECK_THROWS_AS(load_spectrum_dbm(path, grid), Error);
  std::remove(path.c_str());
}
