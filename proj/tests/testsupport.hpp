// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "wdmopt/grid.hpp"
#include "wdmopt/surrogate.hpp"

namespace wdmtest {

inline std::string data_path(const std::string& name) {
  return std::string(WDMOPT_DATA_DIR) + "/" + name;
}

inline double rel_err(double got, double want) {
  double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

// Central finite difference of a scalar function of one coordinate.
inline double central_diff(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> x, size_t i, double h) {
  x[i] += h;
  double up = f(x);
  x[i] -= 2.0 * h;
  double dn = f(x);
  return (up - dn) / (2.0 * h);
}

// Exactly linear gain surrogate: predicted normalized output = input + g0.
// The hidden bias keeps every ReLU active, so the map is smooth everywhere.
inline wdmopt::SurrogateModel linear_gain_stub(int channels, const std::vector<double>& g0_db) {
  wdmopt::SurrogateModel m;
  m.kind = wdmopt::ModelKind::kGain;
  m.input_dim = channels + 2;
  m.hidden_dim = channels;
  m.output_dim = channels;
  m.feature_mean.assign(static_cast<size_t>(m.input_dim), 0.0);
  m.feature_scale.assign(static_cast<size_t>(m.input_dim), 1.0);
  const double c = 1000.0;
  m.w1.assign(static_cast<size_t>(m.hidden_dim) * static_cast<size_t>(m.input_dim), 0.0);
  m.b1.assign(static_cast<size_t>(m.hidden_dim), c);
  m.w2.assign(static_cast<size_t>(m.output_dim) * static_cast<size_t>(m.hidden_dim), 0.0);
  m.b2.assign(static_cast<size_t>(m.output_dim), 0.0);
  for (int i = 0; i < channels; ++i) {
    m.w1[static_cast<size_t>(i) * static_cast<size_t>(m.input_dim) + static_cast<size_t>(i)] = 1.0;
    m.w2[static_cast<size_t>(i) * static_cast<size_t>(m.hidden_dim) + static_cast<size_t>(i)] = 1.0;
    m.b2[static_cast<size_t>(i)] = g0_db[static_cast<size_t>(i)] - c;
  }
  m.tin_min_dbm = -1e9;
  m.tin_max_dbm = 1e9;
  m.tout_min_dbm = -1e9;
  m.tout_max_dbm = 1e9;
  m.max_input_excursion_db = 1e9;
  return m;
}

// Constant-output surrogate (e.g. a fixed NF profile in dB).
inline wdmopt::SurrogateModel constant_stub(wdmopt::ModelKind kind, int channels,
                                            const std::vector<double>& out_db) {
  wdmopt::SurrogateModel m;
  m.kind = kind;
  m.input_dim = channels + 2;
  m.hidden_dim = 1;
  m.output_dim = channels;
  m.feature_mean.assign(static_cast<size_t>(m.input_dim), 0.0);
  m.feature_scale.assign(static_cast<size_t>(m.input_dim), 1.0);
  m.w1.assign(static_cast<size_t>(m.input_dim), 0.0);
  m.b1.assign(1, 0.0);
  m.w2.assign(static_cast<size_t>(channels), 0.0);
  m.b2 = out_db;
  m.tin_min_dbm = -1e9;
  m.tin_max_dbm = 1e9;
  m.tout_min_dbm = -1e9;
  m.tout_max_dbm = 1e9;
  m.max_input_excursion_db = 1e9;
  return m;
}

}  // namespace wdmtest
