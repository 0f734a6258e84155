// SPDX-License-Identifier: Apache-2.0
#include "wdmopt/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wdmopt/errors.hpp"
#include "wdmopt/rng.hpp"
#include "wdmopt/textio.hpp"

namespace wdmopt {

std::string to_string(ModelKind kind) { return kind == ModelKind::kGain ? "gain" : "nf"; }

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "gain") return ModelKind::kGain;
  if (s == "nf") return ModelKind::kNf;
  fail(ErrorCode::kInvalidArgument, "unknown model kind '" + s + "' (want gain|nf)");
}

void SurrogateModel::forward(const double* features, double* out) const {
  std::vector<double> pre(static_cast<size_t>(hidden_dim));
  forward_cached(features, pre.data(), out);
}

void SurrogateModel::forward_cached(const double* features, double* hidden_pre,
                                    double* out) const {
  std::vector<double> z(static_cast<size_t>(input_dim));
  for (int i = 0; i < input_dim; ++i)
    z[static_cast<size_t>(i)] =
        (features[i] - feature_mean[static_cast<size_t>(i)]) / feature_scale[static_cast<size_t>(i)];
  for (int h = 0; h < hidden_dim; ++h) {
    const double* row = &w1[static_cast<size_t>(h) * static_cast<size_t>(input_dim)];
    double acc = b1[static_cast<size_t>(h)];
    for (int i = 0; i < input_dim; ++i) acc += row[i] * z[static_cast<size_t>(i)];
    hidden_pre[h] = acc;
  }
  for (int o = 0; o < output_dim; ++o) {
    const double* row = &w2[static_cast<size_t>(o) * static_cast<size_t>(hidden_dim)];
    double acc = b2[static_cast<size_t>(o)];
    for (int h = 0; h < hidden_dim; ++h) acc += row[h] * std::max(hidden_pre[h], 0.0);
    out[o] = acc;
  }
}

void SurrogateModel::backward_features(const double* /*features*/, const double* hidden_pre,
                                       const double* grad_out, double* grad_features) const {
  std::vector<double> gh(static_cast<size_t>(hidden_dim), 0.0);
  for (int o = 0; o < output_dim; ++o) {
    const double g = grad_out[o];
    if (g == 0.0) continue;
    const double* row = &w2[static_cast<size_t>(o) * static_cast<size_t>(hidden_dim)];
    for (int h = 0; h < hidden_dim; ++h) gh[static_cast<size_t>(h)] += g * row[h];
  }
  for (int h = 0; h < hidden_dim; ++h)
    if (hidden_pre[h] <= 0.0) gh[static_cast<size_t>(h)] = 0.0;
  for (int i = 0; i < input_dim; ++i) {
    double acc = 0.0;
    for (int h = 0; h < hidden_dim; ++h)
      acc += gh[static_cast<size_t>(h)] * w1[static_cast<size_t>(h) * static_cast<size_t>(input_dim) + static_cast<size_t>(i)];
    grad_features[i] += acc / feature_scale[static_cast<size_t>(i)];
  }
}

bool SurrogateModel::in_envelope(const std::vector<double>& normalized_db, double tin_dbm,
                                 double tout_dbm) const {
  constexpr double eps = 1e-9;
  if (tin_dbm < tin_min_dbm - eps || tin_dbm > tin_max_dbm + eps) return false;
  if (tout_dbm < tout_min_dbm - eps || tout_dbm > tout_max_dbm + eps) return false;
  auto [mn, mx] = std::minmax_element(normalized_db.begin(), normalized_db.end());
  return (*mx - *mn) <= max_input_excursion_db + eps;
}

SampleFeatures featurize(const CharacterizationSample& s, ModelKind kind) {
  SampleFeatures out;
  size_t n = s.input_dbm.size();
  double in_peak = *std::max_element(s.input_dbm.begin(), s.input_dbm.end());
  out.features.resize(n + 2);
  for (size_t i = 0; i < n; ++i) out.features[i] = s.input_dbm[i] - in_peak;
  out.features[n] = s.total_input_dbm;
  out.features[n + 1] = s.total_output_dbm;
  if (kind == ModelKind::kGain) {
    std::vector<double> output_dbm(n);
    for (size_t i = 0; i < n; ++i) output_dbm[i] = s.input_dbm[i] + s.gain_db[i];
    double out_peak = *std::max_element(output_dbm.begin(), output_dbm.end());
    out.target.resize(n);
    for (size_t i = 0; i < n; ++i) out.target[i] = output_dbm[i] - out_peak;
  } else {
    out.target = s.nf_db;
  }
  return out;
}

namespace {

struct AdamState {
  std::vector<double> m, v;
  explicit AdamState(size_t n) : m(n, 0.0), v(n, 0.0) {}
};

void adam_step(std::vector<double>& w, const std::vector<double>& grad, AdamState& st, int t,
               double lr) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  const double bc1 = 1.0 - std::pow(beta1, t);
  const double bc2 = 1.0 - std::pow(beta2, t);
  for (size_t i = 0; i < w.size(); ++i) {
    st.m[i] = beta1 * st.m[i] + (1.0 - beta1) * grad[i];
    st.v[i] = beta2 * st.v[i] + (1.0 - beta2) * grad[i] * grad[i];
    w[i] -= lr * (st.m[i] / bc1) / (std::sqrt(st.v[i] / bc2) + eps);
  }
}

double validation_mse(const SurrogateModel& m, const std::vector<SampleFeatures>& val) {
  if (val.empty()) return 0.0;
  std::vector<double> out(static_cast<size_t>(m.output_dim));
  double acc = 0.0;
  for (const auto& s : val) {
    m.forward(s.features.data(), out.data());
    for (int o = 0; o < m.output_dim; ++o) {
      double d = out[static_cast<size_t>(o)] - s.target[static_cast<size_t>(o)];
      acc += d * d;
    }
  }
  return acc / (static_cast<double>(val.size()) * m.output_dim);
}

}  // namespace

TrainResult train(const Dataset& dataset, ModelKind kind, const TrainOptions& opts,
                  std::uint64_t seed) {
  if (dataset.samples.empty()) fail(ErrorCode::kInvalidArgument, "empty training dataset");
  const int n_ch = dataset.channel_count();
  const int in_dim = n_ch + 2;

  // Split by profile so no shape is shared between train and validation.
  std::vector<std::pair<std::string, int>> profiles;
  for (const auto& s : dataset.samples) {
    std::pair<std::string, int> key{s.unit_id, s.profile_index};
    if (std::find(profiles.begin(), profiles.end(), key) == profiles.end())
      profiles.push_back(key);
  }
  Rng rng(seed);
  for (size_t i = profiles.size(); i > 1; --i)
    std::swap(profiles[i - 1], profiles[static_cast<size_t>(rng.below(i))]);
  size_t n_val_profiles = std::max<size_t>(
      profiles.size() > 1 ? 1 : 0,
      static_cast<size_t>(std::floor(opts.validation_fraction * static_cast<double>(profiles.size()))));
  std::vector<std::pair<std::string, int>> val_profiles(profiles.begin(),
                                                        profiles.begin() + static_cast<long>(n_val_profiles));

  std::vector<SampleFeatures> train_set, val_set;
  for (const auto& s : dataset.samples) {
    std::pair<std::string, int> key{s.unit_id, s.profile_index};
    bool is_val = std::find(val_profiles.begin(), val_profiles.end(), key) != val_profiles.end();
    (is_val ? val_set : train_set).push_back(featurize(s, kind));
  }
  if (train_set.empty()) fail(ErrorCode::kInvalidArgument, "training split is empty");

  SurrogateModel model;
  model.kind = kind;
  model.input_dim = in_dim;
  model.hidden_dim = opts.hidden_dim;
  model.output_dim = n_ch;
  model.train_seed = seed;

  // Feature statistics from the training split only.
  model.feature_mean.assign(static_cast<size_t>(in_dim), 0.0);
  model.feature_scale.assign(static_cast<size_t>(in_dim), 1.0);
  for (const auto& s : train_set)
    for (int i = 0; i < in_dim; ++i) model.feature_mean[static_cast<size_t>(i)] += s.features[static_cast<size_t>(i)];
  for (double& v : model.feature_mean) v /= static_cast<double>(train_set.size());
  std::vector<double> var(static_cast<size_t>(in_dim), 0.0);
  for (const auto& s : train_set)
    for (int i = 0; i < in_dim; ++i) {
      double d = s.features[static_cast<size_t>(i)] - model.feature_mean[static_cast<size_t>(i)];
      var[static_cast<size_t>(i)] += d * d;
    }
  for (int i = 0; i < in_dim; ++i) {
    double sd = std::sqrt(var[static_cast<size_t>(i)] / static_cast<double>(train_set.size()));
    model.feature_scale[static_cast<size_t>(i)] = sd > 1e-8 ? sd : 1.0;
  }

  // Envelope metadata.
  model.tin_min_dbm = 1e30; model.tin_max_dbm = -1e30;
  model.tout_min_dbm = 1e30; model.tout_max_dbm = -1e30;
  model.max_input_excursion_db = 0.0;
  for (const auto& s : train_set) {
    double tin = s.features[static_cast<size_t>(n_ch)];
    double tout = s.features[static_cast<size_t>(n_ch) + 1];
    model.tin_min_dbm = std::min(model.tin_min_dbm, tin);
    model.tin_max_dbm = std::max(model.tin_max_dbm, tin);
    model.tout_min_dbm = std::min(model.tout_min_dbm, tout);
    model.tout_max_dbm = std::max(model.tout_max_dbm, tout);
    auto [mn, mx] = std::minmax_element(s.features.begin(), s.features.begin() + n_ch);
    model.max_input_excursion_db = std::max(model.max_input_excursion_db, *mx - *mn);
  }

  // He-uniform / Glorot-uniform initialization.
  const int h_dim = opts.hidden_dim;
  model.w1.resize(static_cast<size_t>(h_dim) * static_cast<size_t>(in_dim));
  model.b1.assign(static_cast<size_t>(h_dim), 0.0);
  model.w2.resize(static_cast<size_t>(n_ch) * static_cast<size_t>(h_dim));
  model.b2.assign(static_cast<size_t>(n_ch), 0.0);
  double lim1 = std::sqrt(6.0 / in_dim);
  for (double& w : model.w1) w = rng.uniform(-lim1, lim1);
  double lim2 = std::sqrt(6.0 / (h_dim + n_ch));
  for (double& w : model.w2) w = rng.uniform(-lim2, lim2);

  TrainResult result;
  result.best_validation_mse = validation_mse(model, val_set);
  result.best_epoch = 0;
  result.model = model;

  AdamState st_w1(model.w1.size()), st_b1(model.b1.size()), st_w2(model.w2.size()),
      st_b2(model.b2.size());
  std::vector<double> g_w1(model.w1.size()), g_b1(model.b1.size()), g_w2(model.w2.size()),
      g_b2(model.b2.size());
  std::vector<size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> pre(static_cast<size_t>(h_dim)), act(static_cast<size_t>(h_dim)),
      out(static_cast<size_t>(n_ch)), gout(static_cast<size_t>(n_ch)),
      ghid(static_cast<size_t>(h_dim)), z(static_cast<size_t>(in_dim));
  int adam_t = 0;
  int since_best = 0;

  for (int epoch = 1; epoch <= opts.max_epochs; ++epoch) {
    for (size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<size_t>(rng.below(i))]);

    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(opts.batch_size)) {
      size_t stop = std::min(order.size(), start + static_cast<size_t>(opts.batch_size));
      double batch_n = static_cast<double>(stop - start);
      std::fill(g_w1.begin(), g_w1.end(), 0.0);
      std::fill(g_b1.begin(), g_b1.end(), 0.0);
      std::fill(g_w2.begin(), g_w2.end(), 0.0);
      std::fill(g_b2.begin(), g_b2.end(), 0.0);
      double batch_loss = 0.0;

      for (size_t bi = start; bi < stop; ++bi) {
        const SampleFeatures& s = train_set[order[bi]];
        for (int i = 0; i < in_dim; ++i)
          z[static_cast<size_t>(i)] = (s.features[static_cast<size_t>(i)] - model.feature_mean[static_cast<size_t>(i)]) /
                                      model.feature_scale[static_cast<size_t>(i)];
        for (int h = 0; h < h_dim; ++h) {
          const double* row = &model.w1[static_cast<size_t>(h) * static_cast<size_t>(in_dim)];
          double acc = model.b1[static_cast<size_t>(h)];
          for (int i = 0; i < in_dim; ++i) acc += row[i] * z[static_cast<size_t>(i)];
          pre[static_cast<size_t>(h)] = acc;
          act[static_cast<size_t>(h)] = acc > 0.0 ? acc : 0.0;
        }
        for (int o = 0; o < n_ch; ++o) {
          const double* row = &model.w2[static_cast<size_t>(o) * static_cast<size_t>(h_dim)];
          double acc = model.b2[static_cast<size_t>(o)];
          for (int h = 0; h < h_dim; ++h) acc += row[h] * act[static_cast<size_t>(h)];
          out[static_cast<size_t>(o)] = acc;
        }
        // d(mse)/d(out), averaged over outputs and batch
        std::fill(ghid.begin(), ghid.end(), 0.0);
        for (int o = 0; o < n_ch; ++o) {
          double d = out[static_cast<size_t>(o)] - s.target[static_cast<size_t>(o)];
          batch_loss += d * d;
          gout[static_cast<size_t>(o)] = 2.0 * d / (batch_n * n_ch);
        }
        for (int o = 0; o < n_ch; ++o) {
          const double g = gout[static_cast<size_t>(o)];
          double* wrow = &g_w2[static_cast<size_t>(o) * static_cast<size_t>(h_dim)];
          const double* row = &model.w2[static_cast<size_t>(o) * static_cast<size_t>(h_dim)];
          for (int h = 0; h < h_dim; ++h) {
            wrow[h] += g * act[static_cast<size_t>(h)];
            ghid[static_cast<size_t>(h)] += g * row[h];
          }
          g_b2[static_cast<size_t>(o)] += g;
        }
        for (int h = 0; h < h_dim; ++h) {
          if (pre[static_cast<size_t>(h)] <= 0.0) continue;
          const double g = ghid[static_cast<size_t>(h)];
          double* wrow = &g_w1[static_cast<size_t>(h) * static_cast<size_t>(in_dim)];
          for (int i = 0; i < in_dim; ++i) wrow[i] += g * z[static_cast<size_t>(i)];
          g_b1[static_cast<size_t>(h)] += g;
        }
      }
      if (!std::isfinite(batch_loss))
        fail(ErrorCode::kDiverged, "training loss became non-finite at epoch " +
                                       std::to_string(epoch));
      ++adam_t;
      adam_step(model.w1, g_w1, st_w1, adam_t, opts.learning_rate);
      adam_step(model.b1, g_b1, st_b1, adam_t, opts.learning_rate);
      adam_step(model.w2, g_w2, st_w2, adam_t, opts.learning_rate);
      adam_step(model.b2, g_b2, st_b2, adam_t, opts.learning_rate);
    }

    double val_mse = validation_mse(model, val_set);
    if (!std::isfinite(val_mse))
      fail(ErrorCode::kDiverged, "validation loss became non-finite at epoch " +
                                     std::to_string(epoch));
    result.epochs_run = epoch;
    if (val_mse < result.best_validation_mse) {
      result.best_validation_mse = val_mse;
      result.best_epoch = epoch;
      result.model = model;
      since_best = 0;
    } else if (++since_best >= opts.plateau_epochs) {
      break;
    }
  }
  return result;
}

std::vector<double> predict_gain(const SurrogateModel& m,
                                 const std::vector<double>& input_normalized_db, double tin_dbm,
                                 double tout_dbm, bool* envelope_warning) {
  if (m.kind != ModelKind::kGain) fail(ErrorCode::kInvalidArgument, "model is not a gain model");
  if (static_cast<int>(input_normalized_db.size()) != m.channels())
    fail(ErrorCode::kInvalidArgument, "input length does not match model");
  if (envelope_warning) *envelope_warning = !m.in_envelope(input_normalized_db, tin_dbm, tout_dbm);

  std::vector<double> features(input_normalized_db);
  features.push_back(tin_dbm);
  features.push_back(tout_dbm);
  std::vector<double> y(static_cast<size_t>(m.output_dim));
  m.forward(features.data(), y.data());

  // Recover absolute offsets from the totals: x + (tin - 10log10 sum 10^(x/10))
  // is the absolute input, and likewise for the predicted output shape.
  double sum_in = 0.0, sum_out = 0.0;
  for (int i = 0; i < m.channels(); ++i) {
    sum_in += linear_from_db(input_normalized_db[static_cast<size_t>(i)]);
    sum_out += linear_from_db(y[static_cast<size_t>(i)]);
  }
  double in_offset = tin_dbm - db_from_linear(sum_in);
  double out_offset = tout_dbm - db_from_linear(sum_out);
  std::vector<double> gain(static_cast<size_t>(m.channels()));
  for (int i = 0; i < m.channels(); ++i)
    gain[static_cast<size_t>(i)] = (y[static_cast<size_t>(i)] + out_offset) -
                                   (input_normalized_db[static_cast<size_t>(i)] + in_offset);
  return gain;
}

std::vector<double> predict_nf(const SurrogateModel& m,
                               const std::vector<double>& input_normalized_db, double tin_dbm,
                               double tout_dbm, bool* envelope_warning) {
  if (m.kind != ModelKind::kNf) fail(ErrorCode::kInvalidArgument, "model is not an NF model");
  if (static_cast<int>(input_normalized_db.size()) != m.channels())
    fail(ErrorCode::kInvalidArgument, "input length does not match model");
  if (envelope_warning) *envelope_warning = !m.in_envelope(input_normalized_db, tin_dbm, tout_dbm);
  std::vector<double> features(input_normalized_db);
  features.push_back(tin_dbm);
  features.push_back(tout_dbm);
  std::vector<double> nf(static_cast<size_t>(m.output_dim));
  m.forward(features.data(), nf.data());
  return nf;
}

double nf_from_ase(double rho_ase_w_hz, double gain_linear, double frequency_thz) {
  if (!(gain_linear > 0.0)) fail(ErrorCode::kInvalidArgument, "gain must be positive");
  if (rho_ase_w_hz < 0.0) fail(ErrorCode::kInvalidArgument, "ASE density must be >= 0");
  double h_nu = kPlanck * frequency_thz * 1e12;
  return rho_ase_w_hz / (gain_linear * h_nu) + 1.0 / gain_linear;
}

double ase_from_nf(double nf_linear, double gain_linear, double frequency_thz) {
  if (!(gain_linear > 0.0)) fail(ErrorCode::kInvalidArgument, "gain must be positive");
  if (nf_linear < 1.0 / gain_linear)
    fail(ErrorCode::kDomain, "NF below 1/G implies negative ASE");
  double h_nu = kPlanck * frequency_thz * 1e12;
  return (nf_linear - 1.0 / gain_linear) * gain_linear * h_nu;
}

double max_abs_error(const std::vector<double>& predicted, const std::vector<double>& truth) {
  if (predicted.size() != truth.size())
    fail(ErrorCode::kInvalidArgument, "prediction/truth length mismatch");
  double mae = 0.0;
  for (size_t i = 0; i < truth.size(); ++i)
    mae = std::max(mae, std::abs(predicted[i] - truth[i]));
  return mae;
}

EvalReport evaluate(const SurrogateModel& m, const Dataset& dataset, const std::string& label) {
  EvalReport rep;
  rep.label = label;
  rep.kind = m.kind;
  int n_ch = m.channels();
  if (dataset.channel_count() != n_ch)
    fail(ErrorCode::kInvalidArgument, "dataset channel count does not match model");
  rep.mse_per_channel.assign(static_cast<size_t>(n_ch), 0.0);

  struct Acc { double sum = 0.0; long count = 0; };
  std::map<int, Acc> by_gav, by_pout;
  std::vector<double> pred(static_cast<size_t>(n_ch));
  double total_sq = 0.0;
  long total_terms = 0;

  for (const auto& s : dataset.samples) {
    SampleFeatures f = featurize(s, m.kind);
    m.forward(f.features.data(), pred.data());
    double sq_sample = 0.0;
    for (int o = 0; o < n_ch; ++o) {
      double d = pred[static_cast<size_t>(o)] - f.target[static_cast<size_t>(o)];
      sq_sample += d * d;
      rep.mse_per_channel[static_cast<size_t>(o)] += d * d;
    }
    rep.mae_per_sample.push_back(max_abs_error(pred, f.target));
    total_sq += sq_sample;
    total_terms += n_ch;

    double gav = s.total_output_dbm - s.total_input_dbm;
    // A sample contributes to every integer bucket center within +/- 1 dB.
    for (int c = static_cast<int>(std::ceil(gav - 1.0)); c <= static_cast<int>(std::floor(gav + 1.0)); ++c) {
      auto& a = by_gav[c];
      a.sum += sq_sample;
      a.count += n_ch;
    }
    auto& po = by_pout[static_cast<int>(std::lround(s.total_output_dbm))];
    po.sum += sq_sample;
    po.count += n_ch;
  }
  if (total_terms == 0) fail(ErrorCode::kInvalidArgument, "empty evaluation dataset");
  size_t n_samples = dataset.samples.size();
  for (double& v : rep.mse_per_channel) v /= static_cast<double>(n_samples);
  for (auto& [c, a] : by_gav) rep.mse_per_gav[c] = {a.sum / static_cast<double>(a.count), static_cast<int>(a.count / n_ch)};
  for (auto& [c, a] : by_pout) rep.mse_per_pout[c] = {a.sum / static_cast<double>(a.count), static_cast<int>(a.count / n_ch)};
  rep.overall_mse = total_sq / static_cast<double>(total_terms);
  return rep;
}

EvalReport::Histogram EvalReport::mae_histogram(double bin_width) const {
  Histogram h;
  h.bin_width = bin_width;
  h.origin = 0.0;
  if (mae_per_sample.empty()) return h;
  double mx = *std::max_element(mae_per_sample.begin(), mae_per_sample.end());
  size_t bins = static_cast<size_t>(std::floor(mx / bin_width)) + 1;
  h.density.assign(bins, 0.0);
  for (double v : mae_per_sample) {
    size_t b = std::min(bins - 1, static_cast<size_t>(std::floor(v / bin_width)));
    h.density[b] += 1.0;
  }
  double norm = static_cast<double>(mae_per_sample.size()) * bin_width;
  for (double& d : h.density) d /= norm;
  return h;
}

SurrogateModel load_model(const std::string& path) {
  auto is = open_input(path);
  expect_version_line(is, path, "model", 1);
  SurrogateModel m;
  std::string line;
  auto read_vec = [&](std::vector<double>& v, size_t n, const char* what) {
    v.clear();
    v.reserve(n);
    while (v.size() < n && next_content_line(is, line)) {
      for (const auto& tok : tokenize(line)) v.push_back(parse_double(tok, path));
    }
    if (v.size() != n)
      fail(ErrorCode::kParse, path + ": expected " + std::to_string(n) + " values for " + what);
  };
  if (!next_content_line(is, line)) fail(ErrorCode::kParse, path + ": missing model header");
  auto toks = tokenize(line);
  if (toks.size() != 5 || toks[0] != "model")
    fail(ErrorCode::kParse, path + ": expected 'model <kind> <input> <hidden> <output>'");
  m.kind = model_kind_from_string(toks[1]);
  m.input_dim = parse_int(toks[2], path);
  m.hidden_dim = parse_int(toks[3], path);
  m.output_dim = parse_int(toks[4], path);
  if (!next_content_line(is, line)) fail(ErrorCode::kParse, path + ": missing seed line");
  toks = tokenize(line);
  if (toks.size() != 2 || toks[0] != "seed") fail(ErrorCode::kParse, path + ": expected seed line");
  m.train_seed = static_cast<std::uint64_t>(std::stoull(toks[1]));
  if (!next_content_line(is, line)) fail(ErrorCode::kParse, path + ": missing envelope line");
  toks = tokenize(line);
  if (toks.size() != 6 || toks[0] != "envelope")
    fail(ErrorCode::kParse, path + ": expected envelope line");
  m.tin_min_dbm = parse_double(toks[1], path);
  m.tin_max_dbm = parse_double(toks[2], path);
  m.tout_min_dbm = parse_double(toks[3], path);
  m.tout_max_dbm = parse_double(toks[4], path);
  m.max_input_excursion_db = parse_double(toks[5], path);
  size_t in = static_cast<size_t>(m.input_dim), hid = static_cast<size_t>(m.hidden_dim),
         outd = static_cast<size_t>(m.output_dim);
  read_vec(m.feature_mean, in, "feature_mean");
  read_vec(m.feature_scale, in, "feature_scale");
  read_vec(m.w1, hid * in, "w1");
  read_vec(m.b1, hid, "b1");
  read_vec(m.w2, outd * hid, "w2");
  read_vec(m.b2, outd, "b2");
  return m;
}

void save_model(const SurrogateModel& m, const std::string& path) {
  auto os = open_output(path);
  write_version_line(os, "model", 1);
  os << "model " << to_string(m.kind) << " " << m.input_dim << " " << m.hidden_dim << " "
     << m.output_dim << "\n";
  os << "seed " << m.train_seed << "\n";
  os << "envelope " << fmt_double(m.tin_min_dbm) << " " << fmt_double(m.tin_max_dbm) << " "
     << fmt_double(m.tout_min_dbm) << " " << fmt_double(m.tout_max_dbm) << " "
     << fmt_double(m.max_input_excursion_db) << "\n";
  auto dump = [&](const std::vector<double>& v, const char* name) {
    os << "# " << name << "\n";
    for (size_t i = 0; i < v.size(); ++i)
      os << fmt_double(v[i]) << ((i + 1) % 8 == 0 || i + 1 == v.size() ? "\n" : " ");
  };
  dump(m.feature_mean, "feature_mean");
  dump(m.feature_scale, "feature_scale");
  dump(m.w1, "w1");
  dump(m.b1, "b1");
  dump(m.w2, "w2");
  dump(m.b2, "b2");
}

}  // namespace wdmopt
