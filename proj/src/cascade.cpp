// SPDX-License-Identifier: Apache-2.0
#include "wdmopt/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "wdmopt/errors.hpp"
#include "wdmopt/textio.hpp"

namespace wdmopt {

namespace {

constexpr double kEdfaMaxOutputDbm = 18.0;
constexpr double kDb10OverLn10 = 4.342944819032518;   // 10 / ln 10
constexpr double kLn10Over10 = 0.23025850929940457;

int argmax_idx(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}
int argmin_idx(const std::vector<double>& v) {
  return static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

void LinkConfig::validate() const {
  if (!grid) fail(ErrorCode::kInvalidArgument, "link config without grid");
  if (spans.empty() && !span_template)
    fail(ErrorCode::kInvalidArgument, "link config needs at least one span");
  if (static_cast<int>(b2b_snr_db.size()) != grid->count())
    fail(ErrorCode::kInvalidArgument, "B2B profile length does not match grid");
  auto check_span = [&](const SpanConfig& s) {
    s.fiber.validate();
    if (s.target_output_dbm > kEdfaMaxOutputDbm + 1e-9)
      fail(ErrorCode::kInvalidArgument, "span target output exceeds the 18 dBm device maximum");
    const auto& m = models_for(s.edfa_id);
    if (m.first.channels() != grid->count() || m.second.channels() != grid->count())
      fail(ErrorCode::kInvalidArgument, "EDFA model channel count does not match grid");
  };
  for (const auto& s : spans) check_span(s);
  if (span_template) check_span(*span_template);
}

const std::pair<SurrogateModel, SurrogateModel>& LinkConfig::models_for(
    const std::string& id) const {
  auto it = models.find(id);
  if (it == models.end()) fail(ErrorCode::kInvalidArgument, "no EDFA model registered as '" + id + "'");
  return it->second;
}

double SnrReport::min_snr_db() const {
  return *std::min_element(snr_db.begin(), snr_db.end());
}
double SnrReport::max_snr_db() const {
  return *std::max_element(snr_db.begin(), snr_db.end());
}

void save_snr_report_csv(const SnrReport& report, const std::string& path) {
  auto os = open_output(path);
  write_version_line(os, "report", 1);
  os << "channel,frequency_THz,received_dBm,ase_W,nli_W,snr_dB\n";
  const auto& grid = *report.received.grid();
  for (int i = 0; i < grid.count(); ++i) {
    size_t k = static_cast<size_t>(i);
    os << i << "," << fmt_double(grid.frequency_thz(i)) << ","
       << fmt_double(dbm_from_watt(report.received[i])) << ","
       << fmt_double(report.noise.ase_w[k]) << "," << fmt_double(report.noise.nli_w[k]) << ","
       << fmt_double(report.snr_db[k]) << "\n";
  }
}

void apply_ideal_gff(std::vector<double>& psd_w, NoiseSpectrum& noise, const ChannelGrid& grid) {
  const int n = static_cast<int>(psd_w.size());
  const double mx = *std::max_element(psd_w.begin(), psd_w.end());
  const double mn = *std::min_element(psd_w.begin(), psd_w.end());
  const double rs = grid.symbol_rate_hz();
  for (int i = 0; i < n; ++i) {
    size_t k = static_cast<size_t>(i);
    const double c = 2.0 * kPlanck * grid.frequency_hz(i) * rs;
    noise.ase_w[k] = (noise.ase_w[k] * mx + c * (mx - mn)) / psd_w[k];
    noise.nli_w[k] = noise.nli_w[k] * mx / psd_w[k];
    psd_w[k] = mx;
  }
}

// ---------------------------------------------------------------------------
// Evaluator
// ---------------------------------------------------------------------------

CascadeEvaluator::CascadeEvaluator(const LinkConfig& link) : link_(&link) {
  link.validate();
  nli_kernels_.reserve(link.spans.size());
  for (const auto& s : link.spans) nli_kernels_.push_back(make_nli_kernel(*link.grid, s.fiber));
}

SnrReport CascadeEvaluator::simulate(const PowerSpectrum& input) const {
  return simulate(input, ModelFlags{});
}

SnrReport CascadeEvaluator::simulate(const PowerSpectrum& input, const ModelFlags& flags) const {
  const PowerSpectrum lin = input.domain() == Domain::kLinear ? input : to_linear(input);
  if (!lin.grid()->equivalent(*link_->grid))
    fail(ErrorCode::kInvalidArgument, "input spectrum grid does not match link grid");
  CascadeTape tape;
  return simulate_taped(lin.values(), flags, tape);
}

SnrReport CascadeEvaluator::simulate_taped(const std::vector<double>& input_w,
                                           const ModelFlags& flags, CascadeTape& tape) const {
  const LinkConfig& link = *link_;
  const ChannelGrid& grid = *link.grid;
  const int n = grid.count();
  if (static_cast<int>(input_w.size()) != n)
    fail(ErrorCode::kInvalidArgument, "input length does not match link grid");
  const double rs = grid.symbol_rate_hz();

  tape.flags = flags;
  tape.raw_input_w = input_w;
  tape.spans.clear();
  tape.spans.resize(link.spans.size());

  // Enforce the configured total power into the first EDFA.
  double raw_sum = 0.0;
  for (double v : input_w) raw_sum += v;
  const double t0_w = watt_from_dbm(link.first_edfa_input_dbm);
  std::vector<double> p(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] = input_w[static_cast<size_t>(i)] * t0_w / raw_sum;
  tape.p0_w = p;

  std::vector<double> ase(static_cast<size_t>(n), 0.0), nli(static_cast<size_t>(n), 0.0),
      impl(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    impl[static_cast<size_t>(i)] = 1.0 / linear_from_db(link.b2b_snr_db[static_cast<size_t>(i)]);

  SnrReport report{PowerSpectrum(link.grid, Domain::kLinear, std::vector<double>(static_cast<size_t>(n), 1.0)),
                   NoiseSpectrum::zero(link.grid),
                   std::vector<double>(static_cast<size_t>(n), 0.0),
                   {},
                   0};

  for (size_t si = 0; si < link.spans.size(); ++si) {
    const SpanConfig& span = link.spans[si];
    const auto& models = link.models_for(span.edfa_id);
    const SurrogateModel& gain_model = models.first;
    const SurrogateModel& nf_model = models.second;
    CascadeTape::SpanCtx& ctx = tape.spans[si];

    // --- EDFA: peak-normalize, query both networks, renormalize to target.
    CascadeTape::EdfaCtx& e = ctx.edfa;
    e.p_in_w = p;
    e.ase_in = ase;
    e.nli_in = nli;
    e.pi_dbm.resize(static_cast<size_t>(n));
    double total_in = 0.0;
    for (int i = 0; i < n; ++i) {
      e.pi_dbm[static_cast<size_t>(i)] = dbm_from_watt(p[static_cast<size_t>(i)]);
      total_in += p[static_cast<size_t>(i)];
    }
    e.total_in_w = total_in;
    e.peak_idx = argmax_idx(e.pi_dbm);
    const double peak = e.pi_dbm[static_cast<size_t>(e.peak_idx)];
    const double tin_dbm = dbm_from_watt(total_in);

    e.features.resize(static_cast<size_t>(n) + 2);
    for (int i = 0; i < n; ++i) e.features[static_cast<size_t>(i)] = e.pi_dbm[static_cast<size_t>(i)] - peak;
    e.features[static_cast<size_t>(n)] = tin_dbm;
    e.features[static_cast<size_t>(n) + 1] = span.target_output_dbm;

    std::vector<double> norm(e.features.begin(), e.features.begin() + n);
    if (!gain_model.in_envelope(norm, tin_dbm, span.target_output_dbm) ||
        !nf_model.in_envelope(norm, tin_dbm, span.target_output_dbm))
      ++report.envelope_warnings;

    e.hidden_gain.resize(static_cast<size_t>(gain_model.hidden_dim));
    e.y.resize(static_cast<size_t>(n));
    gain_model.forward_cached(e.features.data(), e.hidden_gain.data(), e.y.data());
    e.hidden_nf.resize(static_cast<size_t>(nf_model.hidden_dim));
    e.nf_db.resize(static_cast<size_t>(n));
    nf_model.forward_cached(e.features.data(), e.hidden_nf.data(), e.nf_db.data());

    e.q.resize(static_cast<size_t>(n));
    e.q_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      e.q[static_cast<size_t>(i)] = linear_from_db(e.y[static_cast<size_t>(i)]);
      e.q_sum += e.q[static_cast<size_t>(i)];
    }
    e.tout_w = watt_from_dbm(span.target_output_dbm);
    e.out_w.resize(static_cast<size_t>(n));
    e.gain_lin.resize(static_cast<size_t>(n));
    e.nf_lin.resize(static_cast<size_t>(n));
    e.rho.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      size_t k = static_cast<size_t>(i);
      e.out_w[k] = e.q[k] * e.tout_w / e.q_sum;
      e.gain_lin[k] = e.out_w[k] / p[k];
      e.nf_lin[k] = linear_from_db(e.nf_db[k]);
      const double h_nu = kPlanck * grid.frequency_hz(i);
      double rho = h_nu * (e.nf_lin[k] * e.gain_lin[k] - 1.0);
      e.rho[k] = rho > 0.0 ? rho : 0.0;
      ase[k] = ase[k] * e.gain_lin[k] + e.rho[k] * rs;
      nli[k] *= e.gain_lin[k];
    }
    p = e.out_w;

    // --- Optional ideal gain flattening.
    CascadeTape::GffCtx& gff = ctx.gff;
    gff.active = span.gff == GffMode::kIdeal;
    if (gff.active) {
      gff.p_in_w = p;
      gff.ase_in = ase;
      gff.nli_in = nli;
      gff.idx_max = argmax_idx(p);
      gff.idx_min = argmin_idx(p);
      gff.mx = p[static_cast<size_t>(gff.idx_max)];
      gff.mn = p[static_cast<size_t>(gff.idx_min)];
      for (int i = 0; i < n; ++i) {
        size_t k = static_cast<size_t>(i);
        const double c = 2.0 * kPlanck * grid.frequency_hz(i) * rs;
        ase[k] = (gff.ase_in[k] * gff.mx + c * (gff.mx - gff.mn)) / gff.p_in_w[k];
        nli[k] = gff.nli_in[k] * gff.mx / gff.p_in_w[k];
        p[k] = gff.mx;
      }
    }

    // --- Fiber: SRS (or plain loss), noise transfer, additive NLI.
    CascadeTape::FiberCtx& f = ctx.fiber;
    f.launch_w = p;
    f.ase_in = ase;
    f.nli_in = nli;
    f.srs_used = span.include_srs && flags.allow_srs && span.fiber.raman_slope_w_km_thz > 0.0;
    f.nli_used = span.include_nli && flags.allow_nli;
    f.transfer.resize(static_cast<size_t>(n));
    if (f.srs_used) {
      SpanResult r = srs_propagate_raw(p, span.fiber, grid, &f.traj);
      f.transfer = r.transfer;
      p = std::move(r.output_w);
    } else {
      const double t = linear_from_db(-(span.fiber.attenuation_db_km * span.fiber.length_km +
                                        span.fiber.connector_loss_db));
      for (int i = 0; i < n; ++i) {
        size_t k = static_cast<size_t>(i);
        f.transfer[k] = t;
        p[k] *= t;
      }
    }
    for (int i = 0; i < n; ++i) {
      size_t k = static_cast<size_t>(i);
      ase[k] *= f.transfer[k];
      nli[k] *= f.transfer[k];
    }
    if (f.nli_used) {
      std::vector<double> add = nli_power_raw(f.launch_w, nli_kernels_[si]);
      for (int i = 0; i < n; ++i) nli[static_cast<size_t>(i)] += add[static_cast<size_t>(i)];
    }

    report.span_output_dbm.emplace_back(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      report.span_output_dbm.back()[static_cast<size_t>(i)] = dbm_from_watt(p[static_cast<size_t>(i)]);
  }

  tape.final_p = p;
  tape.final_ase = ase;
  tape.final_nli = nli;
  tape.impl = impl;
  tape.snr_lin.resize(static_cast<size_t>(n));
  report.received = PowerSpectrum(link.grid, Domain::kLinear, p);
  report.noise.ase_w = ase;
  report.noise.nli_w = nli;
  report.noise.impl_nsr = impl;
  for (int i = 0; i < n; ++i) {
    size_t k = static_cast<size_t>(i);
    const double denom = ase[k] + nli[k] + impl[k] * p[k];
    tape.snr_lin[k] = p[k] / denom;
    report.snr_db[k] = db_from_linear(tape.snr_lin[k]);
  }
  return report;
}

std::vector<double> CascadeEvaluator::backprop(const CascadeTape& tape,
                                               const std::vector<double>& grad_snr_db,
                                               const std::vector<double>& grad_received_dbm) const {
  const LinkConfig& link = *link_;
  const ChannelGrid& grid = *link.grid;
  const int n = grid.count();
  const double rs = grid.symbol_rate_hz();

  std::vector<double> pb(static_cast<size_t>(n), 0.0), aseb(static_cast<size_t>(n), 0.0),
      nlib(static_cast<size_t>(n), 0.0);

  // SNR stage. snr_lin = p / (ase + nli + impl p); snr_db = 10 log10(snr_lin).
  for (int i = 0; i < n; ++i) {
    size_t k = static_cast<size_t>(i);
    double g_lin = 0.0;
    if (!grad_snr_db.empty()) g_lin += grad_snr_db[k] * kDb10OverLn10 / tape.snr_lin[k];
    const double denom =
        tape.final_ase[k] + tape.final_nli[k] + tape.impl[k] * tape.final_p[k];
    pb[k] += g_lin * (tape.final_ase[k] + tape.final_nli[k]) / (denom * denom);
    aseb[k] -= g_lin * tape.final_p[k] / (denom * denom);
    nlib[k] -= g_lin * tape.final_p[k] / (denom * denom);
    if (!grad_received_dbm.empty()) pb[k] += grad_received_dbm[k] * kDb10OverLn10 / tape.final_p[k];
  }

  for (size_t si = link.spans.size(); si-- > 0;) {
    const SpanConfig& span = link.spans[si];
    const CascadeTape::SpanCtx& ctx = tape.spans[si];
    const auto& models = link.models_for(span.edfa_id);
    const SurrogateModel& gain_model = models.first;
    const SurrogateModel& nf_model = models.second;

    // --- Fiber adjoint.
    const CascadeTape::FiberCtx& f = ctx.fiber;
    std::vector<double> launchb(static_cast<size_t>(n), 0.0);
    if (f.nli_used) nli_backward(f.launch_w, nli_kernels_[si], nlib, launchb);
    // noise scaling by the transfer, and the transfer's own dependence on the
    // launch (transfer = out/launch).
    std::vector<double> transferb(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      size_t k = static_cast<size_t>(i);
      transferb[k] = aseb[k] * f.ase_in[k] + nlib[k] * f.nli_in[k];
      aseb[k] *= f.transfer[k];
      nlib[k] *= f.transfer[k];
    }
    if (f.srs_used) {
      // out = srs(launch); transfer = out/launch. Gradients w.r.t. out and to
      // the explicit 1/launch factor.
      std::vector<double> outb(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) {
        size_t k = static_cast<size_t>(i);
        outb[k] = pb[k] + transferb[k] / f.launch_w[k];
        launchb[k] -= transferb[k] * f.transfer[k] / f.launch_w[k];
      }
      std::vector<double> fromode = srs_backward(f.traj, span.fiber, grid, outb);
      for (int i = 0; i < n; ++i) launchb[static_cast<size_t>(i)] += fromode[static_cast<size_t>(i)];
    } else {
      // flat loss: out = t * launch with constant t; transfer has no launch
      // dependence.
      for (int i = 0; i < n; ++i) {
        size_t k = static_cast<size_t>(i);
        launchb[k] += pb[k] * f.transfer[k];
      }
    }
    pb = std::move(launchb);

    // --- GFF adjoint.
    if (ctx.gff.active) {
      const CascadeTape::GffCtx& g = ctx.gff;
      std::vector<double> pinb(static_cast<size_t>(n), 0.0), aseinb(static_cast<size_t>(n), 0.0),
          nliinb(static_cast<size_t>(n), 0.0);
      double mxb = 0.0, mnb = 0.0;
      for (int i = 0; i < n; ++i) {
        size_t k = static_cast<size_t>(i);
        const double c = 2.0 * kPlanck * grid.frequency_hz(i) * rs;
        // p_out = mx
        mxb += pb[k];
        // ase_out = (ase_in mx + c (mx - mn)) / p_in
        aseinb[k] += aseb[k] * g.mx / g.p_in_w[k];
        mxb += aseb[k] * (g.ase_in[k] + c) / g.p_in_w[k];
        mnb -= aseb[k] * c / g.p_in_w[k];
        pinb[k] -= aseb[k] * (g.ase_in[k] * g.mx + c * (g.mx - g.mn)) /
                   (g.p_in_w[k] * g.p_in_w[k]);
        // nli_out = nli_in mx / p_in
        nliinb[k] += nlib[k] * g.mx / g.p_in_w[k];
        mxb += nlib[k] * g.nli_in[k] / g.p_in_w[k];
        pinb[k] -= nlib[k] * g.nli_in[k] * g.mx / (g.p_in_w[k] * g.p_in_w[k]);
      }
      pinb[static_cast<size_t>(g.idx_max)] += mxb;
      pinb[static_cast<size_t>(g.idx_min)] += mnb;
      pb = std::move(pinb);
      aseb = std::move(aseinb);
      nlib = std::move(nliinb);
    }

    // --- EDFA adjoint.
    const CascadeTape::EdfaCtx& e = ctx.edfa;
    std::vector<double> qoutb = pb;  // gradient on the renormalized EDFA output
    std::vector<double> gainb(static_cast<size_t>(n), 0.0);
    std::vector<double> nfdbb(static_cast<size_t>(n), 0.0);
    std::vector<double> pinb(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      size_t k = static_cast<size_t>(i);
      const double h_nu = kPlanck * grid.frequency_hz(i);
      // ase_out = ase_in g + rho rs; nli_out = nli_in g
      double rhob = aseb[k] * rs;
      gainb[k] += aseb[k] * e.ase_in[k] + nlib[k] * e.nli_in[k];
      if (e.rho[k] > 0.0) {
        // rho = h_nu (nf_lin g - 1)
        gainb[k] += rhob * h_nu * e.nf_lin[k];
        const double nflinb = rhob * h_nu * e.gain_lin[k];
        nfdbb[k] += nflinb * e.nf_lin[k] * kLn10Over10;
      }
      aseb[k] = aseb[k] * e.gain_lin[k];
      nlib[k] = nlib[k] * e.gain_lin[k];
      // gain = out/p_in
      qoutb[k] += gainb[k] / e.p_in_w[k];
      pinb[k] -= gainb[k] * e.out_w[k] / (e.p_in_w[k] * e.p_in_w[k]);
    }

    // Renormalization out = q tout_w / sum(q), q = 10^(y/10).
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += qoutb[static_cast<size_t>(i)] * e.q[static_cast<size_t>(i)];
    std::vector<double> yb(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      size_t k = static_cast<size_t>(i);
      const double qb = qoutb[k] * e.tout_w / e.q_sum - dot * e.tout_w / (e.q_sum * e.q_sum);
      yb[k] = qb * e.q[k] * kLn10Over10;
    }

    // Through both networks to the shared features.
    std::vector<double> featb(static_cast<size_t>(n) + 2, 0.0);
    gain_model.backward_features(e.features.data(), e.hidden_gain.data(), yb.data(), featb.data());
    nf_model.backward_features(e.features.data(), e.hidden_nf.data(), nfdbb.data(), featb.data());

    // features: x_i = pi_i - pi_peak; tin = dbm(total); tout constant.
    std::vector<double> pidbmb(static_cast<size_t>(n), 0.0);
    double sum_xb = 0.0;
    for (int i = 0; i < n; ++i) {
      pidbmb[static_cast<size_t>(i)] += featb[static_cast<size_t>(i)];
      sum_xb += featb[static_cast<size_t>(i)];
    }
    pidbmb[static_cast<size_t>(e.peak_idx)] -= sum_xb;
    const double tinb = featb[static_cast<size_t>(n)];
    for (int i = 0; i < n; ++i) {
      size_t k = static_cast<size_t>(i);
      pinb[k] += pidbmb[k] * kDb10OverLn10 / e.p_in_w[k];
      pinb[k] += tinb * kDb10OverLn10 / e.total_in_w;
    }

    pb = std::move(pinb);
  }

  // Input renormalization: p0 = raw * t0 / sum(raw).
  double raw_sum = 0.0;
  for (double v : tape.raw_input_w) raw_sum += v;
  const double t0_w = watt_from_dbm(link.first_edfa_input_dbm);
  double dot = 0.0;
  for (int i = 0; i < n; ++i) dot += pb[static_cast<size_t>(i)] * tape.raw_input_w[static_cast<size_t>(i)];
  std::vector<double> rawb(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    size_t k = static_cast<size_t>(i);
    rawb[k] = (t0_w / raw_sum) * (pb[k] - dot / raw_sum);
  }
  return rawb;
}

// ---------------------------------------------------------------------------
// Link config file
// ---------------------------------------------------------------------------

namespace {

std::string resolve_near(const std::string& base_file, const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  fs::path near = fs::path(base_file).parent_path() / path;
  if (fs::exists(near)) return near.string();
  return resolve_input_path(path);
}

struct KeyValues {
  std::vector<std::pair<std::string, std::string>> kv;
  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : kv)
      if (k == key) return &v;
    return nullptr;
  }
};

KeyValues parse_kv(const std::vector<std::string>& toks, size_t start, const std::string& ctx) {
  KeyValues out;
  for (size_t i = start; i < toks.size(); ++i) {
    auto eq = toks[i].find('=');
    if (eq == std::string::npos) fail(ErrorCode::kParse, ctx + ": expected key=value, got '" + toks[i] + "'");
    out.kv.emplace_back(toks[i].substr(0, eq), toks[i].substr(eq + 1));
  }
  return out;
}

bool parse_flag(const std::string& v, const std::string& ctx) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  fail(ErrorCode::kParse, ctx + ": expected on|off, got '" + v + "'");
}

void apply_fiber_keys(FiberParams& fiber, const KeyValues& kv, const std::string& ctx) {
  if (auto* v = kv.find("length_km")) fiber.length_km = parse_double(*v, ctx);
  if (auto* v = kv.find("attenuation_db_km")) fiber.attenuation_db_km = parse_double(*v, ctx);
  if (auto* v = kv.find("beta2_ps2_km")) fiber.beta2_ps2_km = parse_double(*v, ctx);
  if (auto* v = kv.find("gamma_w_km")) fiber.gamma_w_km = parse_double(*v, ctx);
  if (auto* v = kv.find("raman_slope_w_km_thz")) fiber.raman_slope_w_km_thz = parse_double(*v, ctx);
  if (auto* v = kv.find("raman_peak_shift_thz")) fiber.raman_peak_shift_thz = parse_double(*v, ctx);
  if (auto* v = kv.find("connector_loss_db")) fiber.connector_loss_db = parse_double(*v, ctx);
}

SpanConfig parse_span(const KeyValues& kv, const FiberParams& proto, const std::string& ctx) {
  SpanConfig s;
  s.fiber = proto;
  apply_fiber_keys(s.fiber, kv, ctx);
  if (auto* v = kv.find("edfa")) s.edfa_id = *v;
  else fail(ErrorCode::kParse, ctx + ": span needs edfa=<id>");
  if (auto* v = kv.find("target_output_dbm")) s.target_output_dbm = parse_double(*v, ctx);
  else fail(ErrorCode::kParse, ctx + ": span needs target_output_dbm=");
  if (auto* v = kv.find("srs")) s.include_srs = parse_flag(*v, ctx);
  if (auto* v = kv.find("nli")) s.include_nli = parse_flag(*v, ctx);
  if (auto* v = kv.find("gff")) {
    if (*v == "none") s.gff = GffMode::kNone;
    else if (*v == "ideal") s.gff = GffMode::kIdeal;
    else fail(ErrorCode::kParse, ctx + ": gff must be none|ideal");
  }
  return s;
}

}  // namespace

LinkConfig load_link(const std::string& path) {
  auto is = open_input(path);
  expect_version_line(is, path, "link", 1);
  LinkConfig link;
  FiberParams fiber_proto;
  bool have_fiber = false;
  std::string b2b_path;
  std::string line;
  while (next_content_line(is, line)) {
    auto toks = tokenize(line);
    const std::string& head = toks[0];
    if (head == "grid" && toks.size() == 5) {
      link.grid = std::make_shared<const ChannelGrid>(
          parse_double(toks[2], path), parse_double(toks[3], path), parse_int(toks[1], path),
          parse_double(toks[4], path));
    } else if (head == "grid_file" && toks.size() == 2) {
      link.grid = load_grid(resolve_near(path, toks[1]));
    } else if (head == "first_input_dbm" && toks.size() == 2) {
      link.first_edfa_input_dbm = parse_double(toks[1], path);
    } else if (head == "b2b_file" && toks.size() == 2) {
      b2b_path = toks[1];
    } else if (head == "edfa" && toks.size() == 4) {
      SurrogateModel gain = load_model(resolve_near(path, toks[2]));
      SurrogateModel nf = load_model(resolve_near(path, toks[3]));
      if (gain.kind != ModelKind::kGain || nf.kind != ModelKind::kNf)
        fail(ErrorCode::kParse, path + ": edfa line wants <id> <gain model> <nf model>");
      link.models.emplace(toks[1], std::make_pair(std::move(gain), std::move(nf)));
    } else if (head == "fiber") {
      apply_fiber_keys(fiber_proto, parse_kv(toks, 1, path), path);
      have_fiber = true;
    } else if (head == "span" || head == "span_template") {
      if (!have_fiber)
        fail(ErrorCode::kParse, path + ": 'fiber' defaults must precede span lines");
      SpanConfig s = parse_span(parse_kv(toks, 1, path), fiber_proto, path);
      if (head == "span") {
        if (!(s.fiber.length_km > 0.0))
          fail(ErrorCode::kParse, path + ": span needs length_km > 0");
        link.spans.push_back(std::move(s));
      } else {
        link.span_template = std::move(s);
      }
    } else {
      fail(ErrorCode::kParse, path + ": unrecognized line '" + line + "'");
    }
  }
  if (!link.grid) fail(ErrorCode::kParse, path + ": missing grid");
  if (b2b_path.empty()) fail(ErrorCode::kParse, path + ": missing b2b_file");
  link.b2b_snr_db = load_profile_db_interpolated(resolve_near(path, b2b_path), *link.grid);
  link.validate();
  return link;
}

}  // namespace wdmopt
