// SPDX-License-Identifier: Apache-2.0
#include "wdmopt/optimize.hpp"

#include <algorithm>
#include <cmath>

#include "wdmopt/errors.hpp"
#include "wdmopt/textio.hpp"

namespace wdmopt {

namespace {
constexpr double kLn10Over10 = 0.23025850929940457;
constexpr double kDb10OverLn10 = 4.342944819032518;
constexpr double kLn2 = 0.6931471805599453;
}  // namespace

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kFlatInputReference: return "flat-input-reference";
    case Strategy::kFlatReceivedPower: return "flat-received-power";
    case Strategy::kFlatSnrLinear: return "flat-snr-linear";
    case Strategy::kFlatSnrFull: return "flat-snr-full";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "flat-input-reference") return Strategy::kFlatInputReference;
  if (s == "flat-received-power") return Strategy::kFlatReceivedPower;
  if (s == "flat-snr-linear") return Strategy::kFlatSnrLinear;
  if (s == "flat-snr-full") return Strategy::kFlatSnrFull;
  fail(ErrorCode::kInvalidArgument, "unknown strategy '" + s + "'");
}

ModelFlags flags_for(Strategy s) {
  if (s == Strategy::kFlatSnrLinear) return ModelFlags{false, false};
  return ModelFlags{true, true};
}

std::string to_string(CostKind c) {
  switch (c) {
    case CostKind::kMinSnr: return "min-snr";
    case CostKind::kThroughput: return "throughput";
    case CostKind::kPsdFlatness: return "psd-flatness";
  }
  return "?";
}

CostKind cost_kind_from_string(const std::string& s) {
  if (s == "min-snr") return CostKind::kMinSnr;
  if (s == "throughput") return CostKind::kThroughput;
  if (s == "psd-flatness") return CostKind::kPsdFlatness;
  fail(ErrorCode::kInvalidArgument, "unknown cost '" + s + "'");
}

CostKind default_cost_for(Strategy s) {
  return s == Strategy::kFlatReceivedPower ? CostKind::kPsdFlatness : CostKind::kMinSnr;
}

double cost_min_snr(const std::vector<double>& snr_db) {
  return -*std::min_element(snr_db.begin(), snr_db.end());
}

double cost_min_snr_soft(const std::vector<double>& snr_db, double beta) {
  // -softmin(s) with softmin = -(1/beta) log( mean exp(-beta s) ). The mean
  // (rather than the sum) keeps softmin(x, ..., x) = x.
  const double m = *std::min_element(snr_db.begin(), snr_db.end());
  double acc = 0.0;
  for (double s : snr_db) acc += std::exp(-beta * (s - m));
  return -(m - std::log(acc / static_cast<double>(snr_db.size())) / beta);
}

double cost_throughput(const std::vector<double>& snr_linear) {
  double acc = 0.0;
  for (double s : snr_linear) acc += std::log2(1.0 + s);
  return -acc;
}

double cost_psd_flatness(const std::vector<double>& received_dbm) {
  double mean = 0.0;
  for (double v : received_dbm) mean += v;
  mean /= static_cast<double>(received_dbm.size());
  double acc = 0.0;
  for (double v : received_dbm) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(received_dbm.size());
}

void OptimizationSpec::validate() const {
  if (!(learning_rate > 0.0)) fail(ErrorCode::kInvalidArgument, "learning rate must be positive");
  if (iterations < 1) fail(ErrorCode::kInvalidArgument, "iterations must be >= 1");
  if (!(softmin_beta > 0.0)) fail(ErrorCode::kInvalidArgument, "softmin temperature must be positive");
}

namespace {

// Candidate construction: unconstrained dB offsets -> linear powers summing
// to the configured total by construction.
std::vector<double> shape_to_input(const std::vector<double>& theta_db, double total_w) {
  std::vector<double> u(theta_db.size());
  double s = 0.0;
  for (size_t i = 0; i < theta_db.size(); ++i) {
    u[i] = linear_from_db(theta_db[i]);
    s += u[i];
  }
  for (double& v : u) v *= total_w / s;
  return u;
}

void shape_backward(const std::vector<double>& theta_db, double total_w,
                    const std::vector<double>& grad_input, std::vector<double>& grad_theta) {
  std::vector<double> u(theta_db.size());
  double s = 0.0;
  for (size_t i = 0; i < theta_db.size(); ++i) {
    u[i] = linear_from_db(theta_db[i]);
    s += u[i];
  }
  double dot = 0.0;
  for (size_t i = 0; i < u.size(); ++i) dot += grad_input[i] * u[i];
  for (size_t i = 0; i < u.size(); ++i) {
    const double ub = (total_w / s) * (grad_input[i] - dot / s);
    grad_theta[i] = ub * u[i] * kLn10Over10;
  }
}

// Evaluation-model cost of a report (hard min for the SNR cost).
double report_cost(const SnrReport& report, CostKind cost) {
  switch (cost) {
    case CostKind::kMinSnr:
      return cost_min_snr(report.snr_db);
    case CostKind::kThroughput: {
      std::vector<double> lin(report.snr_db.size());
      for (size_t i = 0; i < lin.size(); ++i) lin[i] = linear_from_db(report.snr_db[i]);
      return cost_throughput(lin);
    }
    case CostKind::kPsdFlatness: {
      std::vector<double> dbm(static_cast<size_t>(report.received.count()));
      for (int i = 0; i < report.received.count(); ++i) dbm[static_cast<size_t>(i)] = dbm_from_watt(report.received[i]);
      return cost_psd_flatness(dbm);
    }
  }
  fail(ErrorCode::kInternal, "unhandled cost kind");
}

// Seeds for the reverse pass of the optimization-model cost.
struct CostSeeds {
  double value = 0.0;
  std::vector<double> grad_snr_db;
  std::vector<double> grad_received_dbm;
};

CostSeeds cost_seeds(const SnrReport& report, CostKind cost, double beta, bool hard_min) {
  CostSeeds out;
  const auto& snr = report.snr_db;
  const size_t n = snr.size();
  switch (cost) {
    case CostKind::kMinSnr: {
      out.grad_snr_db.assign(n, 0.0);
      if (hard_min) {
        size_t arg = static_cast<size_t>(
            std::min_element(snr.begin(), snr.end()) - snr.begin());
        out.value = -snr[arg];
        out.grad_snr_db[arg] = -1.0;
      } else {
        out.value = cost_min_snr_soft(snr, beta);
        const double m = *std::min_element(snr.begin(), snr.end());
        double z = 0.0;
        for (double s : snr) z += std::exp(-beta * (s - m));
        for (size_t i = 0; i < n; ++i)
          out.grad_snr_db[i] = -std::exp(-beta * (snr[i] - m)) / z;
      }
      break;
    }
    case CostKind::kThroughput: {
      out.grad_snr_db.assign(n, 0.0);
      double acc = 0.0;
      for (size_t i = 0; i < n; ++i) {
        const double s_lin = linear_from_db(snr[i]);
        acc += std::log2(1.0 + s_lin);
        // d(-log2(1+s))/ds_db = -(1/((1+s) ln2)) * s ln10/10
        out.grad_snr_db[i] = -(s_lin * kLn10Over10) / ((1.0 + s_lin) * kLn2);
      }
      out.value = -acc;
      break;
    }
    case CostKind::kPsdFlatness: {
      std::vector<double> dbm(static_cast<size_t>(report.received.count()));
      for (int i = 0; i < report.received.count(); ++i)
        dbm[static_cast<size_t>(i)] = dbm_from_watt(report.received[i]);
      out.value = cost_psd_flatness(dbm);
      double mean = 0.0;
      for (double v : dbm) mean += v;
      mean /= static_cast<double>(n);
      out.grad_received_dbm.assign(n, 0.0);
      for (size_t i = 0; i < n; ++i)
        out.grad_received_dbm[i] = 2.0 * (dbm[i] - mean) / static_cast<double>(n);
      break;
    }
  }
  return out;
}

struct Adam {
  std::vector<double> m, v;
  int t = 0;
  explicit Adam(size_t n) : m(n, 0.0), v(n, 0.0) {}
  void step(std::vector<double>& w, const std::vector<double>& g, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++t;
    const double c1 = 1.0 - std::pow(b1, t), c2 = 1.0 - std::pow(b2, t);
    for (size_t i = 0; i < w.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      w[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
};

}  // namespace

PowerSpectrum candidate_profile(const CascadeEvaluator& evaluator,
                                const std::vector<double>& theta_db) {
  const LinkConfig& link = evaluator.link();
  return PowerSpectrum(link.grid, Domain::kLinear,
                       shape_to_input(theta_db, watt_from_dbm(link.first_edfa_input_dbm)));
}

double optimization_cost_and_grad(const CascadeEvaluator& evaluator, const OptimizationSpec& spec,
                                  const std::vector<double>& theta_db, bool hard_min,
                                  std::vector<double>* grad_theta) {
  const double total_w = watt_from_dbm(evaluator.link().first_edfa_input_dbm);
  CascadeTape tape;
  std::vector<double> input_w = shape_to_input(theta_db, total_w);
  SnrReport report = evaluator.simulate_taped(input_w, flags_for(spec.strategy), tape);
  CostSeeds seeds = cost_seeds(report, spec.cost, spec.softmin_beta, hard_min);
  if (grad_theta) {
    std::vector<double> grad_input =
        evaluator.backprop(tape, seeds.grad_snr_db, seeds.grad_received_dbm);
    grad_theta->assign(theta_db.size(), 0.0);
    shape_backward(theta_db, total_w, grad_input, *grad_theta);
  }
  return seeds.value;
}

OptimizeResult optimize(const CascadeEvaluator& evaluator, const OptimizationSpec& spec) {
  spec.validate();
  const LinkConfig& link = evaluator.link();
  const int n = link.grid->count();
  const double total_w = watt_from_dbm(link.first_edfa_input_dbm);
  const ModelFlags full_flags{};

  auto profile_from_theta = [&](const std::vector<double>& theta) {
    return PowerSpectrum(link.grid, Domain::kLinear, shape_to_input(theta, total_w));
  };

  std::vector<double> theta(static_cast<size_t>(n), 0.0);

  OptimizeResult result{profile_from_theta(theta),
                        evaluator.simulate(profile_from_theta(theta), full_flags),
                        {},
                        true,
                        0.0,
                        0.0};
  double full_cost = report_cost(result.full_report, spec.cost);
  result.initial_full_cost = full_cost;
  result.final_full_cost = full_cost;
  std::vector<double> best_theta = theta;
  result.trace.push_back({0, full_cost, result.full_report.min_snr_db(),
                          result.full_report.excursion_db()});

  if (spec.strategy == Strategy::kFlatInputReference) {
    result.profile = to_db(result.profile);
    return result;  // reference arm: the flat profile itself, trace length 1
  }

  Adam adam(static_cast<size_t>(n));
  std::vector<double> grad_theta(static_cast<size_t>(n));
  std::vector<double> recent_costs;
  // The smoothed min spreads gradient across near-worst channels; the last
  // stretch refines on the hard min. A plateau in the smooth phase jumps to
  // the refinement early instead of stopping outright.
  const int hard_phase_start = spec.iterations - std::max(1, spec.iterations / 5);
  bool refining = false;  // plateau-triggered early refinement
  int refine_left = 0;
  bool was_hard = false;
  result.converged = false;

  for (int it = 1; it <= spec.iterations; ++it) {
    const bool hard = spec.cost == CostKind::kMinSnr && (refining || it > hard_phase_start);
    if (hard && !was_hard) recent_costs.clear();
    was_hard = hard;
    const double opt_cost = optimization_cost_and_grad(evaluator, spec, theta, hard, &grad_theta);
    if (!std::isfinite(opt_cost))
      fail(ErrorCode::kDiverged,
           "optimization cost became non-finite at iteration " + std::to_string(it));
    adam.step(theta, grad_theta, spec.learning_rate);

    // Full-model bookkeeping of the new candidate.
    SnrReport full_report = evaluator.simulate(profile_from_theta(theta), full_flags);
    full_cost = report_cost(full_report, spec.cost);
    result.trace.push_back({it, full_cost, full_report.min_snr_db(), full_report.excursion_db()});
    if (full_cost < result.final_full_cost) {
      result.final_full_cost = full_cost;
      best_theta = theta;
      result.full_report = std::move(full_report);
    }

    recent_costs.push_back(opt_cost);
    if (static_cast<int>(recent_costs.size()) > spec.convergence_window + 1)
      recent_costs.erase(recent_costs.begin());
    bool plateau = false;
    if (static_cast<int>(recent_costs.size()) == spec.convergence_window + 1) {
      const double a = recent_costs.front(), b = recent_costs.back();
      const double scale = std::max({std::abs(a), std::abs(b), 1e-12});
      plateau = std::abs(a - b) / scale < spec.convergence_rel_tol;
    }
    if (plateau) {
      if (spec.cost == CostKind::kMinSnr && !hard) {
        refining = true;
        refine_left = std::min(spec.convergence_window * 3, spec.iterations - it);
      } else {
        result.converged = true;
        break;
      }
    }
    if (refining && --refine_left <= 0) {
      result.converged = true;
      break;
    }
  }

  result.profile = to_db(profile_from_theta(best_theta));
  return result;
}

void save_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
  auto os = open_output(path);
  write_version_line(os, "trace", 1);
  os << "iteration,cost,min_snr_dB,excursion_dB\n";
  for (const auto& r : trace)
    os << r.iteration << "," << fmt_double(r.cost) << "," << fmt_double(r.min_snr_db) << ","
       << fmt_double(r.excursion_db) << "\n";
}

}  // namespace wdmopt
