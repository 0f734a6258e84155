// SPDX-License-Identifier: Apache-2.0
#include "wdmopt/network.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "wdmopt/errors.hpp"
#include "wdmopt/rng.hpp"
#include "wdmopt/textio.hpp"

namespace wdmopt {

std::string to_string(GffMode g) { return g == GffMode::kNone ? "none" : "ideal"; }

GffMode gff_mode_from_string(const std::string& s) {
  if (s == "none") return GffMode::kNone;
  if (s == "ideal") return GffMode::kIdeal;
  fail(ErrorCode::kInvalidArgument, "unknown gff mode '" + s + "' (want none|ideal)");
}

Topology load_topology(const std::string& path) {
  auto is = open_input(path);
  expect_version_line(is, path, "topology", 1);
  Topology topo;
  std::string line;
  while (next_content_line(is, line)) {
    auto toks = tokenize(line);
    if (toks.size() < 5)
      fail(ErrorCode::kParse, path + ": link row wants 'id node_a node_b total_km spans...'");
    TopologyLink link;
    link.id = parse_int(toks[0], path);
    link.node_a = toks[1];
    link.node_b = toks[2];
    link.total_km = parse_double(toks[3], path);
    double sum = 0.0;
    for (size_t i = 4; i < toks.size(); ++i) {
      double s = parse_double(toks[i], path);
      if (!(s > 0.0)) fail(ErrorCode::kParse, path + ": non-positive span length");
      link.spans_km.push_back(s);
      sum += s;
    }
    if (std::abs(sum - link.total_km) > 1.0)
      fail(ErrorCode::kParse, path + ": link " + std::to_string(link.id) +
                                  " span sum does not match its declared total");
    for (const auto& node : {link.node_a, link.node_b})
      if (std::find(topo.nodes.begin(), topo.nodes.end(), node) == topo.nodes.end())
        topo.nodes.push_back(node);
    topo.links.push_back(std::move(link));
  }
  if (topo.links.empty()) fail(ErrorCode::kParse, path + ": no links");
  return topo;
}

void save_topology(const Topology& topo, const std::string& path) {
  auto os = open_output(path);
  write_version_line(os, "topology", 1);
  os << "# id node_a node_b total_km span_lengths_km\n";
  for (const auto& l : topo.links) {
    os << l.id << " " << l.node_a << " " << l.node_b << " " << fmt_double(l.total_km);
    for (size_t i = 0; i < l.spans_km.size(); ++i)
      os << (i == 0 ? " " : ",") << fmt_double(l.spans_km[i]);
    os << "\n";
  }
}

std::vector<double> random_spans_km(double total_km, std::uint64_t seed) {
  if (!(total_km > 0.0)) fail(ErrorCode::kInvalidArgument, "total length must be positive");
  Rng rng(seed);
  std::vector<double> spans;
  double rem = total_km;
  while (rem > 100.0) {
    double hi = std::min(100.0, rem - 36.0);
    double l = rng.uniform(36.0, hi);
    spans.push_back(l);
    rem -= l;
  }
  spans.push_back(rem);
  return spans;
}

const NetworkRow* NetworkReport::find(int link_id, Strategy s, GffMode g) const {
  for (const auto& r : rows)
    if (r.link_id == link_id && r.strategy == s && r.gff == g) return &r;
  return nullptr;
}

namespace {

LinkConfig link_for_topology_row(const LinkConfig& base, const TopologyLink& row,
                                 GffMode gff, double launch_power_dbm) {
  if (!base.span_template)
    fail(ErrorCode::kInvalidArgument, "network run needs a span_template in the link config");
  LinkConfig link = base;
  link.spans.clear();
  for (double len : row.spans_km) {
    SpanConfig s = *base.span_template;
    s.fiber.length_km = len;
    s.target_output_dbm = launch_power_dbm;
    s.gff = gff;
    link.spans.push_back(std::move(s));
  }
  link.span_template.reset();
  return link;
}

}  // namespace

NetworkReport run_network(const Topology& topo, const LinkConfig& base,
                          const NetworkOptions& opts) {
  if (opts.strategies.empty() || opts.gff_modes.empty())
    fail(ErrorCode::kInvalidArgument, "network run needs at least one strategy and gff mode");

  struct Job {
    const TopologyLink* row;
    std::vector<NetworkRow> rows;
  };
  std::vector<Job> jobs;
  jobs.reserve(topo.links.size());
  for (const auto& l : topo.links) jobs.push_back({&l, {}});

  auto run_one = [&](Job& job) {
    const TopologyLink& row = *job.row;
    for (GffMode gff : opts.gff_modes) {
      LinkConfig link;
      try {
        link = link_for_topology_row(base, row, gff, opts.launch_power_dbm);
      } catch (const std::exception& e) {
        for (Strategy s : opts.strategies)
          job.rows.push_back({row.id, row.total_km, s, gff, 0.0, 0.0, false, true, e.what(), {}});
        continue;
      }
      CascadeEvaluator evaluator(link);
      for (Strategy strategy : opts.strategies) {
        NetworkRow out;
        out.link_id = row.id;
        out.distance_km = row.total_km;
        out.strategy = strategy;
        out.gff = gff;
        try {
          OptimizationSpec spec;
          spec.strategy = strategy;
          spec.cost = default_cost_for(strategy);
          spec.iterations = opts.iterations;
          spec.learning_rate = opts.learning_rate;
          spec.softmin_beta = opts.softmin_beta;
          spec.seed = opts.seed + static_cast<std::uint64_t>(row.id);
          OptimizeResult r = optimize(evaluator, spec);
          out.min_snr_db = r.full_report.min_snr_db();
          out.excursion_db = r.full_report.excursion_db();
          out.converged = r.converged;
          out.profile_dbm = to_db(r.profile).values();
        } catch (const std::exception& e) {
          out.failed = true;
          out.error = e.what();
        }
        job.rows.push_back(std::move(out));
      }
    }
  };

  unsigned hw = std::thread::hardware_concurrency();
  int n_threads = opts.threads > 0 ? opts.threads : static_cast<int>(hw > 0 ? hw : 1);
  n_threads = std::min<int>(n_threads, static_cast<int>(jobs.size()));
  if (n_threads <= 1) {
    for (auto& job : jobs) run_one(job);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        run_one(jobs[i]);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  NetworkReport report;
  for (auto& job : jobs)
    for (auto& r : job.rows) report.rows.push_back(std::move(r));
  return report;
}

void save_network_report_csv(const NetworkReport& report, const std::string& path) {
  auto os = open_output(path);
  write_version_line(os, "network-report", 1);
  os << "link_id,distance_km,strategy,gff,min_snr_dB,excursion_dB,converged,failed,error\n";
  for (const auto& r : report.rows) {
    os << r.link_id << "," << fmt_double(r.distance_km) << "," << to_string(r.strategy) << ","
       << to_string(r.gff) << "," << fmt_double(r.min_snr_db) << "," << fmt_double(r.excursion_db)
       << "," << (r.converged ? 1 : 0) << "," << (r.failed ? 1 : 0) << "," << r.error << "\n";
  }
}

std::vector<SweepRow> sweep_launch_power(const LinkConfig& link,
                                         const std::vector<double>& powers_dbm,
                                         const std::vector<Strategy>& strategies,
                                         const OptimizationSpec& base_spec) {
  std::vector<SweepRow> rows;
  for (double p : powers_dbm) {
    LinkConfig sweep_link = link;
    for (auto& s : sweep_link.spans) s.target_output_dbm = p;
    CascadeEvaluator evaluator(sweep_link);  // validates the power against the device maximum
    for (Strategy strategy : strategies) {
      OptimizationSpec spec = base_spec;
      spec.strategy = strategy;
      spec.cost = default_cost_for(strategy);
      OptimizeResult r = optimize(evaluator, spec);
      rows.push_back({p, strategy, r.full_report.min_snr_db(), r.full_report.excursion_db()});
    }
  }
  return rows;
}

void save_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  auto os = open_output(path);
  write_version_line(os, "sweep", 1);
  os << "launch_power_dBm,strategy,min_snr_dB,excursion_dB\n";
  for (const auto& r : rows)
    os << fmt_double(r.launch_power_dbm) << "," << to_string(r.strategy) << ","
       << fmt_double(r.min_snr_db) << "," << fmt_double(r.excursion_db) << "\n";
}

}  // namespace wdmopt
