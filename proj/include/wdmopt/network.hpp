// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wdmopt/cascade.hpp"
#include "wdmopt/optimize.hpp"

namespace wdmopt {

struct TopologyLink {
  int id = 0;
  std::string node_a, node_b;
  double total_km = 0.0;
  std::vector<double> spans_km;
};

struct Topology {
  std::vector<std::string> nodes;
  std::vector<TopologyLink> links;
};

// One link per row: id node_a node_b total_km span1,span2,...
// The declared total must match the span sum within 1 km.
Topology load_topology(const std::string& path);
void save_topology(const Topology& topo, const std::string& path);

// Seeded span-length generator: uniform 36..100 km pieces summing to the
// requested total (the last span absorbs the remainder, never below 36 km
// unless the whole link is shorter).
std::vector<double> random_spans_km(double total_km, std::uint64_t seed);

struct NetworkOptions {
  std::vector<Strategy> strategies;
  std::vector<GffMode> gff_modes;
  double launch_power_dbm = 18.0;  // per-span EDFA target output
  int iterations = 400;
  double learning_rate = 0.05;
  double softmin_beta = 10.0;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
};

struct NetworkRow {
  int link_id = 0;
  double distance_km = 0.0;
  Strategy strategy = Strategy::kFlatInputReference;
  GffMode gff = GffMode::kNone;
  double min_snr_db = 0.0;
  double excursion_db = 0.0;
  bool converged = true;
  bool failed = false;
  std::string error;
  std::vector<double> profile_dbm;  // optimized input profile
};

struct NetworkReport {
  std::vector<NetworkRow> rows;

  const NetworkRow* find(int link_id, Strategy s, GffMode g) const;
};

// Builds one link per topology row from the template span in `base` (lengths
// substituted, GFF mode applied), optimizes it under every requested strategy
// and collects the comparison table. Links run in parallel; per-link failures
// are recorded and the run continues.
NetworkReport run_network(const Topology& topo, const LinkConfig& base,
                          const NetworkOptions& opts);

void save_network_report_csv(const NetworkReport& report, const std::string& path);

struct SweepRow {
  double launch_power_dbm = 0.0;
  Strategy strategy = Strategy::kFlatInputReference;
  double min_snr_db = 0.0;
  double excursion_db = 0.0;
};

// Re-optimizes a link at each launch power (EDFA target output applied to
// every span). Powers must stay within the 18 dBm device maximum.
std::vector<SweepRow> sweep_launch_power(const LinkConfig& link, const std::vector<double>& powers_dbm,
                                         const std::vector<Strategy>& strategies,
                                         const OptimizationSpec& base_spec);

void save_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

std::string to_string(GffMode g);
GffMode gff_mode_from_string(const std::string& s);

}  // namespace wdmopt
