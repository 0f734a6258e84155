// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end over the wdmopt shared library: dataset generation,
// surrogate training and evaluation, link prediction, launch-power
// optimization, power sweeps, network runs and CSV plotting.
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "svg_plot.hpp"
#include "wdmopt/wdmopt.h"

namespace {

struct OracleDeleter {
  void operator()(wdm_oracle* p) const { wdm_oracle_free(p); }
};
struct ModelDeleter {
  void operator()(wdm_model* p) const { wdm_model_free(p); }
};
struct LinkDeleter {
  void operator()(wdm_link* p) const { wdm_link_free(p); }
};
using OraclePtr = std::unique_ptr<wdm_oracle, OracleDeleter>;
using ModelPtr = std::unique_ptr<wdm_model, ModelDeleter>;
using LinkPtr = std::unique_ptr<wdm_link, LinkDeleter>;

[[noreturn]] void die(const std::string& stage, wdm_status st) {
  std::fprintf(stderr, "wdmopt: %s failed (%s): %s\n", stage.c_str(), wdm_status_name(st),
               wdm_last_error());
  std::exit(1);
}

void check(const std::string& stage, wdm_status st) {
  if (st != WDM_OK) die(stage, st);
}

OraclePtr load_oracle_or_die(const std::string& path) {
  wdm_oracle* o = nullptr;
  check("loading oracle " + path, wdm_oracle_load(path.c_str(), &o));
  return OraclePtr(o);
}

LinkPtr load_link_or_die(const std::string& path) {
  wdm_link* l = nullptr;
  check("loading link config " + path, wdm_link_load(path.c_str(), &l));
  return LinkPtr(l);
}

std::string file_format_help() {
  return R"(File formats (all start with a version line "# wdmopt <kind> v1"):
  grid      one row: count start_THz spacing_GHz symbol_rate_GBd
  spectrum  one row per channel: frequency_THz value (dBm for power, dB for B2B SNR;
            B2B files may list a subset of carriers, interpolated in dB onto the grid)
  oracle    unit_id/length_m/background_loss_db_m/max_total_output_dbm keys, a grid
            line, then one row per channel: frequency_THz alpha_dB_per_m gstar_dB_per_m
  dataset   grid line, then one row per sample: unit_id profile_index total_input_dBm
            total_output_dBm input_dBm[n] gain_dB[n] nf_dB[n]
  model     dims/seed/envelope lines followed by scaler and weight blocks
  link      grid or grid_file, first_input_dbm, b2b_file, edfa <id> <gain> <nf>,
            fiber key=value defaults, span/span_template lines (length_km=,
            target_output_dbm=, srs=, nli=, gff=, plus fiber overrides)
  topology  one row per link: id node_a node_b total_km span1,span2,...
Relative paths inside config files resolve against the config file directory,
then against $WDMOPT_CONFIG_DIR.)";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wdmopt - multi-span WDM link SNR prediction and launch-power optimization"};
  app.footer(file_format_help());
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "cap worker threads (0 = hardware concurrency)");

  // --- gen-dataset
  auto* gen = app.add_subcommand("gen-dataset", "generate an EDFA characterization dataset");
  std::string gen_oracle, gen_out;
  wdm_dataset_opts gen_opts;
  wdm_dataset_opts_init(&gen_opts);
  double gen_perturb = 0.0;
  std::uint64_t gen_perturb_seed = 1;
  gen->add_option("--oracle", gen_oracle, "oracle params file")->required();
  gen->add_option("--out", gen_out, "output dataset file")->required();
  gen->add_option("--profiles", gen_opts.profiles, "number of random input profiles");
  gen->add_option("--seed", gen_opts.seed, "RNG seed");
  gen->add_option("--excursion", gen_opts.excursion_max_db, "max profile excursion (dB)");
  gen->add_option("--tilt", gen_opts.tilt_max_db, "max profile tilt (dB)");
  gen->add_option("--perturb", gen_perturb, "perturb the oracle unit by this magnitude first");
  gen->add_option("--perturb-seed", gen_perturb_seed, "seed for the unit perturbation");

  // --- train
  auto* tr = app.add_subcommand("train", "train a gain or NF surrogate on a dataset");
  std::string tr_dataset, tr_kind, tr_out;
  wdm_train_opts tr_opts;
  wdm_train_opts_init(&tr_opts);
  tr->add_option("--dataset", tr_dataset, "dataset file")->required();
  tr->add_option("--kind", tr_kind, "gain|nf")->required();
  tr->add_option("--out", tr_out, "output model file")->required();
  tr->add_option("--seed", tr_opts.seed, "RNG seed");
  tr->add_option("--hidden", tr_opts.hidden_dim, "hidden layer width");
  tr->add_option("--epochs", tr_opts.max_epochs, "max training epochs");
  tr->add_option("--batch", tr_opts.batch_size, "batch size");
  tr->add_option("--lr", tr_opts.learning_rate, "learning rate");

  // --- eval-model
  auto* ev = app.add_subcommand("eval-model", "evaluate a surrogate against a dataset");
  std::string ev_model, ev_dataset, ev_mode = "intra", ev_out = "eval";
  ev->add_option("--model", ev_model, "model file")->required();
  ev->add_option("--dataset", ev_dataset, "dataset file")->required();
  ev->add_option("--mode", ev_mode, "intra|inter (label for the report rows)");
  ev->add_option("--out", ev_out, "output CSV prefix");

  // --- predict
  auto* pr = app.add_subcommand("predict", "simulate a link and report per-channel SNR");
  std::string pr_link, pr_input = "flat", pr_out = "snr_report.csv";
  pr->add_option("--link", pr_link, "link config file")->required();
  pr->add_option("--input", pr_input, "input spectrum file or 'flat'");
  pr->add_option("--out", pr_out, "output report CSV");

  // --- optimize
  auto* op = app.add_subcommand("optimize", "optimize the input power profile of a link");
  std::string op_link, op_strategy = "flat-snr-full", op_cost, op_out = "profile.txt", op_trace;
  wdm_optimize_opts op_opts;
  wdm_optimize_opts_init(&op_opts);
  op->add_option("--link", op_link, "link config file")->required();
  op->add_option("--strategy", op_strategy,
                 "flat-input-reference|flat-received-power|flat-snr-linear|flat-snr-full");
  op->add_option("--cost", op_cost, "min-snr|throughput|psd-flatness (default per strategy)");
  op->add_option("--out", op_out, "output profile (spectrum file)");
  op->add_option("--trace", op_trace, "per-iteration trace CSV");
  op->add_option("--iterations", op_opts.iterations, "max iterations");
  op->add_option("--lr", op_opts.learning_rate, "step size (dB scale)");
  op->add_option("--softmin-beta", op_opts.softmin_beta, "soft-min temperature (1/dB)");
  op->add_option("--seed", op_opts.seed, "RNG seed");

  // --- sweep-power
  auto* sw = app.add_subcommand("sweep-power", "min-SNR versus total launch power");
  std::string sw_link, sw_strategies = "flat-snr-linear,flat-snr-full",
              sw_out = "sweep.csv";
  std::vector<double> sw_powers;
  wdm_optimize_opts sw_opts;
  wdm_optimize_opts_init(&sw_opts);
  sw->add_option("--link", sw_link, "link config file")->required();
  sw->add_option("--powers", sw_powers, "launch powers in dBm")->required()->expected(-1);
  sw->add_option("--strategies", sw_strategies, "comma-separated strategy list");
  sw->add_option("--out", sw_out, "output CSV");
  sw->add_option("--iterations", sw_opts.iterations, "max iterations per point");
  sw->add_option("--seed", sw_opts.seed, "RNG seed");

  // --- network
  auto* nw = app.add_subcommand("network", "optimize every link of a topology");
  std::string nw_topology, nw_link, nw_strategies = "flat-input-reference,flat-snr-full",
              nw_gff = "none,ideal", nw_out = "network_out";
  wdm_network_opts nw_opts;
  wdm_network_opts_init(&nw_opts);
  nw->add_option("--topology", nw_topology, "topology file")->required();
  nw->add_option("--link", nw_link, "link template config (must contain span_template)")
      ->required();
  nw->add_option("--strategies", nw_strategies, "comma-separated strategy list");
  nw->add_option("--gff", nw_gff, "comma-separated GFF modes: none,ideal");
  nw->add_option("--out", nw_out, "output directory");
  nw->add_option("--launch-power", nw_opts.launch_power_dbm, "per-span EDFA output (dBm)");
  nw->add_option("--iterations", nw_opts.iterations, "max iterations per optimization");
  nw->add_option("--seed", nw_opts.seed, "RNG seed");

  // --- plot
  auto* pl = app.add_subcommand("plot", "render a wdmopt CSV as an SVG line chart");
  std::string pl_report, pl_out = "plot.svg", pl_x, pl_y, pl_group, pl_title = "wdmopt";
  pl->add_option("--report", pl_report, "input CSV")->required();
  pl->add_option("--out", pl_out, "output SVG");
  pl->add_option("--x", pl_x, "x column (default: first column)");
  pl->add_option("--y", pl_y, "comma-separated y columns (default: numeric columns)");
  pl->add_option("--group", pl_group, "split series by this label column");
  pl->add_option("--title", pl_title, "plot title");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    OraclePtr oracle = load_oracle_or_die(gen_oracle);
    if (gen_perturb > 0.0) {
      wdm_oracle* p = nullptr;
      check("perturbing oracle", wdm_oracle_perturb(oracle.get(), gen_perturb_seed, gen_perturb, &p));
      oracle.reset(p);
    }
    int n_samples = 0, n_skipped = 0;
    check("generating dataset",
          wdm_generate_dataset(oracle.get(), &gen_opts, gen_out.c_str(), &n_samples, &n_skipped));
    std::printf("wrote %d samples to %s (%d infeasible combinations skipped)\n", n_samples,
                gen_out.c_str(), n_skipped);
  } else if (tr->parsed()) {
    double mse = 0.0;
    int best_epoch = 0;
    check("training " + tr_kind + " model",
          wdm_train(tr_dataset.c_str(), tr_kind.c_str(), &tr_opts, tr_out.c_str(), &mse,
                    &best_epoch));
    std::printf("trained %s model -> %s (best validation MSE %.6g dB^2 at epoch %d)\n",
                tr_kind.c_str(), tr_out.c_str(), mse, best_epoch);
  } else if (ev->parsed()) {
    wdm_model* m = nullptr;
    check("loading model " + ev_model, wdm_model_load(ev_model.c_str(), &m));
    ModelPtr model(m);
    double mse = 0.0;
    check("evaluating model", wdm_model_evaluate(model.get(), ev_dataset.c_str(), ev_mode.c_str(),
                                                 ev_out.c_str(), &mse));
    std::printf("%s evaluation: overall MSE %.6g dB^2; reports at %s_*.csv\n", ev_mode.c_str(),
                mse, ev_out.c_str());
  } else if (pr->parsed()) {
    LinkPtr link = load_link_or_die(pr_link);
    int n = 0;
    wdm_link_channels(link.get(), &n);
    std::vector<double> input;
    const double* input_ptr = nullptr;
    if (pr_input != "flat") {
      input.resize(static_cast<size_t>(n));
      check("reading input spectrum " + pr_input,
            wdm_link_read_spectrum(link.get(), pr_input.c_str(), input.data()));
      input_ptr = input.data();
    }
    std::vector<double> snr(static_cast<size_t>(n));
    int warnings = 0;
    check("simulating link",
          wdm_link_simulate(link.get(), input_ptr, nullptr, nullptr, nullptr, snr.data(),
                            &warnings));
    check("writing report " + pr_out,
          wdm_link_simulate_csv(link.get(), input_ptr, pr_out.c_str()));
    double mn = snr[0], mx = snr[0];
    for (double s : snr) {
      mn = std::min(mn, s);
      mx = std::max(mx, s);
    }
    std::printf("predicted SNR: min %.3f dB, max %.3f dB, excursion %.3f dB -> %s\n", mn, mx,
                mx - mn, pr_out.c_str());
    if (warnings > 0)
      std::printf("note: %d surrogate queries extrapolated beyond the training envelope\n",
                  warnings);
  } else if (op->parsed()) {
    LinkPtr link = load_link_or_die(op_link);
    int n = 0;
    wdm_link_channels(link.get(), &n);
    op_opts.strategy = op_strategy.c_str();
    op_opts.cost = op_cost.empty() ? nullptr : op_cost.c_str();
    std::vector<double> profile(static_cast<size_t>(n));
    double min_snr = 0.0, excursion = 0.0;
    int converged = 0;
    check("optimizing link",
          wdm_link_optimize(link.get(), &op_opts, profile.data(), &min_snr, &excursion,
                            &converged, op_trace.empty() ? nullptr : op_trace.c_str()));
    check("writing profile " + op_out,
          wdm_link_write_spectrum(link.get(), op_out.c_str(), profile.data()));
    std::printf("%s: min SNR %.3f dB, excursion %.3f dB, %s -> %s\n", op_strategy.c_str(),
                min_snr, excursion, converged ? "converged" : "iteration budget exhausted",
                op_out.c_str());
  } else if (sw->parsed()) {
    LinkPtr link = load_link_or_die(sw_link);
    check("sweeping launch power",
          wdm_link_sweep_power(link.get(), sw_powers.data(), static_cast<int>(sw_powers.size()),
                               sw_strategies.c_str(), &sw_opts, sw_out.c_str()));
    std::printf("swept %zu launch powers -> %s\n", sw_powers.size(), sw_out.c_str());
  } else if (nw->parsed()) {
    nw_opts.strategies = nw_strategies.c_str();
    nw_opts.gff_modes = nw_gff.c_str();
    nw_opts.threads = threads;
    check("running network",
          wdm_network_run(nw_topology.c_str(), nw_link.c_str(), &nw_opts, nw_out.c_str()));
    std::printf("network run complete -> %s/network_report.csv\n", nw_out.c_str());
  } else if (pl->parsed()) {
    try {
      wdmcli::CsvTable table = wdmcli::load_csv(pl_report);
      int xcol = pl_x.empty() ? 0 : table.column_index(pl_x);
      if (xcol < 0) throw std::runtime_error("no column named '" + pl_x + "'");
      std::vector<int> ycols;
      if (pl_y.empty()) {
        for (size_t c = 0; c < table.columns.size(); ++c) {
          if (static_cast<int>(c) == xcol) continue;
          if (!table.rows.empty()) {
            char* end = nullptr;
            std::strtod(table.rows[0][c].c_str(), &end);
            if (end != table.rows[0][c].c_str() && *end == '\0') ycols.push_back(static_cast<int>(c));
          }
        }
      } else {
        std::string cur;
        for (char ch : pl_y + ",") {
          if (ch == ',') {
            int c = table.column_index(cur);
            if (c < 0) throw std::runtime_error("no column named '" + cur + "'");
            ycols.push_back(c);
            cur.clear();
          } else {
            cur.push_back(ch);
          }
        }
      }
      int gcol = pl_group.empty() ? -1 : table.column_index(pl_group);
      if (!pl_group.empty() && gcol < 0)
        throw std::runtime_error("no column named '" + pl_group + "'");
      std::vector<wdmcli::PlotSeries> series;
      auto series_for = [&](const std::string& name) -> wdmcli::PlotSeries& {
        for (auto& s : series)
          if (s.name == name) return s;
        series.push_back({name, {}, {}});
        return series.back();
      };
      for (const auto& row : table.rows) {
        char* end = nullptr;
        double xv = std::strtod(row[static_cast<size_t>(xcol)].c_str(), &end);
        if (end == row[static_cast<size_t>(xcol)].c_str()) continue;
        for (int c : ycols) {
          double yv = std::strtod(row[static_cast<size_t>(c)].c_str(), &end);
          if (end == row[static_cast<size_t>(c)].c_str()) continue;
          std::string name = table.columns[static_cast<size_t>(c)];
          if (gcol >= 0) name += " " + row[static_cast<size_t>(gcol)];
          auto& s = series_for(name);
          s.x.push_back(xv);
          s.y.push_back(yv);
        }
      }
      if (series.empty()) throw std::runtime_error("nothing to plot");
      wdmcli::write_svg_plot(pl_out, pl_title, series,
                             table.columns[static_cast<size_t>(xcol)],
                             ycols.size() == 1 ? table.columns[static_cast<size_t>(ycols[0])] : "");
      std::printf("wrote %s (%zu series)\n", pl_out.c_str(), series.size());
    } catch (const std::exception& e) {
      std::fprintf(stderr, "wdmopt: plot failed: %s\n", e.what());
      return 1;
    }
  }
  return 0;
}
