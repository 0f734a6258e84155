// SPDX-License-Identifier: Apache-2.0
#include "wdmopt/dataset.hpp"

#include "wdmopt/errors.hpp"
#include "wdmopt/textio.hpp"

namespace wdmopt {

void save_dataset(const Dataset& ds, const std::string& path, int skipped_infeasible) {
  auto os = open_output(path);
  write_version_line(os, "dataset", 1);
  int n = ds.grid->count();
  os << "grid " << n << " " << fmt_double(ds.grid->frequency_thz(0)) << " "
     << fmt_double(ds.grid->spacing_ghz()) << " " << fmt_double(ds.grid->symbol_rate_gbd()) << "\n";
  os << "skipped_infeasible " << skipped_infeasible << "\n";
  os << "# columns: unit_id profile_index total_input_dBm total_output_dBm"
     << " input_dBm[" << n << "] gain_dB[" << n << "] nf_dB[" << n << "]\n";
  for (const auto& s : ds.samples) {
    os << s.unit_id << " " << s.profile_index << " " << fmt_double(s.total_input_dbm) << " "
       << fmt_double(s.total_output_dbm);
    for (double v : s.input_dbm) os << " " << fmt_double(v);
    for (double v : s.gain_db) os << " " << fmt_double(v);
    for (double v : s.nf_db) os << " " << fmt_double(v);
    os << "\n";
  }
}

Dataset load_dataset(const std::string& path) {
  auto is = open_input(path);
  expect_version_line(is, path, "dataset", 1);
  Dataset ds;
  std::string line;
  int n = 0;
  while (next_content_line(is, line)) {
    auto toks = tokenize(line);
    if (toks[0] == "grid" && toks.size() == 5) {
      n = parse_int(toks[1], path);
      ds.grid = std::make_shared<const ChannelGrid>(parse_double(toks[2], path),
                                                    parse_double(toks[3], path), n,
                                                    parse_double(toks[4], path));
    } else if (toks[0] == "skipped_infeasible" && toks.size() == 2) {
      // informational
    } else {
      if (!ds.grid) fail(ErrorCode::kParse, path + ": sample row before grid line");
      size_t want = 4 + 3 * static_cast<size_t>(n);
      if (toks.size() != want)
        fail(ErrorCode::kParse, path + ": sample row has " + std::to_string(toks.size()) +
                                    " fields, expected " + std::to_string(want));
      CharacterizationSample s;
      s.unit_id = toks[0];
      s.profile_index = parse_int(toks[1], path);
      s.total_input_dbm = parse_double(toks[2], path);
      s.total_output_dbm = parse_double(toks[3], path);
      s.input_dbm.resize(static_cast<size_t>(n));
      s.gain_db.resize(static_cast<size_t>(n));
      s.nf_db.resize(static_cast<size_t>(n));
      size_t k = 4;
      for (int i = 0; i < n; ++i) s.input_dbm[static_cast<size_t>(i)] = parse_double(toks[k++], path);
      for (int i = 0; i < n; ++i) s.gain_db[static_cast<size_t>(i)] = parse_double(toks[k++], path);
      for (int i = 0; i < n; ++i) s.nf_db[static_cast<size_t>(i)] = parse_double(toks[k++], path);
      ds.samples.push_back(std::move(s));
    }
  }
  if (!ds.grid) fail(ErrorCode::kParse, path + ": missing grid line");
  return ds;
}

}  // namespace wdmopt
