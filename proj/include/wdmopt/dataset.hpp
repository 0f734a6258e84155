// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "wdmopt/grid.hpp"
#include "wdmopt/oracle.hpp"

namespace wdmopt {

struct Dataset {
  GridPtr grid;
  std::vector<CharacterizationSample> samples;

  int channel_count() const { return grid->count(); }
};

void save_dataset(const Dataset& ds, const std::string& path, int skipped_infeasible = 0);
Dataset load_dataset(const std::string& path);

}  // namespace wdmopt
