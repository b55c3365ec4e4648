#pragma once

#include <string>
#include <vector>

#include "phasespace/estimate.hpp"

namespace phasespace {

/// Observable estimates on a time (or inverse-temperature) grid. Every row
/// holds one estimate per column.
struct MomentSeries {
  std::string axis = "t";
  std::vector<std::string> columns;
  std::vector<double> times;
  std::vector<std::vector<ObservableEstimate>> rows;
  std::vector<std::size_t> n_alive;

  std::size_t size() const { return times.size(); }

  std::size_t column(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c] == name) return c;
    }
    throw IndexError("MomentSeries: no column '" + name + "'");
  }

  const ObservableEstimate& at(std::size_t row, const std::string& name) const {
    return rows.at(row).at(column(name));
  }
};

/// Step-halving extrapolation 2 fine - coarse of two runs that share
/// trajectories, seeds and Wiener paths (coarse run with twice the noise
/// refinement). Cancels the first-order discretization error. Errors come
/// from the extrapolated block values, so the strong correlation between the
/// runs is accounted for.
MomentSeries richardson(const MomentSeries& coarse, const MomentSeries& fine);

}  // namespace phasespace
