#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gasflow::forecast {

/// Per (arc, period) quantile triple at level alpha.
struct ForecastIntervals {
  double alpha = 0.05;
  std::size_t periods = 0;
  std::vector<std::string> arcs;
  std::vector<std::vector<double>> lower;   // q_alpha      [arc][t]
  std::vector<std::vector<double>> median;  // q_0.5
  std::vector<std::vector<double>> upper;   // q_(1-alpha)
  /// Cells whose three predictions had to be sorted.
  std::size_t rearranged = 0;
};

}  // namespace gasflow::forecast
