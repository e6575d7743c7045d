#pragma once

#include <cstddef>
#include <cstdint>

#include "gasflow/forecast/forecaster.hpp"
#include "gasflow/network/network_io.hpp"

namespace gasflow::synthetic {

/// Three gasholders (BFG, COG, LDG), four conversion units, steam and power
/// demands, and one flare (emitted-gas demand) per holder.
/// Nominal supply is the noiseless seasonal profile for the periods
/// that follow a history of `history_length` points.
network::ModelDocument plant(std::size_t periods, std::size_t history_length = 1000);

struct HistoryOptions {
  std::size_t length = 1000;
  std::uint64_t seed = 2024;
  /// Multiplies the noise standard deviation of every arc.
  double noise_scale = 1.0;
};

/// Seasonal (24-period cycle) supply plus AR(1) noise for each supply arc.
forecast::History supply_history(const HistoryOptions& options);

/// Noiseless seasonal level of arc `arc` at time index `i`.
double seasonal_level(const std::string& arc, std::size_t i);

}  // namespace gasflow::synthetic
