#pragma once

#include <vector>

#include "csm/features.hpp"
#include "csm/labeling.hpp"
#include "csm/market_data.hpp"

namespace csm {

/// Everything derived from a price panel that the training and backtest
/// stages share: returns, volatility, rebalance calendar, per-rebalance
/// universes and feature groups (raw and cross-sectionally standardized).
/// All of it is a pure function of the panel, computed once.
struct PanelBundle {
  PricePanel panel;
  ReturnsPanel returns;
  VolEstimate vol;
  RebalanceCalendar calendar;
  std::vector<UniverseSnapshot> universes;
  std::vector<FeatureGroup> raw_features;
  std::vector<FeatureGroup> std_features;
  TargetSpec target_spec;

  static PanelBundle build(PricePanel panel, TargetSpec spec = {},
                           double price_floor = 1.0);

  /// Groups strictly before the retune rebalance whose forward target
  /// window also completes before it (no leakage into training). The window
  /// expands from the data start unless max_window_months > 0 caps it to a
  /// rolling span.
  RankingDataset training_dataset(int retune_rebalance,
                                  bool standardized = true,
                                  int max_window_months = 0) const;

  int n_rebalances() const { return calendar.size(); }
};

}  // namespace csm
