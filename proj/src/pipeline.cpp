#include "csm/pipeline.hpp"

#include <algorithm>

#include "csm/common.hpp"

namespace csm {

PanelBundle PanelBundle::build(PricePanel panel, TargetSpec spec,
                               double price_floor) {
  PanelBundle b;
  b.panel = std::move(panel);
  b.target_spec = spec;
  b.returns = daily_returns(b.panel);
  b.vol = ewm_volatility(b.returns);
  b.calendar = month_end_calendar(b.panel);

  MacdSeries macd(b.panel);
  for (int row : b.calendar.indices) {
    UniverseSnapshot universe =
        eligible_universe(b.panel, b.vol, row, price_floor);
    FeatureGroup raw =
        build_features(b.panel, b.vol, macd, universe, /*standardize=*/false);
    b.std_features.push_back(standardize_features(raw));
    b.raw_features.push_back(std::move(raw));
    b.universes.push_back(std::move(universe));
  }
  return b;
}

RankingDataset PanelBundle::training_dataset(int retune_rebalance,
                                             bool standardized,
                                             int max_window_months) const {
  if (retune_rebalance <= 0 || retune_rebalance >= calendar.size())
    throw ValidationError("training_dataset: retune index out of range");
  const int retune_row = calendar.indices[retune_rebalance];
  const int first = max_window_months > 0
                        ? std::max(0, retune_rebalance - max_window_months)
                        : 0;
  const auto& source = standardized ? std_features : raw_features;
  std::vector<FeatureGroup> usable;
  for (int i = first; i < retune_rebalance; ++i) {
    // The forward window must finish before the retune date.
    if (calendar.indices[i] + target_spec.horizon_days < retune_row)
      usable.push_back(source[i]);
  }
  return build_dataset(panel, vol, usable, target_spec);
}

}  // namespace csm
