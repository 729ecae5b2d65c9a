#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "csm/dates.hpp"

namespace csm {

/// Daily closing prices, dates x assets, NaN where an asset is not live.
/// After ingestion every asset column is contiguous: interior gaps of up to
/// five trading days are forward-filled, longer gaps split the column and the
/// longest segment is kept.
struct PricePanel {
  std::vector<Date> dates;          // strictly increasing trading days
  std::vector<std::string> assets;  // sorted, unique
  Eigen::MatrixXd close;            // rows = dates, cols = assets
  std::vector<int> live_begin;      // first live row per asset
  std::vector<int> live_end;        // last live row per asset (inclusive)

  int n_dates() const { return static_cast<int>(dates.size()); }
  int n_assets() const { return static_cast<int>(assets.size()); }
  bool live_at(int t, int asset) const {
    return t >= live_begin[asset] && t <= live_end[asset];
  }
  /// Row index of a date, -1 if absent.
  int date_index(const Date& d) const;
  /// Recomputes live ranges from the close matrix and checks invariants.
  void finalize();
};

/// Daily simple returns aligned to panel rows; row t holds the return from
/// t-1 to t, row 0 is missing.
struct ReturnsPanel {
  Eigen::MatrixXd r;
};

/// Annualized ex-ante volatility per (date, asset); missing until the
/// estimator has seen min_obs daily returns.
struct VolEstimate {
  Eigen::MatrixXd annualized;
  double daily(int t, int asset) const;
};

/// Row indices of the last trading day of each calendar month.
struct RebalanceCalendar {
  std::vector<int> indices;
  int size() const { return static_cast<int>(indices.size()); }
};

/// Assets passing all eligibility filters at one rebalance.
struct UniverseSnapshot {
  int rebalance_row = -1;       // row into PricePanel.dates
  std::vector<int> assets;      // column indices, ascending
  int size() const { return static_cast<int>(assets.size()); }
};

/// One record of the long-format input CSV.
struct PriceRecord {
  Date date;
  std::string asset;
  double close = 0.0;
};

/// Builds a clean panel from records: union calendar, forward-fill of short
/// interior gaps, contiguity enforcement. Throws ValidationError on
/// duplicate (date, asset) pairs or non-positive prices.
PricePanel make_panel(std::vector<PriceRecord> records);

/// Reads `date,asset,close` CSV (header required, ISO dates). Throws
/// ParseError with the offending line number on malformed rows.
PricePanel load_prices(const std::string& path);

RebalanceCalendar month_end_calendar(const PricePanel& panel);

ReturnsPanel daily_returns(const PricePanel& panel);

/// p_t / p_{t-window} - 1; missing when the window leaves the live range.
double cumulative_return(const PricePanel& panel, int asset, int t,
                         int window);

/// Return held from row t0 to row t1; if the asset delists before t1 the
/// position is held to month end at the last valid price.
double holding_return(const PricePanel& panel, int asset, int t0, int t1);

/// Exponentially weighted std of daily returns (adjusted weights,
/// bias-corrected), annualized with sqrt(252). alpha = 2 / (span + 1).
VolEstimate ewm_volatility(const ReturnsPanel& returns, int span = 63,
                           int min_obs = 21);

/// Filters: price above the floor at the rebalance, a full year of valid
/// prices, and a valid volatility estimate.
UniverseSnapshot eligible_universe(const PricePanel& panel,
                                   const VolEstimate& vol, int rebalance_row,
                                   double price_floor = 1.0,
                                   int lookback_days = 252);

/// Geometric random-walk panel with an AR(1)-persistent latent drift per
/// asset, scaled by signal_strength in [0, 1], so past returns predict
/// future returns with tunable strength. Deterministic per seed.
PricePanel synthetic_panel(int n_assets, int n_years, double signal_strength,
                           uint64_t seed);

}  // namespace csm
