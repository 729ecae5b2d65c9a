#pragma once

#include <Eigen/Dense>
#include <vector>

#include "csm/features.hpp"
#include "csm/market_data.hpp"

namespace csm {

/// How forward performance is measured for targets and grades.
struct TargetSpec {
  int horizon_days = 21;      // trading days ahead
  bool vol_normalized = true; // divide by sigma_daily * sqrt(horizon)
};

/// Forward return over horizon_days trading days, optionally divided by the
/// monthly-scale volatility (daily EWM std * sqrt(horizon)). Missing when
/// the forward window runs past the data or the asset's live range.
double forward_target(const PricePanel& panel, const VolEstimate& vol,
                      int asset, int t, const TargetSpec& spec = {});

/// As above but measured to an explicit end row (the next rebalance);
/// delisted assets are held to the last valid price.
double realized_target(const PricePanel& panel, const VolEstimate& vol,
                       int asset, int t0, int t1, bool vol_normalized);

/// Decile grades 0..9 (9 = top decile) for one rebalance group: targets are
/// ranked ascending with ties broken by ascending asset id, then
/// grade = floor(rank * 10 / N) clamped to 9. Requires >= 10 valid targets.
/// Returns an empty vector (with a warning) otherwise.
std::vector<int> decile_grades(const std::vector<double>& targets,
                               const std::vector<int>& asset_ids);

/// One rebalance worth of training rows; `assets`, feature rows, grades and
/// targets are all aligned.
struct RankingGroup {
  int rebalance_row = -1;
  Date date;
  std::vector<int> assets;
  Eigen::MatrixXd X;
  std::vector<int> grades;
  std::vector<double> targets;

  int size() const { return static_cast<int>(assets.size()); }
};

/// Ordered list of rebalance groups; features at each rebalance use data up
/// to that rebalance only.
struct RankingDataset {
  std::vector<RankingGroup> groups;

  int size() const { return static_cast<int>(groups.size()); }
  int total_rows() const;
};

/// Joins feature groups with forward targets and grades. Groups whose
/// forward window is unavailable or with fewer than 10 labeled rows are
/// dropped. Throws ValidationError if nothing survives.
RankingDataset build_dataset(const PricePanel& panel, const VolEstimate& vol,
                             const std::vector<FeatureGroup>& features,
                             const TargetSpec& spec = {});

}  // namespace csm
