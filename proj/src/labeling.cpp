#include "csm/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "csm/common.hpp"
#include "csm/log.hpp"

namespace csm {

double forward_target(const PricePanel& panel, const VolEstimate& vol,
                      int asset, int t, const TargetSpec& spec) {
  int t_fwd = t + spec.horizon_days;
  if (t_fwd >= panel.n_dates() || t_fwd > panel.live_end[asset] ||
      !panel.live_at(t, asset))
    return kMissing;
  double r = panel.close(t_fwd, asset) / panel.close(t, asset) - 1.0;
  if (!spec.vol_normalized) return r;
  double sigma_daily = vol.daily(t, asset);
  if (std::isnan(sigma_daily) || sigma_daily <= 0.0) return kMissing;
  return r / (sigma_daily * std::sqrt(static_cast<double>(spec.horizon_days)));
}

double realized_target(const PricePanel& panel, const VolEstimate& vol,
                       int asset, int t0, int t1, bool vol_normalized) {
  double r = holding_return(panel, asset, t0, t1);
  if (std::isnan(r) || !vol_normalized) return r;
  double sigma_daily = vol.daily(t0, asset);
  if (std::isnan(sigma_daily) || sigma_daily <= 0.0) return kMissing;
  return r / (sigma_daily * std::sqrt(static_cast<double>(t1 - t0)));
}

std::vector<int> decile_grades(const std::vector<double>& targets,
                               const std::vector<int>& asset_ids) {
  const int n = static_cast<int>(targets.size());
  int valid = 0;
  for (double t : targets)
    if (!std::isnan(t)) ++valid;
  if (valid < 10) {
    log_warn("decile_grades: only " + std::to_string(valid) +
             " valid targets, group dropped");
    return {};
  }
  std::vector<int> order;
  order.reserve(valid);
  for (int i = 0; i < n; ++i)
    if (!std::isnan(targets[i])) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (targets[a] != targets[b]) return targets[a] < targets[b];
    return asset_ids[a] < asset_ids[b];
  });
  std::vector<int> grades(n, -1);
  for (int rank = 0; rank < valid; ++rank) {
    int g = rank * 10 / valid;
    grades[order[rank]] = std::min(g, 9);
  }
  return grades;
}

int RankingDataset::total_rows() const {
  int n = 0;
  for (const auto& g : groups) n += g.size();
  return n;
}

RankingDataset build_dataset(const PricePanel& panel, const VolEstimate& vol,
                             const std::vector<FeatureGroup>& features,
                             const TargetSpec& spec) {
  RankingDataset out;
  for (const auto& fg : features) {
    const int n = fg.size();
    std::vector<double> targets(n, kMissing);
    for (int i = 0; i < n; ++i)
      targets[i] = forward_target(panel, vol, fg.assets[i],
                                  fg.rebalance_row, spec);
    // Keep only labeled rows, then grade.
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
      if (!std::isnan(targets[i])) keep.push_back(i);
    if (static_cast<int>(keep.size()) < 10) {
      if (!keep.empty() || n > 0)
        log_debug("rebalance " + fg.date.to_string() +
                  ": too few labeled rows, group skipped");
      continue;
    }
    RankingGroup group;
    group.rebalance_row = fg.rebalance_row;
    group.date = fg.date;
    group.X.resize(static_cast<int>(keep.size()), fg.X.cols());
    for (size_t i = 0; i < keep.size(); ++i) {
      group.assets.push_back(fg.assets[keep[i]]);
      group.targets.push_back(targets[keep[i]]);
      group.X.row(static_cast<int>(i)) = fg.X.row(keep[i]);
    }
    group.grades = decile_grades(group.targets, group.assets);
    if (group.grades.empty()) continue;
    out.groups.push_back(std::move(group));
  }
  if (out.groups.empty())
    throw ValidationError("build_dataset produced no usable groups");
  std::sort(out.groups.begin(), out.groups.end(),
            [](const RankingGroup& a, const RankingGroup& b) {
              return a.rebalance_row < b.rebalance_row;
            });
  return out;
}

}  // namespace csm
