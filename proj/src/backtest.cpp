#include "csm/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "csm/common.hpp"
#include "csm/log.hpp"

namespace csm {

std::vector<int> rank_scores(const Eigen::VectorXd& scores,
                             const std::vector<int>& asset_ids) {
  const int n = static_cast<int>(scores.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] < scores[b];
    return asset_ids[a] < asset_ids[b];
  });
  std::vector<int> rank(n);
  for (int pos = 0; pos < n; ++pos) rank[order[pos]] = pos + 1;
  return rank;
}

std::vector<int> select(const std::vector<int>& ranks, int n_side) {
  const int n = static_cast<int>(ranks.size());
  if (n < 20)
    throw ValidationError("select: fewer than 20 assets, cannot form portfolios");
  int short_cut, long_cut;
  if (n >= 2 * n_side) {
    short_cut = n_side;
    long_cut = n - n_side;
  } else {
    // Decile thresholding fallback for thin universes.
    short_cut = static_cast<int>(std::floor(0.1 * n));
    long_cut = static_cast<int>(std::floor(0.9 * n));
  }
  std::vector<int> x(n, 0);
  for (int i = 0; i < n; ++i) {
    if (ranks[i] <= short_cut) x[i] = -1;
    else if (ranks[i] > long_cut) x[i] = 1;
  }
  return x;
}

double portfolio_return(const std::vector<int>& positions,
                        const std::vector<double>& sigma,
                        const std::vector<double>& asset_returns,
                        double vol_target, int* n_held) {
  double sum = 0.0;
  int n = 0, dropped = 0;
  for (size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] == 0) continue;
    if (std::isnan(sigma[i]) || sigma[i] <= 0.0 ||
        std::isnan(asset_returns[i])) {
      ++dropped;
      continue;
    }
    sum += positions[i] * (vol_target / sigma[i]) * asset_returns[i];
    ++n;
  }
  if (dropped > 0)
    log_warn("portfolio_return: dropped " + std::to_string(dropped) +
             " held assets with missing data");
  if (n_held != nullptr) *n_held = n;
  if (n == 0) {
    log_warn("portfolio_return: no valid held positions");
    return 0.0;
  }
  return sum / n;
}

std::vector<int> decile_membership(const Eigen::VectorXd& scores,
                                   const std::vector<int>& asset_ids) {
  const int n = static_cast<int>(scores.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return asset_ids[a] < asset_ids[b];
  });
  std::vector<int> decile(n);
  for (int pos = 0; pos < n; ++pos)
    decile[order[pos]] = 10 - pos * 10 / n;
  return decile;
}

double decile_return(const Eigen::VectorXd& scores,
                     const std::vector<int>& asset_ids,
                     const std::vector<double>& sigma,
                     const std::vector<double>& asset_returns, int decile,
                     double vol_target) {
  if (decile < 1 || decile > 10)
    throw ValidationError("decile_return: decile must be in 1..10");
  std::vector<int> membership = decile_membership(scores, asset_ids);
  double sum = 0.0;
  int n = 0;
  for (size_t i = 0; i < membership.size(); ++i) {
    if (membership[i] != decile) continue;
    if (std::isnan(sigma[i]) || sigma[i] <= 0.0 ||
        std::isnan(asset_returns[i]))
      continue;
    sum += (vol_target / sigma[i]) * asset_returns[i];
    ++n;
  }
  return n > 0 ? sum / n : 0.0;
}

std::vector<double> rescale_to_target(const std::vector<double>& monthly,
                                      double vol_target) {
  if (monthly.size() < 2)
    throw ValidationError("rescale_to_target: series too short");
  double mean = std::accumulate(monthly.begin(), monthly.end(), 0.0) /
                static_cast<double>(monthly.size());
  double ss = 0.0;
  for (double r : monthly) ss += (r - mean) * (r - mean);
  double realized =
      std::sqrt(ss / (static_cast<double>(monthly.size()) - 1.0)) *
      std::sqrt(12.0);
  if (realized < 1e-12)
    throw ValidationError("rescale_to_target: zero realized volatility");
  double scale = vol_target / realized;
  std::vector<double> out(monthly.size());
  for (size_t i = 0; i < monthly.size(); ++i) out[i] = monthly[i] * scale;
  return out;
}

std::vector<double> rescale_to_target_rolling(
    const std::vector<double>& monthly, double vol_target, int window,
    int min_obs) {
  const int n = static_cast<int>(monthly.size());
  std::vector<double> base = rescale_to_target(monthly, vol_target);
  std::vector<double> out(n);
  for (int t = 0; t < n; ++t) {
    int lo = std::max(0, t - window + 1);
    int count = t - lo + 1;
    if (count < min_obs) {
      out[t] = base[t];  // whole-series scale until the window warms up
      continue;
    }
    double mean = 0.0;
    for (int i = lo; i <= t; ++i) mean += monthly[i];
    mean /= count;
    double ss = 0.0;
    for (int i = lo; i <= t; ++i) ss += (monthly[i] - mean) * (monthly[i] - mean);
    double realized = std::sqrt(ss / (count - 1)) * std::sqrt(12.0);
    out[t] = realized > 1e-12 ? monthly[t] * vol_target / realized : base[t];
  }
  return out;
}

BacktestResult run_backtest(const PanelBundle& bundle,
                            const std::vector<RebalanceScores>& scores,
                            const BacktestConfig& config) {
  BacktestResult result;
  for (const auto& rs : scores) {
    if (rs.rebalance + 1 >= bundle.calendar.size()) continue;  // no next month
    const int row = bundle.calendar.indices[rs.rebalance];
    const int row_next = bundle.calendar.indices[rs.rebalance + 1];

    // Keep rows with finite scores (heuristics drop assets they cannot score).
    std::vector<int> keep;
    for (int i = 0; i < static_cast<int>(rs.assets.size()); ++i)
      if (!std::isnan(rs.scores[i])) keep.push_back(i);
    if (static_cast<int>(keep.size()) < 20) {
      log_warn("run_backtest: under 20 scored assets at " +
               rs.date.to_string() + ", month skipped");
      continue;
    }
    Eigen::VectorXd y(keep.size());
    std::vector<int> assets(keep.size());
    std::vector<double> sigma(keep.size()), rets(keep.size()),
        realized_norm(keep.size());
    for (size_t i = 0; i < keep.size(); ++i) {
      int a = rs.assets[keep[i]];
      y[static_cast<int>(i)] = rs.scores[keep[i]];
      assets[i] = a;
      sigma[i] = bundle.vol.annualized(row, a);
      rets[i] = holding_return(bundle.panel, a, row, row_next);
      realized_norm[i] = realized_target(bundle.panel, bundle.vol, a, row,
                                         row_next,
                                         bundle.target_spec.vol_normalized);
    }

    std::vector<int> ranks = rank_scores(y, assets);
    std::vector<int> positions = select(ranks, config.n_side);
    double raw = portfolio_return(positions, sigma, rets, config.vol_target);

    result.dates.push_back(rs.date);
    result.raw.push_back(raw);
    for (int d = 1; d <= 10; ++d)
      result.deciles_raw[d - 1].push_back(
          decile_return(y, assets, sigma, rets, d, config.vol_target));
    result.long_short_deciles_raw.push_back(result.deciles_raw[9].back() -
                                            result.deciles_raw[0].back());

    for (size_t i = 0; i < assets.size(); ++i) {
      if (positions[i] == 0) continue;
      result.positions.push_back({rs.date, assets[i], positions[i], sigma[i],
                                  y[static_cast<int>(i)], ranks[i]});
    }

    RebalanceEval eval;
    std::vector<int> grades = decile_grades(realized_norm, assets);
    if (!grades.empty()) {
      for (size_t i = 0; i < assets.size(); ++i) {
        if (std::isnan(realized_norm[i]) || std::isnan(rets[i])) continue;
        eval.scores.push_back(y[static_cast<int>(i)]);
        eval.realized.push_back(rets[i]);
        eval.grades.push_back(grades[i]);
      }
    }
    result.evals.push_back(std::move(eval));
  }
  if (!result.raw.empty()) {
    try {
      result.rescaled = rescale_to_target(result.raw, config.vol_target);
    } catch (const ValidationError& e) {
      log_warn(std::string("run_backtest: cannot rescale series: ") +
               e.what());
      result.rescaled = result.raw;
    }
  }
  return result;
}

}  // namespace csm
