#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "csm/metrics.hpp"
#include "csm/pipeline.hpp"
#include "csm/tuning.hpp"

namespace csm {

/// Ascending-score position indices 1..N (the ranking operator); ties break
/// by ascending asset id.
std::vector<int> rank_scores(const Eigen::VectorXd& scores,
                             const std::vector<int>& asset_ids);

/// Positions in {-1, 0, +1}: bottom n_side ranks short, top n_side long.
/// Universes smaller than 2 * n_side fall back to the decile thresholding
/// rule (short Z <= floor(0.1 N), long Z > floor(0.9 N)). Throws below 20
/// assets.
std::vector<int> select(const std::vector<int>& ranks, int n_side = 100);

/// Volatility-scaled cross-sectional return: (1/n) sum X (vol_target /
/// sigma) r over held positions. Held assets with missing sigma or return
/// are dropped and n adjusted (warned). n_held reports the final count.
double portfolio_return(const std::vector<int>& positions,
                        const std::vector<double>& sigma,
                        const std::vector<double>& asset_returns,
                        double vol_target = 0.15, int* n_held = nullptr);

/// Equally weighted vol-scaled return of one score-decile (1 = lowest
/// scores, 10 = highest). Deciles partition the list by descending-score
/// rank so decile 10 holds the top ceil(N/10) names.
double decile_return(const Eigen::VectorXd& scores,
                     const std::vector<int>& asset_ids,
                     const std::vector<double>& sigma,
                     const std::vector<double>& asset_returns, int decile,
                     double vol_target = 0.15);

/// Decile membership 1..10 per row under the same partition rule.
std::vector<int> decile_membership(const Eigen::VectorXd& scores,
                                   const std::vector<int>& asset_ids);

/// Multiplies every return by vol_target / realized annualized vol so the
/// output series realizes exactly the target. Throws on zero realized vol.
std::vector<double> rescale_to_target(const std::vector<double>& monthly,
                                      double vol_target = 0.15);

/// Rolling alternative: each month is scaled by vol_target over the
/// trailing-window realized vol (expanding until the window fills, first
/// min_obs months passed through at the whole-series scale).
std::vector<double> rescale_to_target_rolling(
    const std::vector<double>& monthly, double vol_target = 0.15,
    int window = 36, int min_obs = 12);

struct BacktestConfig {
  int n_side = 100;
  double vol_target = 0.15;
};

struct PositionRow {
  Date date;
  int asset = -1;
  int position = 0;  // -1 / 0 omitted from ledger / +1
  double sigma = 0.0;
  double score = 0.0;
  int rank = 0;
};

/// Per-rebalance evaluation inputs captured while the backtest runs:
/// realized next-month performance and its decile grades over the scored
/// universe.
struct BacktestResult {
  std::vector<Date> dates;              // one per traded month
  std::vector<double> raw;              // Eq-style long/short returns
  std::vector<double> rescaled;         // raw scaled to the vol target
  std::array<std::vector<double>, 10> deciles_raw;
  std::vector<double> long_short_deciles_raw;  // decile 10 minus decile 1
  std::vector<PositionRow> positions;
  std::vector<RebalanceEval> evals;     // aligned with dates
};

/// Full loop: scores -> rank -> select -> vol-scaled return over the actual
/// rebalance gap, plus all ten decile series and the positions ledger.
BacktestResult run_backtest(const PanelBundle& bundle,
                            const std::vector<RebalanceScores>& scores,
                            const BacktestConfig& config = {});

}  // namespace csm
