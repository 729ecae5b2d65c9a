#pragma once

#include <vector>

namespace csm {

/// Annualized summary of a monthly return series. Ratios follow the
/// conventional assignments: Sharpe = E/vol, Sortino = E/downside deviation,
/// Calmar = E/MDD.
struct FinancialSummary {
  double ann_return = 0.0;
  double ann_vol = 0.0;
  double sharpe = 0.0;
  double downside_dev = 0.0;
  double mdd = 0.0;
  double sortino = 0.0;  // +inf when no negative months
  double calmar = 0.0;   // +inf when MDD is zero
  double pct_positive = 0.0;
  double avg_profit_over_avg_loss = 0.0;
};

/// Requires at least 12 months; throws ValidationError otherwise.
FinancialSummary financial_summary(const std::vector<double>& monthly_returns);

/// Max peak-to-trough drawdown of an equity curve (first element included
/// in the running peak).
double max_drawdown(const std::vector<double>& equity);

/// Compounds monthly returns into an equity curve starting at 1.
std::vector<double> equity_curve(const std::vector<double>& monthly_returns);

/// Tie-corrected Kendall rank correlation (tau-b), O(n log n).
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

enum class NdcgSide { kLongs, kShorts };

/// NDCG truncated at k. Longs: items ordered by descending score, gain
/// 2^grade - 1, discount 1/log2(pos + 1), normalized by the ideal DCG.
/// Shorts: grades are reversed (9 - grade) and items ordered by ascending
/// score, so the most negative forward performers count as most relevant.
/// Zero total gain yields 0 (with a warning). k is capped at list size.
double ndcg_at_k(const std::vector<double>& scores,
                 const std::vector<int>& grades, int k = 100,
                 NdcgSide side = NdcgSide::kLongs);

/// Scores, realized forward performance and realized grades for one
/// out-of-sample rebalance.
struct RebalanceEval {
  std::vector<double> scores;
  std::vector<double> realized;
  std::vector<int> grades;
};

struct RankingSummary {
  double mean_tau = 0.0;
  double mean_ndcg_long = 0.0;
  double mean_ndcg_short = 0.0;
  int k = 100;
  int months = 0;
};

/// Equal-weight average of per-rebalance ranking metrics.
RankingSummary ranking_summary(const std::vector<RebalanceEval>& months,
                               int k = 100);

}  // namespace csm
