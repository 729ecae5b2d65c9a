#pragma once

#include <string>
#include <utility>
#include <vector>

#include "csm/backtest.hpp"
#include "csm/metrics.hpp"
#include "csm/pipeline.hpp"

namespace csm {

/// Shortest round-trippable decimal form; identical configs produce
/// byte-identical files.
std::string format_double(double v);

void write_returns_csv(const std::string& path, const BacktestResult& result);

void write_positions_csv(const std::string& path,
                         const BacktestResult& result,
                         const PricePanel& panel);

/// Table-1 layout: one row per model, the nine reported metric columns.
void write_metrics_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, FinancialSummary>>& rows);

void write_ranking_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, RankingSummary>>& rows, int k);

/// JSON twins of the two metric tables.
void write_metrics_json(
    const std::string& path,
    const std::vector<std::pair<std::string, FinancialSummary>>& rows);
void write_ranking_json(
    const std::string& path,
    const std::vector<std::pair<std::string, RankingSummary>>& rows, int k);

/// Decile-portfolio table: per model, deciles 1..10 plus the long-short
/// spread, each series rescaled to the vol target before summarizing.
void write_deciles_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, const BacktestResult*>>& models,
    double vol_target);

/// One cumulative-return column per model on the union of traded dates.
void write_cumulative_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, const BacktestResult*>>& models);

/// Long-format dump of the panel itself.
void write_prices_csv(const std::string& path, const PricePanel& panel);

/// Feature dump `rebalance_date,asset,f01..f22,grade,target` for offline
/// inspection (raw, unstandardized values; grade/target blank where the
/// forward window is unavailable).
void write_features_csv(const std::string& path, const PanelBundle& bundle);

/// Reads a returns.csv back; used by the report command.
struct SavedReturns {
  std::vector<Date> dates;
  std::vector<double> raw;
  std::vector<double> rescaled;
  std::array<std::vector<double>, 10> deciles_raw;
};
SavedReturns read_returns_csv(const std::string& path);

}  // namespace csm
