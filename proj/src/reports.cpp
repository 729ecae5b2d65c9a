#include "csm/reports.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "csm/common.hpp"
#include "csm/labeling.hpp"

namespace csm {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // Shortest round-trip form: files parse back to the exact double, so
  // derived reports recompute identical bytes.
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_returns_csv(const std::string& path, const BacktestResult& result) {
  auto out = open_out(path);
  out << "date,raw,rescaled";
  for (int d = 1; d <= 10; ++d) out << ",decile_" << d;
  out << "\n";
  for (size_t i = 0; i < result.dates.size(); ++i) {
    out << result.dates[i].to_string() << "," << format_double(result.raw[i])
        << "," << format_double(result.rescaled[i]);
    for (int d = 0; d < 10; ++d)
      out << "," << format_double(result.deciles_raw[d][i]);
    out << "\n";
  }
}

void write_positions_csv(const std::string& path, const BacktestResult& result,
                         const PricePanel& panel) {
  auto out = open_out(path);
  out << "date,asset,X,sigma,score,rank\n";
  for (const auto& p : result.positions)
    out << p.date.to_string() << "," << panel.assets[p.asset] << ","
        << p.position << "," << format_double(p.sigma) << ","
        << format_double(p.score) << "," << p.rank << "\n";
}

void write_metrics_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, FinancialSummary>>& rows) {
  auto out = open_out(path);
  out << "model,E[returns],Volatility,Sharpe,Downside Dev.,MDD,Sortino,"
         "Calmar,% +ve Returns,Avg. P / Avg. L\n";
  for (const auto& [name, s] : rows)
    out << name << "," << format_double(s.ann_return) << ","
        << format_double(s.ann_vol) << "," << format_double(s.sharpe) << ","
        << format_double(s.downside_dev) << "," << format_double(s.mdd) << ","
        << format_double(s.sortino) << "," << format_double(s.calmar) << ","
        << format_double(s.pct_positive) << ","
        << format_double(s.avg_profit_over_avg_loss) << "\n";
}

void write_ranking_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, RankingSummary>>& rows, int k) {
  auto out = open_out(path);
  out << "model,Kendall's Tau,NDCG@" << k << " (Longs),NDCG@" << k
      << " (Shorts)\n";
  for (const auto& [name, s] : rows)
    out << name << "," << format_double(s.mean_tau) << ","
        << format_double(s.mean_ndcg_long) << ","
        << format_double(s.mean_ndcg_short) << "\n";
}

namespace {

// Hand-rolled emission keeps inf/nan markers consistent with the CSVs.
void write_json_rows(
    const std::string& path,
    const std::vector<std::pair<std::string, std::vector<std::pair<
                                                 std::string, double>>>>& rows) {
  auto out = open_out(path);
  out << "[\n";
  for (size_t r = 0; r < rows.size(); ++r) {
    out << " {\"model\": \"" << rows[r].first << "\"";
    for (const auto& [key, value] : rows[r].second) {
      out << ", \"" << key << "\": ";
      if (std::isfinite(value))
        out << format_double(value);
      else
        out << "\"" << format_double(value) << "\"";
    }
    out << "}" << (r + 1 < rows.size() ? "," : "") << "\n";
  }
  out << "]\n";
}

}  // namespace

void write_metrics_json(
    const std::string& path,
    const std::vector<std::pair<std::string, FinancialSummary>>& rows) {
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, double>>>>
      out_rows;
  for (const auto& [name, s] : rows)
    out_rows.push_back({name,
                        {{"E[returns]", s.ann_return},
                         {"Volatility", s.ann_vol},
                         {"Sharpe", s.sharpe},
                         {"Downside Dev.", s.downside_dev},
                         {"MDD", s.mdd},
                         {"Sortino", s.sortino},
                         {"Calmar", s.calmar},
                         {"% +ve Returns", s.pct_positive},
                         {"Avg. P / Avg. L", s.avg_profit_over_avg_loss}}});
  write_json_rows(path, out_rows);
}

void write_ranking_json(
    const std::string& path,
    const std::vector<std::pair<std::string, RankingSummary>>& rows, int k) {
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, double>>>>
      out_rows;
  std::string k_s = std::to_string(k);
  for (const auto& [name, s] : rows)
    out_rows.push_back({name,
                        {{"Kendall's Tau", s.mean_tau},
                         {"NDCG@" + k_s + " (Longs)", s.mean_ndcg_long},
                         {"NDCG@" + k_s + " (Shorts)", s.mean_ndcg_short}}});
  write_json_rows(path, out_rows);
}

void write_deciles_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, const BacktestResult*>>& models,
    double vol_target) {
  auto out = open_out(path);
  out << "model,decile,E[returns],Volatility,Sharpe\n";
  auto emit = [&](const std::string& model, const std::string& label,
                  const std::vector<double>& series) {
    if (series.size() < 12) return;
    FinancialSummary s =
        financial_summary(rescale_to_target(series, vol_target));
    out << model << "," << label << "," << format_double(s.ann_return) << ","
        << format_double(s.ann_vol) << "," << format_double(s.sharpe) << "\n";
  };
  for (const auto& [name, bt] : models) {
    for (int d = 1; d <= 10; ++d)
      emit(name, std::to_string(d), bt->deciles_raw[d - 1]);
    emit(name, "LS", bt->long_short_deciles_raw);
  }
}

void write_cumulative_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, const BacktestResult*>>& models) {
  auto out = open_out(path);
  std::map<Date, std::map<std::string, double>> cells;
  for (const auto& [name, bt] : models) {
    double equity = 1.0;
    for (size_t i = 0; i < bt->dates.size(); ++i) {
      equity *= 1.0 + bt->rescaled[i];
      cells[bt->dates[i]][name] = equity;
    }
  }
  out << "date";
  for (const auto& [name, bt] : models) out << "," << name;
  out << "\n";
  for (const auto& [date, row] : cells) {
    out << date.to_string();
    for (const auto& [name, bt] : models) {
      auto it = row.find(name);
      out << ",";
      if (it != row.end()) out << format_double(it->second);
    }
    out << "\n";
  }
}

void write_prices_csv(const std::string& path, const PricePanel& panel) {
  auto out = open_out(path);
  out << "date,asset,close\n";
  for (int t = 0; t < panel.n_dates(); ++t)
    for (int a = 0; a < panel.n_assets(); ++a)
      if (panel.live_at(t, a))
        out << panel.dates[t].to_string() << "," << panel.assets[a] << ","
            << format_double(panel.close(t, a)) << "\n";
}

void write_features_csv(const std::string& path, const PanelBundle& bundle) {
  auto out = open_out(path);
  out << "rebalance_date,asset";
  for (int j = 1; j <= kNumFeatures; ++j) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), ",f%02d", j);
    out << buf;
  }
  out << ",grade,target\n";
  for (const auto& fg : bundle.raw_features) {
    std::vector<double> targets(fg.size(), kMissing);
    for (int i = 0; i < fg.size(); ++i)
      targets[i] = forward_target(bundle.panel, bundle.vol, fg.assets[i],
                                  fg.rebalance_row, bundle.target_spec);
    std::vector<int> grades = decile_grades(targets, fg.assets);
    for (int i = 0; i < fg.size(); ++i) {
      out << fg.date.to_string() << "," << bundle.panel.assets[fg.assets[i]];
      for (int j = 0; j < kNumFeatures; ++j)
        out << "," << format_double(fg.X(i, j));
      out << ",";
      if (!grades.empty() && grades[i] >= 0) out << grades[i];
      out << ",";
      if (!std::isnan(targets[i])) out << format_double(targets[i]);
      out << "\n";
    }
  }
}

SavedReturns read_returns_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(path + ": empty returns file");
  SavedReturns out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 13)
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected 13 fields");
    out.dates.push_back(Date::parse(fields[0]));
    out.raw.push_back(std::stod(fields[1]));
    out.rescaled.push_back(std::stod(fields[2]));
    for (int d = 0; d < 10; ++d)
      out.deciles_raw[d].push_back(std::stod(fields[3 + d]));
  }
  return out;
}

}  // namespace csm
