#include "csm/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "csm/common.hpp"
#include "csm/log.hpp"
#include "csm/rng.hpp"

namespace csm {

namespace {

constexpr int kMaxFillDays = 5;

// Forward-fills interior gaps of at most kMaxFillDays rows, then keeps the
// longest contiguous segment (ties resolved toward the later one).
void clean_column(Eigen::MatrixXd& close, int col, const std::string& name) {
  const int n = static_cast<int>(close.rows());
  int last_valid = -1;
  for (int t = 0; t < n; ++t) {
    if (!std::isnan(close(t, col))) {
      if (last_valid >= 0 && t - last_valid > 1 &&
          t - last_valid - 1 <= kMaxFillDays) {
        for (int u = last_valid + 1; u < t; ++u)
          close(u, col) = close(last_valid, col);
      }
      last_valid = t;
    }
  }
  // Longest remaining contiguous run.
  int best_begin = -1, best_len = 0, run_begin = -1, run_len = 0;
  for (int t = 0; t <= n; ++t) {
    bool valid = t < n && !std::isnan(close(t, col));
    if (valid) {
      if (run_len == 0) run_begin = t;
      ++run_len;
    } else {
      if (run_len >= best_len && run_len > 0) {
        best_begin = run_begin;
        best_len = run_len;
      }
      run_len = 0;
    }
  }
  bool split = false;
  for (int t = 0; t < n; ++t) {
    if (!std::isnan(close(t, col)) &&
        (t < best_begin || t >= best_begin + best_len)) {
      close(t, col) = kMissing;
      split = true;
    }
  }
  if (split)
    log_warn("asset " + name + ": gap over " + std::to_string(kMaxFillDays) +
             " days, keeping longest segment");
}

}  // namespace

int PricePanel::date_index(const Date& d) const {
  auto it = std::lower_bound(dates.begin(), dates.end(), d);
  if (it == dates.end() || *it != d) return -1;
  return static_cast<int>(it - dates.begin());
}

void PricePanel::finalize() {
  const int n = n_dates(), m = n_assets();
  live_begin.assign(m, -1);
  live_end.assign(m, -1);
  for (int a = 0; a < m; ++a) {
    for (int t = 0; t < n; ++t) {
      if (!std::isnan(close(t, a))) {
        if (live_begin[a] < 0) live_begin[a] = t;
        live_end[a] = t;
      }
    }
    for (int t = std::max(live_begin[a], 0); t <= live_end[a]; ++t) {
      if (std::isnan(close(t, a)))
        throw ValidationError("asset " + assets[a] +
                              " has an interior gap after cleaning");
      if (close(t, a) <= 0.0)
        throw ValidationError("non-positive price for asset " + assets[a]);
    }
  }
  for (size_t i = 1; i < dates.size(); ++i)
    if (!(dates[i - 1] < dates[i]))
      throw ValidationError("panel dates not strictly increasing");
}

PricePanel make_panel(std::vector<PriceRecord> records) {
  if (records.empty()) throw ValidationError("empty price input");
  std::set<Date> date_set;
  std::set<std::string> asset_set;
  for (const auto& r : records) {
    if (r.close <= 0.0)
      throw ValidationError("non-positive price for asset " + r.asset +
                            " on " + r.date.to_string());
    date_set.insert(r.date);
    asset_set.insert(r.asset);
  }
  PricePanel panel;
  panel.dates.assign(date_set.begin(), date_set.end());
  panel.assets.assign(asset_set.begin(), asset_set.end());
  std::map<std::string, int> asset_idx;
  for (int a = 0; a < panel.n_assets(); ++a) asset_idx[panel.assets[a]] = a;

  panel.close = Eigen::MatrixXd::Constant(panel.n_dates(), panel.n_assets(),
                                          kMissing);
  for (const auto& r : records) {
    int t = panel.date_index(r.date);
    int a = asset_idx[r.asset];
    if (!std::isnan(panel.close(t, a)))
      throw ValidationError("duplicate (date, asset) pair: " +
                            r.date.to_string() + ", " + r.asset);
    panel.close(t, a) = r.close;
  }
  for (int a = 0; a < panel.n_assets(); ++a)
    clean_column(panel.close, a, panel.assets[a]);
  panel.finalize();
  return panel;
}

PricePanel load_prices(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  // Tolerate a UTF-8 BOM and trailing CR.
  if (line.size() >= 3 && line.compare(0, 3, "\xef\xbb\xbf") == 0)
    line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "date,asset,close")
    throw ParseError(path + ": expected header 'date,asset,close'");

  std::vector<PriceRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string date_s, asset_s, close_s;
    if (!std::getline(ss, date_s, ',') || !std::getline(ss, asset_s, ',') ||
        !std::getline(ss, close_s))
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected 3 comma-separated fields");
    PriceRecord rec;
    try {
      rec.date = Date::parse(date_s);
    } catch (const ParseError& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    rec.asset = asset_s;
    size_t pos = 0;
    try {
      rec.close = std::stod(close_s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != close_s.size())
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": bad price '" + close_s + "'");
    records.push_back(std::move(rec));
  }
  return make_panel(std::move(records));
}

RebalanceCalendar month_end_calendar(const PricePanel& panel) {
  if (panel.dates.empty()) throw ValidationError("empty panel");
  RebalanceCalendar cal;
  for (int t = 0; t < panel.n_dates(); ++t) {
    bool last_of_month =
        t + 1 == panel.n_dates() ||
        panel.dates[t + 1].year != panel.dates[t].year ||
        panel.dates[t + 1].month != panel.dates[t].month;
    if (last_of_month) cal.indices.push_back(t);
  }
  return cal;
}

ReturnsPanel daily_returns(const PricePanel& panel) {
  ReturnsPanel out;
  out.r = Eigen::MatrixXd::Constant(panel.n_dates(), panel.n_assets(),
                                    kMissing);
  for (int a = 0; a < panel.n_assets(); ++a)
    for (int t = std::max(1, panel.live_begin[a] + 1); t <= panel.live_end[a];
         ++t)
      out.r(t, a) = panel.close(t, a) / panel.close(t - 1, a) - 1.0;
  return out;
}

double cumulative_return(const PricePanel& panel, int asset, int t,
                         int window) {
  if (t - window < panel.live_begin[asset] || t > panel.live_end[asset] ||
      t - window < 0)
    return kMissing;
  return panel.close(t, asset) / panel.close(t - window, asset) - 1.0;
}

double holding_return(const PricePanel& panel, int asset, int t0, int t1) {
  if (!panel.live_at(t0, asset)) return kMissing;
  int t_exit = std::min(t1, panel.live_end[asset]);
  if (t_exit <= t0) return kMissing;
  return panel.close(t_exit, asset) / panel.close(t0, asset) - 1.0;
}

double VolEstimate::daily(int t, int asset) const {
  double v = annualized(t, asset);
  return std::isnan(v) ? kMissing : v / std::sqrt(252.0);
}

VolEstimate ewm_volatility(const ReturnsPanel& returns, int span,
                           int min_obs) {
  if (span < 2) throw ValidationError("ewm span must be >= 2");
  const double alpha = 2.0 / (span + 1.0);
  const double decay = 1.0 - alpha;
  const int n = static_cast<int>(returns.r.rows());
  const int m = static_cast<int>(returns.r.cols());

  VolEstimate out;
  out.annualized = Eigen::MatrixXd::Constant(n, m, kMissing);
  for (int a = 0; a < m; ++a) {
    // Adjusted-weight EWM moments: all past weights decay by (1 - alpha),
    // each new observation enters with weight 1 (West's incremental update).
    double sum_w = 0.0, sum_w2 = 0.0, mean = 0.0, m2 = 0.0;
    int count = 0;
    for (int t = 0; t < n; ++t) {
      double r = returns.r(t, a);
      if (std::isnan(r)) continue;
      sum_w *= decay;
      sum_w2 *= decay * decay;
      m2 *= decay;
      sum_w += 1.0;
      sum_w2 += 1.0;
      double d = r - mean;
      mean += d / sum_w;
      m2 += d * (r - mean);
      ++count;
      if (count >= min_obs) {
        double denom = sum_w - sum_w2 / sum_w;  // bias correction
        double var = denom > 0.0 ? m2 / denom : 0.0;
        out.annualized(t, a) = std::sqrt(std::max(var, 0.0) * 252.0);
      }
    }
  }
  return out;
}

UniverseSnapshot eligible_universe(const PricePanel& panel,
                                   const VolEstimate& vol, int rebalance_row,
                                   double price_floor, int lookback_days) {
  UniverseSnapshot snap;
  snap.rebalance_row = rebalance_row;
  const int t = rebalance_row;
  for (int a = 0; a < panel.n_assets(); ++a) {
    if (t - lookback_days < 0) continue;
    if (panel.live_begin[a] > t - lookback_days || panel.live_end[a] < t)
      continue;
    if (!(panel.close(t, a) > price_floor)) continue;
    if (std::isnan(vol.annualized(t, a))) continue;
    snap.assets.push_back(a);
  }
  if (snap.assets.empty())
    log_debug("empty universe at row " + std::to_string(rebalance_row));
  return snap;
}

PricePanel synthetic_panel(int n_assets, int n_years, double signal_strength,
                           uint64_t seed) {
  if (n_assets < 20) throw ValidationError("synthetic panel needs >= 20 assets");
  if (n_years < 2) throw ValidationError("synthetic panel needs >= 2 years");
  if (signal_strength < 0.0 || signal_strength > 1.0)
    throw ValidationError("signal_strength must be in [0, 1]");

  const int n_days = n_years * kTradingDaysPerYear;
  // Latent drift: AR(1) with ~140-day half-life. Scale calibrated once so
  // that at full strength the cross-sectional rank correlation between
  // 252-day past and 21-day future returns comes out near 0.27.
  const double rho = 0.995;
  const double drift_scale = 0.002 * signal_strength;
  const double innovation = std::sqrt(1.0 - rho * rho);
  const double noise_scale = 0.01;

  PricePanel panel;
  panel.dates.reserve(n_days);
  Date d{2000, 1, 3};  // a Monday
  for (int t = 0; t < n_days; ++t) {
    panel.dates.push_back(d);
    d = d.next_weekday();
  }
  panel.assets.reserve(n_assets);
  for (int a = 0; a < n_assets; ++a) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "SYN%04d", a);
    panel.assets.emplace_back(buf);
  }
  panel.close.resize(n_days, n_assets);
  for (int a = 0; a < n_assets; ++a) {
    // One stream per asset so the panel is independent of evaluation order.
    Rng rng(seed, "synthetic-asset", static_cast<uint64_t>(a));
    double price = 100.0 * std::exp(0.3 * rng.normal());
    double latent = rng.normal();  // stationary start
    for (int t = 0; t < n_days; ++t) {
      panel.close(t, a) = price;
      latent = rho * latent + innovation * rng.normal();
      double r = drift_scale * latent + noise_scale * rng.normal();
      price *= 1.0 + std::max(r, -0.5);
    }
  }
  panel.finalize();
  return panel;
}

}  // namespace csm
