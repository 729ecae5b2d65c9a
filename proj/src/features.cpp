#include "csm/features.hpp"

#include <algorithm>
#include <cmath>

#include "csm/common.hpp"
#include "csm/log.hpp"

namespace csm {

namespace {

// Rolling equal-weight sample std over a contiguous segment, long double
// prefix sums. values[i] may be NaN; a window only produces a std when every
// slot in it is valid.
class RollingStd {
 public:
  RollingStd(const std::vector<double>& values, int window)
      : window_(window), n_(static_cast<int>(values.size())) {
    s1_.resize(n_ + 1, 0.0L);
    s2_.resize(n_ + 1, 0.0L);
    valid_.resize(n_ + 1, 0);
    for (int i = 0; i < n_; ++i) {
      double v = values[i];
      bool ok = !std::isnan(v);
      s1_[i + 1] = s1_[i] + (ok ? static_cast<long double>(v) : 0.0L);
      s2_[i + 1] = s2_[i] + (ok ? static_cast<long double>(v) * v : 0.0L);
      valid_[i + 1] = valid_[i] + (ok ? 1 : 0);
    }
  }

  // Std of values[i-window+1 .. i]; NaN if the window is short or has gaps.
  double at(int i) const {
    if (i + 1 < window_ || i >= n_) return kMissing;
    int lo = i + 1 - window_;
    if (valid_[i + 1] - valid_[lo] != window_) return kMissing;
    long double sum = s1_[i + 1] - s1_[lo];
    long double sumsq = s2_[i + 1] - s2_[lo];
    long double var = (sumsq - sum * sum / window_) / (window_ - 1);
    if (var < 0.0L) var = 0.0L;
    return static_cast<double>(std::sqrt(var));
  }

 private:
  int window_, n_;
  std::vector<long double> s1_, s2_;
  std::vector<int> valid_;
};

// Adjusted-weight EWMA of one asset's live prices; out[t] is defined from
// the first live day.
std::vector<double> ewma_prices(const PricePanel& panel, int asset,
                                double alpha) {
  const int n = panel.n_dates();
  std::vector<double> out(n, kMissing);
  const double decay = 1.0 - alpha;
  double num = 0.0, den = 0.0;
  for (int t = panel.live_begin[asset]; t <= panel.live_end[asset]; ++t) {
    num = decay * num + panel.close(t, asset);
    den = decay * den + 1.0;
    out[t] = num / den;
  }
  return out;
}

constexpr double kStdFloorRel = 1e-12;

// Guards the 0/0 of constant price windows. The threshold is relative to the
// value scale so rescaling a panel cannot flip availability.
bool degenerate_std(double sd, double scale) {
  return !(sd > kStdFloorRel * std::max(1.0, std::abs(scale)));
}

struct ColumnSignals {
  std::array<std::vector<double>, 3> y;  // normalized intermediates per pair
};

ColumnSignals compute_column(const PricePanel& panel, int asset,
                             const MacdParams& p) {
  const int n = panel.n_dates();
  ColumnSignals out;

  std::vector<double> prices(n, kMissing);
  for (int t = panel.live_begin[asset]; t <= panel.live_end[asset]; ++t)
    prices[t] = panel.close(t, asset);
  RollingStd price_std(prices, p.price_std_window);

  for (int k = 0; k < 3; ++k) {
    auto m_short = ewma_prices(panel, asset, 1.0 / p.short_scales[k]);
    auto m_long = ewma_prices(panel, asset, 1.0 / p.long_scales[k]);
    std::vector<double> xi(n, kMissing);
    for (int t = panel.live_begin[asset]; t <= panel.live_end[asset]; ++t) {
      double ps = price_std.at(t);
      if (std::isnan(ps) || degenerate_std(ps, panel.close(t, asset)))
        continue;
      xi[t] = (m_short[t] - m_long[t]) / ps;
    }
    RollingStd xi_std(xi, p.signal_std_window);
    out.y[k].assign(n, kMissing);
    for (int t = panel.live_begin[asset]; t <= panel.live_end[asset]; ++t) {
      if (std::isnan(xi[t])) continue;
      double xs = xi_std.at(t);
      if (std::isnan(xs) || degenerate_std(xs, 1.0)) continue;
      out.y[k][t] = xi[t] / xs;
    }
  }
  return out;
}

}  // namespace

const std::array<std::string, kNumFeatures>& feature_names() {
  static const std::array<std::string, kNumFeatures> names = [] {
    std::array<std::string, kNumFeatures> n;
    n[kFeatRawRet63] = "ret_raw_63";
    n[kFeatRawRet126] = "ret_raw_126";
    n[kFeatRawRet252] = "ret_raw_252";
    n[kFeatNormRet63] = "ret_norm_63";
    n[kFeatNormRet126] = "ret_norm_126";
    n[kFeatNormRet252] = "ret_norm_252";
    MacdParams p;
    int idx = kFeatMacdBase;
    for (int k = 0; k < 3; ++k)
      for (int lag : kMacdLags)
        n[idx++] = "macd_norm_" + std::to_string(p.short_scales[k]) + "_" +
                   std::to_string(p.long_scales[k]) + "_lag" +
                   std::to_string(lag);
    n[kFeatBazComposite] = "baz_composite";
    return n;
  }();
  return names;
}

double half_life(double scale) {
  if (scale <= 1.0)
    throw std::domain_error("half_life requires scale > 1");
  return std::log(0.5) / std::log(1.0 - 1.0 / scale);
}

double response_phi(double x) {
  return x * std::exp(-x * x / 4.0) / 0.89;
}

double macd_value(const PricePanel& panel, int asset, int t, int S, int L) {
  if (!panel.live_at(t, asset)) return kMissing;
  if (t - panel.live_begin[asset] + 1 < 252) return kMissing;
  auto m_short = ewma_prices(panel, asset, 1.0 / S);
  auto m_long = ewma_prices(panel, asset, 1.0 / L);
  return m_short[t] - m_long[t];
}

double macd_intermediate(const PricePanel& panel, int asset, int t, int S,
                         int L) {
  if (!panel.live_at(t, asset)) return kMissing;
  MacdParams p;
  p.short_scales = {S, S, S};
  p.long_scales = {L, L, L};
  auto signals = compute_column(panel, asset, p);
  return signals.y[0][t];
}

double baz_composite(const PricePanel& panel, int asset, int t,
                     const MacdParams& params) {
  if (!panel.live_at(t, asset)) return kMissing;
  auto signals = compute_column(panel, asset, params);
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    double y = signals.y[k][t];
    if (std::isnan(y)) return kMissing;
    sum += response_phi(y);
  }
  return sum;
}

double normalized_return(const PricePanel& panel, const VolEstimate& vol,
                         int asset, int t, int window) {
  double r = cumulative_return(panel, asset, t, window);
  double sigma_daily = vol.daily(t, asset);
  if (std::isnan(r) || std::isnan(sigma_daily) || sigma_daily <= 0.0)
    return kMissing;
  return r / (sigma_daily * std::sqrt(static_cast<double>(window)));
}

MacdSeries::MacdSeries(const PricePanel& panel, MacdParams params)
    : params_(params) {
  const int n = panel.n_dates(), m = panel.n_assets();
  for (int k = 0; k < 3; ++k)
    y_[k] = Eigen::MatrixXd::Constant(n, m, kMissing);
  for (int a = 0; a < m; ++a) {
    auto signals = compute_column(panel, a, params_);
    for (int k = 0; k < 3; ++k)
      for (int t = 0; t < n; ++t) y_[k](t, a) = signals.y[k][t];
  }
}

double MacdSeries::composite(int t, int asset) const {
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    double y = y_[k](t, asset);
    if (std::isnan(y)) return kMissing;
    sum += response_phi(y);
  }
  return sum;
}

FeatureGroup build_features(const PricePanel& panel, const VolEstimate& vol,
                            const MacdSeries& macd,
                            const UniverseSnapshot& universe, bool standardize,
                            int* dropped_out) {
  FeatureGroup group;
  group.rebalance_row = universe.rebalance_row;
  group.date = panel.dates[universe.rebalance_row];
  const int t = universe.rebalance_row;

  std::vector<std::array<double, kNumFeatures>> rows;
  int dropped = 0;
  for (int a : universe.assets) {
    std::array<double, kNumFeatures> f;
    f[kFeatRawRet63] = cumulative_return(panel, a, t, 63);
    f[kFeatRawRet126] = cumulative_return(panel, a, t, 126);
    f[kFeatRawRet252] = cumulative_return(panel, a, t, 252);
    f[kFeatNormRet63] = normalized_return(panel, vol, a, t, 63);
    f[kFeatNormRet126] = normalized_return(panel, vol, a, t, 126);
    f[kFeatNormRet252] = normalized_return(panel, vol, a, t, 252);
    int idx = kFeatMacdBase;
    for (int k = 0; k < 3; ++k)
      for (int lag : kMacdLags)
        f[idx++] = t - lag >= 0 ? macd.intermediate(t - lag, a, k) : kMissing;
    f[kFeatBazComposite] = macd.composite(t, a);

    bool complete = std::all_of(f.begin(), f.end(),
                                [](double v) { return !std::isnan(v); });
    if (!complete) {
      ++dropped;
      continue;
    }
    group.assets.push_back(a);
    rows.push_back(f);
  }
  if (dropped > 0)
    log_debug("rebalance " + group.date.to_string() + ": dropped " +
              std::to_string(dropped) + " assets with incomplete features");
  if (dropped_out != nullptr) *dropped_out = dropped;

  group.X.resize(static_cast<int>(rows.size()), kNumFeatures);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < kNumFeatures; ++j)
      group.X(static_cast<int>(i), j) = rows[i][j];
  if (standardize) return standardize_features(group);
  return group;
}

FeatureGroup standardize_features(const FeatureGroup& raw) {
  FeatureGroup out = raw;
  out.standardized = true;
  const int n = static_cast<int>(out.X.rows());
  if (n == 0) return out;
  for (int j = 0; j < out.X.cols(); ++j) {
    double mean = out.X.col(j).mean();
    double var = (out.X.col(j).array() - mean).square().sum() / n;
    double sd = std::max(std::sqrt(var), 1e-8);
    for (int i = 0; i < n; ++i) {
      double z = (out.X(i, j) - mean) / sd;
      out.X(i, j) = std::clamp(z, -5.0, 5.0);
    }
  }
  return out;
}

}  // namespace csm
