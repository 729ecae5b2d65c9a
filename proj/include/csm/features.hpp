#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "csm/market_data.hpp"

namespace csm {

/// MACD time scales; the defaults are the conventional short/long pairs
/// (8,24), (16,48), (32,96) with 63-day price-std and 252-day signal-std
/// normalization windows.
struct MacdParams {
  std::array<int, 3> short_scales{8, 16, 32};
  std::array<int, 3> long_scales{24, 48, 96};
  int price_std_window = 63;
  int signal_std_window = 252;
};

inline constexpr int kNumFeatures = 22;
inline constexpr int kFeatRawRet63 = 0;
inline constexpr int kFeatRawRet126 = 1;
inline constexpr int kFeatRawRet252 = 2;
inline constexpr int kFeatNormRet63 = 3;
inline constexpr int kFeatNormRet126 = 4;
inline constexpr int kFeatNormRet252 = 5;
inline constexpr int kFeatMacdBase = 6;   // 3 scale pairs x 5 lags
inline constexpr int kFeatBazComposite = 21;
inline constexpr std::array<int, 5> kMacdLags{0, 21, 63, 126, 252};

/// Stable, documented field order: models are only reproducible if every
/// run assembles the vector identically.
const std::array<std::string, kNumFeatures>& feature_names();

/// Half-life in days of an EWMA with scale S: ln(0.5) / ln(1 - 1/S).
/// Throws std::domain_error for S <= 1.
double half_life(double scale);

/// Response curve x * exp(-x^2/4) / 0.89 applied to normalized MACD signals.
double response_phi(double x);

/// Difference of exponentially weighted price averages with decay 1 - 1/S
/// and 1 - 1/L (adjusted weights). Missing with under a year of history.
double macd_value(const PricePanel& panel, int asset, int t, int S, int L);

/// Two-stage normalized MACD: xi = MACD / 63-day price std, result =
/// xi / 252-day std of the xi series. Missing until the signal-std window
/// is full of valid xi values, or when either std underflows.
double macd_intermediate(const PricePanel& panel, int asset, int t, int S,
                         int L);

/// Sum over the three scale pairs of response_phi applied to the lag-0
/// intermediates; missing if any intermediate is.
double baz_composite(const PricePanel& panel, int asset, int t,
                     const MacdParams& params = {});

/// Cumulative return over `window` days divided by sigma_daily * sqrt(window).
double normalized_return(const PricePanel& panel, const VolEstimate& vol,
                         int asset, int t, int window);

/// Daily normalized-MACD series for the whole panel, computed once; feature
/// assembly reads lagged values out of it.
class MacdSeries {
 public:
  explicit MacdSeries(const PricePanel& panel, MacdParams params = {});

  /// Intermediate signal for scale pair k at panel row t; NaN if unavailable.
  double intermediate(int t, int asset, int k) const {
    return y_[k](t, asset);
  }
  double composite(int t, int asset) const;
  const MacdParams& params() const { return params_; }

 private:
  MacdParams params_;
  std::array<Eigen::MatrixXd, 3> y_;
};

/// Feature matrix for one rebalance; rows align with `assets` (ascending
/// column index = ascending asset id).
struct FeatureGroup {
  int rebalance_row = -1;
  Date date;
  std::vector<int> assets;
  Eigen::MatrixXd X;  // rows x kNumFeatures
  bool standardized = false;

  int size() const { return static_cast<int>(assets.size()); }
};

/// Assembles the 22 predictors for every universe member; assets with any
/// missing field are dropped (count reported via dropped_out). When
/// standardize is set, each column is cross-sectionally z-scored (std floor
/// 1e-8) and clipped to [-5, 5].
FeatureGroup build_features(const PricePanel& panel, const VolEstimate& vol,
                            const MacdSeries& macd,
                            const UniverseSnapshot& universe, bool standardize,
                            int* dropped_out = nullptr);

/// Re-standardizes a raw feature group (same z-score rule as build_features).
FeatureGroup standardize_features(const FeatureGroup& raw);

}  // namespace csm
