#include "csm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "csm/common.hpp"
#include "csm/log.hpp"

namespace csm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Counts strict inversions in v by merge sort.
int64_t count_inversions(std::vector<double>& v) {
  const size_t n = v.size();
  std::vector<double> buf(n);
  int64_t inversions = 0;
  for (size_t width = 1; width < n; width *= 2) {
    for (size_t lo = 0; lo + width < n; lo += 2 * width) {
      size_t mid = lo + width, hi = std::min(lo + 2 * width, n);
      size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[i] <= v[j]) {
          buf[k++] = v[i++];
        } else {
          inversions += static_cast<int64_t>(mid - i);
          buf[k++] = v[j++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
      std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
    }
  }
  return inversions;
}

// Sum over tie groups of t * (t - 1) / 2 under the given equality key.
template <class Key>
int64_t tie_pairs(const std::vector<int>& order, Key key) {
  int64_t total = 0, run = 1;
  for (size_t i = 1; i <= order.size(); ++i) {
    if (i < order.size() && key(order[i]) == key(order[i - 1])) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

double dcg(const std::vector<int>& relevance_in_rank_order, int k) {
  double sum = 0.0;
  int limit = std::min<int>(k, static_cast<int>(relevance_in_rank_order.size()));
  for (int pos = 0; pos < limit; ++pos)
    sum += (std::pow(2.0, relevance_in_rank_order[pos]) - 1.0) /
           std::log2(pos + 2.0);
  return sum;
}

}  // namespace

std::vector<double> equity_curve(const std::vector<double>& monthly_returns) {
  std::vector<double> eq;
  eq.reserve(monthly_returns.size() + 1);
  double v = 1.0;
  eq.push_back(v);
  for (double r : monthly_returns) {
    v *= 1.0 + r;
    eq.push_back(v);
  }
  return eq;
}

double max_drawdown(const std::vector<double>& equity) {
  double peak = -kInf, mdd = 0.0;
  for (double v : equity) {
    peak = std::max(peak, v);
    if (peak > 0.0) mdd = std::max(mdd, (peak - v) / peak);
  }
  return mdd;
}

FinancialSummary financial_summary(
    const std::vector<double>& monthly_returns) {
  const int n = static_cast<int>(monthly_returns.size());
  if (n < 12)
    throw ValidationError("financial_summary needs at least 12 months");

  FinancialSummary s;
  double mean =
      std::accumulate(monthly_returns.begin(), monthly_returns.end(), 0.0) / n;
  double ss = 0.0, neg_ss = 0.0, pos_sum = 0.0, neg_sum = 0.0;
  int n_pos = 0, n_neg = 0;
  for (double r : monthly_returns) {
    ss += (r - mean) * (r - mean);
    if (r > 0.0) {
      pos_sum += r;
      ++n_pos;
    }
    if (r < 0.0) {
      neg_sum += r;
      neg_ss += r * r;
      ++n_neg;
    }
  }
  s.ann_return = mean * 12.0;
  s.ann_vol = std::sqrt(ss / (n - 1)) * std::sqrt(12.0);
  s.sharpe = s.ann_vol > 0.0 ? s.ann_return / s.ann_vol : kInf;
  s.downside_dev = std::sqrt(neg_ss / n) * std::sqrt(12.0);
  s.mdd = max_drawdown(equity_curve(monthly_returns));
  s.sortino = s.downside_dev > 0.0 ? s.ann_return / s.downside_dev : kInf;
  s.calmar = s.mdd > 0.0 ? s.ann_return / s.mdd : kInf;
  s.pct_positive = static_cast<double>(n_pos) / n;
  double avg_p = n_pos > 0 ? pos_sum / n_pos : 0.0;
  double avg_l = n_neg > 0 ? -neg_sum / n_neg : 0.0;
  s.avg_profit_over_avg_loss = avg_l > 0.0 ? avg_p / avg_l : kInf;
  return s;
}

double kendall_tau(const std::vector<double>& x,
                   const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n != static_cast<int>(y.size()))
    throw ValidationError("kendall_tau: length mismatch");
  if (n < 2) return 0.0;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  int64_t tot = static_cast<int64_t>(n) * (n - 1) / 2;
  int64_t xtie = tie_pairs(order, [&](int i) { return x[i]; });
  int64_t ntie = tie_pairs(
      order, [&](int i) { return std::make_pair(x[i], y[i]); });

  std::vector<double> y_seq(n);
  for (int i = 0; i < n; ++i) y_seq[i] = y[order[i]];
  int64_t dis = count_inversions(y_seq);

  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return y[a] < y[b]; });
  int64_t ytie = tie_pairs(order, [&](int i) { return y[i]; });

  double con_minus_dis =
      static_cast<double>(tot - xtie - ytie + ntie - 2 * dis);
  double denom = std::sqrt(static_cast<double>(tot - xtie)) *
                 std::sqrt(static_cast<double>(tot - ytie));
  if (denom == 0.0) return 0.0;
  return con_minus_dis / denom;
}

double ndcg_at_k(const std::vector<double>& scores,
                 const std::vector<int>& grades, int k, NdcgSide side) {
  const int n = static_cast<int>(scores.size());
  if (n == 0 || n != static_cast<int>(grades.size()))
    throw ValidationError("ndcg_at_k: bad inputs");
  k = std::min(k, n);

  std::vector<int> rel(n);
  for (int i = 0; i < n; ++i)
    rel[i] = side == NdcgSide::kLongs ? grades[i] : 9 - grades[i];

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (side == NdcgSide::kLongs) {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return a < b;
    });
  } else {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (scores[a] != scores[b]) return scores[a] < scores[b];
      return a < b;
    });
  }
  std::vector<int> ranked(n);
  for (int pos = 0; pos < n; ++pos) ranked[pos] = rel[order[pos]];
  double actual = dcg(ranked, k);

  std::vector<int> ideal = rel;
  std::sort(ideal.begin(), ideal.end(), std::greater<int>());
  double best = dcg(ideal, k);
  if (best <= 0.0) {
    log_warn("ndcg_at_k: zero ideal DCG, returning 0");
    return 0.0;
  }
  return actual / best;
}

RankingSummary ranking_summary(const std::vector<RebalanceEval>& months,
                               int k) {
  RankingSummary out;
  out.k = k;
  for (const auto& m : months) {
    if (m.scores.empty()) continue;
    out.mean_tau += kendall_tau(m.scores, m.realized);
    out.mean_ndcg_long += ndcg_at_k(m.scores, m.grades, k, NdcgSide::kLongs);
    out.mean_ndcg_short += ndcg_at_k(m.scores, m.grades, k, NdcgSide::kShorts);
    ++out.months;
  }
  if (out.months > 0) {
    out.mean_tau /= out.months;
    out.mean_ndcg_long /= out.months;
    out.mean_ndcg_short /= out.months;
  }
  return out;
}

}  // namespace csm
