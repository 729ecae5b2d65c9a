#include "csm/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "csm/common.hpp"
#include "csm/log.hpp"

namespace csm {

PairSet PairSet::from_grades(const std::vector<int>& grades) {
  PairSet out;
  const int n = static_cast<int>(grades.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (grades[i] > grades[j]) out.pairs.emplace_back(i, j);
  return out;
}

LossGrad mse_loss_grad(const Eigen::VectorXd& scores,
                       const Eigen::VectorXd& targets) {
  if (scores.size() != targets.size())
    throw ValidationError("mse_loss_grad: size mismatch");
  const double m = static_cast<double>(scores.size());
  Eigen::VectorXd diff = scores - targets;
  LossGrad out;
  out.loss = diff.squaredNorm() / m;
  out.dscores = 2.0 * diff / m;
  return out;
}

LossGrad ranknet_loss_grad(const Eigen::VectorXd& scores, const PairSet& pairs,
                           double slope) {
  LossGrad out;
  out.dscores = Eigen::VectorXd::Zero(scores.size());
  if (pairs.empty()) {
    log_debug("ranknet_loss_grad: empty pair set");
    return out;
  }
  const double m = static_cast<double>(pairs.size());
  for (auto [i, j] : pairs.pairs) {
    double d = slope * (scores[i] - scores[j]);
    // -ln sigmoid(d), computed without overflow on either tail.
    double loss = d > 0.0 ? std::log1p(std::exp(-d))
                          : -d + std::log1p(std::exp(d));
    double p = 1.0 / (1.0 + std::exp(-d));
    out.loss += loss / m;
    double g = -slope * (1.0 - p) / m;
    out.dscores[i] += g;
    out.dscores[j] -= g;
  }
  return out;
}

namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& v) {
  Eigen::VectorXd e = (v.array() - v.maxCoeff()).exp();
  return e / e.sum();
}

}  // namespace

LossGrad listnet_loss_grad(const Eigen::VectorXd& scores,
                           const Eigen::VectorXd& targets) {
  if (scores.size() != targets.size())
    throw ValidationError("listnet_loss_grad: size mismatch");
  Eigen::VectorXd p_target = softmax(targets);
  Eigen::VectorXd shifted = scores.array() - scores.maxCoeff();
  double log_sum = std::log(shifted.array().exp().sum());
  Eigen::VectorXd log_p_score = shifted.array() - log_sum;

  LossGrad out;
  out.loss = -(p_target.array() * log_p_score.array()).sum();
  out.dscores = log_p_score.array().exp().matrix() - p_target;
  return out;
}

LossGrad listmle_loss_grad(const Eigen::VectorXd& scores,
                           const std::vector<int>& order) {
  const int n = static_cast<int>(order.size());
  LossGrad out;
  out.dscores = Eigen::VectorXd::Zero(scores.size());
  if (n <= 1) return out;

  double shift = scores.maxCoeff();
  // Suffix sums of exp(s - shift) in ground-truth order.
  std::vector<double> suffix(n + 1, 0.0);
  for (int j = n - 1; j >= 0; --j)
    suffix[j] = suffix[j + 1] + std::exp(scores[order[j]] - shift);

  double loss = 0.0, inv_suffix_prefix = 0.0;
  for (int j = 0; j < n; ++j) {
    loss += std::log(suffix[j]) + shift - scores[order[j]];
    inv_suffix_prefix += 1.0 / suffix[j];
    out.dscores[order[j]] =
        std::exp(scores[order[j]] - shift) * inv_suffix_prefix - 1.0;
  }
  out.loss = loss;
  return out;
}

std::vector<int> ground_truth_order(const std::vector<int>& grades,
                                    const std::vector<int>& asset_ids) {
  std::vector<int> order(grades.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (grades[a] != grades[b]) return grades[a] > grades[b];
    return asset_ids[a] < asset_ids[b];
  });
  return order;
}

}  // namespace csm
