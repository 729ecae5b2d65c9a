#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace csm {

struct LossGrad {
  double loss = 0.0;
  Eigen::VectorXd dscores;
};

/// Index pairs (i, j) within one rebalance group with grade_i > grade_j.
struct PairSet {
  std::vector<std::pair<int, int>> pairs;

  static PairSet from_grades(const std::vector<int>& grades);
  bool empty() const { return pairs.empty(); }
  int size() const { return static_cast<int>(pairs.size()); }
};

/// L = (1/M) sum (Y - y)^2; dL/dY_i = 2 (Y_i - y_i) / M.
LossGrad mse_loss_grad(const Eigen::VectorXd& scores,
                       const Eigen::VectorXd& targets);

/// Pairwise cross entropy, mean over pairs: for each i beats j,
/// P = sigmoid(slope * (s_i - s_j)) and the contribution is -ln P.
/// An empty pair set yields zero loss and gradients (logged).
LossGrad ranknet_loss_grad(const Eigen::VectorXd& scores, const PairSet& pairs,
                           double slope = 1.0);

/// Cross entropy between top-one distributions: softmax(targets) against
/// softmax(scores); gradient is softmax(scores) - softmax(targets).
LossGrad listnet_loss_grad(const Eigen::VectorXd& scores,
                           const Eigen::VectorXd& targets);

/// Plackett-Luce negative log-likelihood of the ground-truth order
/// (order[j] = item index at rank j, best first), max-subtracted for
/// stability.
LossGrad listmle_loss_grad(const Eigen::VectorXd& scores,
                           const std::vector<int>& order);

/// Descending-grade permutation with ties broken by ascending asset id; the
/// target order ListMLE trains against.
std::vector<int> ground_truth_order(const std::vector<int>& grades,
                                    const std::vector<int>& asset_ids);

}  // namespace csm
