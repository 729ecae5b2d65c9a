#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "csm/labeling.hpp"

namespace csm {

/// Binary regression tree stored as parallel node arrays; feature < 0 marks
/// a leaf. Routing rule: x[feature] < threshold goes left.
struct Tree {
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<int> left, right;
  std::vector<double> value;

  int node_count() const { return static_cast<int>(feature.size()); }
  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
};

struct TreeEnsemble {
  double eta = 0.1;
  std::vector<Tree> trees;

  int rounds() const { return static_cast<int>(trees.size()); }
  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  Eigen::VectorXd predict_matrix(const Eigen::MatrixXd& X) const;
};

/// |NDCG change| from swapping the items currently at the ranked positions
/// of i and j (1-based positions, full-list ideal-DCG normalization).
double ndcg_delta(const std::vector<int>& grades,
                  const std::vector<int>& ranked_positions, int i, int j);

struct LambdaResult {
  Eigen::VectorXd lambda;  // per-item pseudo-gradient of the implicit loss
  Eigen::VectorXd weight;  // per-item second-order weight
};

/// LambdaRank gradients for one list: for every pair with grade_i > grade_j,
/// rho = sigmoid(-slope (s_i - s_j)), lambda_pair = -slope rho |dNDCG|,
/// weight_pair = slope^2 rho (1 - rho) |dNDCG|, accumulated antisymmetrically
/// (winner gets lambda_pair, loser the negation; weights add to both).
LambdaResult lambda_gradients(const Eigen::VectorXd& scores,
                              const std::vector<int>& grades,
                              double slope = 1.0);

/// Greedy variance-reduction fit on the pseudo-response -lambda; leaf values
/// are Newton steps -sum(lambda) / (sum(weight) + 1e-6). Thresholds are
/// midpoints between distinct consecutive sorted values, so only the order
/// of feature values matters.
Tree fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& lambda,
              const Eigen::VectorXd& weight, int max_depth, int min_leaf = 20);

struct LambdaMartParams {
  double eta = 0.1;
  int rounds = 80;
  int max_depth = 4;
  int min_leaf = 20;
  double slope = 1.0;
  int ndcg_k = 100;
};

struct LambdaMartHistory {
  std::vector<double> val_ndcg;  // per round, when a validation set exists
  int best_round = 0;
};

/// Boosting loop over the training groups; each round recomputes lambdas
/// from the current ensemble scores and fits one tree on the pooled rows.
/// Validation NDCG@k is monitored per round and the best-round prefix is
/// returned. Deterministic for fixed inputs.
TreeEnsemble lambdamart_train(const std::vector<RankingGroup>& train,
                              const std::vector<RankingGroup>& validation,
                              const LambdaMartParams& params,
                              LambdaMartHistory* history = nullptr);

}  // namespace csm
