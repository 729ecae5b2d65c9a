#include "csm/lambdamart.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "csm/common.hpp"
#include "csm/metrics.hpp"

namespace csm {

double Tree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  int node = 0;
  while (feature[node] >= 0)
    node = row[feature[node]] < threshold[node] ? left[node] : right[node];
  return value[node];
}

double TreeEnsemble::predict(
    const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += eta * t.predict(row);
  return sum;
}

Eigen::VectorXd TreeEnsemble::predict_matrix(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(X.rows());
  for (int i = 0; i < X.rows(); ++i) out[i] = predict(X.row(i));
  return out;
}

namespace {

double inverse_ideal_dcg(const std::vector<int>& grades) {
  std::vector<int> sorted = grades;
  std::sort(sorted.begin(), sorted.end(), std::greater<int>());
  double idcg = 0.0;
  for (size_t pos = 0; pos < sorted.size(); ++pos)
    idcg += (std::pow(2.0, sorted[pos]) - 1.0) /
            std::log2(static_cast<double>(pos) + 2.0);
  return idcg > 0.0 ? 1.0 / idcg : 0.0;
}

double delta_ndcg(const std::vector<int>& grades,
                  const std::vector<int>& positions, int i, int j,
                  double inv_idcg) {
  double gain_diff = std::pow(2.0, grades[i]) - std::pow(2.0, grades[j]);
  double disc_diff = 1.0 / std::log2(positions[i] + 1.0) -
                     1.0 / std::log2(positions[j] + 1.0);
  return std::abs(gain_diff * disc_diff) * inv_idcg;
}

std::vector<int> ranked_positions_for(const Eigen::VectorXd& scores) {
  const int n = static_cast<int>(scores.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  std::vector<int> pos(n);
  for (int p = 0; p < n; ++p) pos[order[p]] = p + 1;
  return pos;
}

}  // namespace

double ndcg_delta(const std::vector<int>& grades,
                  const std::vector<int>& ranked_positions, int i, int j) {
  return delta_ndcg(grades, ranked_positions, i, j,
                    inverse_ideal_dcg(grades));
}

LambdaResult lambda_gradients(const Eigen::VectorXd& scores,
                              const std::vector<int>& grades, double slope) {
  const int n = static_cast<int>(scores.size());
  LambdaResult out;
  out.lambda = Eigen::VectorXd::Zero(n);
  out.weight = Eigen::VectorXd::Zero(n);
  if (n < 2) return out;

  std::vector<int> positions = ranked_positions_for(scores);
  double inv_idcg = inverse_ideal_dcg(grades);

  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (grades[a] == grades[b]) continue;
      int i = grades[a] > grades[b] ? a : b;  // winner
      int j = grades[a] > grades[b] ? b : a;
      double delta = delta_ndcg(grades, positions, i, j, inv_idcg);
      double rho = 1.0 / (1.0 + std::exp(slope * (scores[i] - scores[j])));
      double lambda_pair = -slope * rho * delta;
      double weight_pair = slope * slope * rho * (1.0 - rho) * delta;
      out.lambda[i] += lambda_pair;
      out.lambda[j] -= lambda_pair;
      out.weight[i] += weight_pair;
      out.weight[j] += weight_pair;
    }
  }
  return out;
}

namespace {

constexpr double kMinGain = 1e-12;
constexpr double kLeafRidge = 1e-6;

struct TreeBuilder {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& response;  // -lambda
  const Eigen::VectorXd& lambda;
  const Eigen::VectorXd& weight;
  int max_depth;
  int min_leaf;
  Tree tree;

  int build(std::vector<int>& samples, int depth) {
    int node = tree.node_count();
    tree.feature.push_back(-1);
    tree.threshold.push_back(0.0);
    tree.left.push_back(-1);
    tree.right.push_back(-1);
    double lambda_sum = 0.0, weight_sum = 0.0;
    for (int s : samples) {
      lambda_sum += lambda[s];
      weight_sum += weight[s];
    }
    tree.value.push_back(-lambda_sum / (weight_sum + kLeafRidge));

    if (depth >= max_depth ||
        static_cast<int>(samples.size()) < 2 * min_leaf)
      return node;

    int best_feature = -1;
    double best_gain = kMinGain, best_threshold = 0.0;
    std::vector<int> sorted = samples;
    const int n = static_cast<int>(samples.size());
    double total = 0.0;
    for (int s : samples) total += response[s];

    for (int f = 0; f < X.cols(); ++f) {
      std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
        if (X(a, f) != X(b, f)) return X(a, f) < X(b, f);
        return a < b;
      });
      double left_sum = 0.0;
      for (int split = 1; split < n; ++split) {
        left_sum += response[sorted[split - 1]];
        if (split < min_leaf || n - split < min_leaf) continue;
        double lo = X(sorted[split - 1], f), hi = X(sorted[split], f);
        if (lo == hi) continue;
        double right_sum = total - left_sum;
        double gain = left_sum * left_sum / split +
                      right_sum * right_sum / (n - split) -
                      total * total / n;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = lo + (hi - lo) / 2.0;
        }
      }
    }
    if (best_feature < 0) return node;

    std::vector<int> left_samples, right_samples;
    for (int s : samples)
      (X(s, best_feature) < best_threshold ? left_samples : right_samples)
          .push_back(s);
    tree.feature[node] = best_feature;
    tree.threshold[node] = best_threshold;
    tree.left[node] = build(left_samples, depth + 1);
    tree.right[node] = build(right_samples, depth + 1);
    return node;
  }
};

}  // namespace

Tree fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& lambda,
              const Eigen::VectorXd& weight, int max_depth, int min_leaf) {
  if (X.rows() != lambda.size() || X.rows() != weight.size())
    throw ValidationError("fit_tree: shape mismatch");
  Eigen::VectorXd response = -lambda;
  TreeBuilder builder{X, response, lambda, weight, max_depth, min_leaf, {}};
  std::vector<int> samples(X.rows());
  std::iota(samples.begin(), samples.end(), 0);
  builder.build(samples, 0);
  return std::move(builder.tree);
}

TreeEnsemble lambdamart_train(const std::vector<RankingGroup>& train,
                              const std::vector<RankingGroup>& validation,
                              const LambdaMartParams& params,
                              LambdaMartHistory* history) {
  if (train.empty()) throw ValidationError("lambdamart_train: no groups");
  int total_rows = 0;
  for (const auto& g : train) total_rows += g.size();

  Eigen::MatrixXd X(total_rows, train.front().X.cols());
  std::vector<int> offsets{0};
  for (const auto& g : train) {
    X.middleRows(offsets.back(), g.size()) = g.X;
    offsets.push_back(offsets.back() + g.size());
  }

  Eigen::VectorXd train_scores = Eigen::VectorXd::Zero(total_rows);
  std::vector<Eigen::VectorXd> val_scores;
  for (const auto& g : validation)
    val_scores.push_back(Eigen::VectorXd::Zero(g.size()));

  TreeEnsemble ensemble;
  ensemble.eta = params.eta;
  double best_ndcg = -1.0;
  int best_round = 0;
  LambdaMartHistory local;

  for (int round = 0; round < params.rounds; ++round) {
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(total_rows);
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(total_rows);
    for (size_t gi = 0; gi < train.size(); ++gi) {
      auto res = lambda_gradients(
          train_scores.segment(offsets[gi], train[gi].size()),
          train[gi].grades, params.slope);
      lambda.segment(offsets[gi], train[gi].size()) = res.lambda;
      weight.segment(offsets[gi], train[gi].size()) = res.weight;
    }
    Tree tree = fit_tree(X, lambda, weight, params.max_depth, params.min_leaf);
    for (int r = 0; r < total_rows; ++r)
      train_scores[r] += params.eta * tree.predict(X.row(r));
    ensemble.trees.push_back(std::move(tree));

    if (!validation.empty()) {
      double ndcg_sum = 0.0;
      for (size_t gi = 0; gi < validation.size(); ++gi) {
        const auto& g = validation[gi];
        for (int r = 0; r < g.size(); ++r)
          val_scores[gi][r] +=
              params.eta * ensemble.trees.back().predict(g.X.row(r));
        std::vector<double> s(val_scores[gi].data(),
                              val_scores[gi].data() + g.size());
        ndcg_sum += ndcg_at_k(s, g.grades, params.ndcg_k, NdcgSide::kLongs);
      }
      double ndcg = ndcg_sum / static_cast<double>(validation.size());
      local.val_ndcg.push_back(ndcg);
      if (ndcg > best_ndcg) {
        best_ndcg = ndcg;
        best_round = round + 1;
      }
    } else {
      best_round = round + 1;
    }
  }
  ensemble.trees.resize(best_round);
  local.best_round = best_round;
  if (history != nullptr) *history = std::move(local);
  return ensemble;
}

}  // namespace csm
