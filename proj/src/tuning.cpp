#include "csm/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "csm/common.hpp"
#include "csm/log.hpp"
#include "csm/losses.hpp"
#include "csm/rng.hpp"
#include "json.hpp"

namespace csm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string HyperChoice::to_string(ModelKind kind) const {
  std::ostringstream ss;
  if (kind == ModelKind::kLambdaMart) {
    ss << "eta=" << tree.eta << ",rounds=" << tree.num_boost_round
       << ",depth=" << tree.max_depth;
  } else {
    ss << "dropout=" << nn.dropout << ",width=" << nn.hidden_width
       << ",norm=" << nn.max_grad_norm << ",lr=" << nn.learning_rate
       << ",minibatch=" << nn.minibatch;
  }
  return ss.str();
}

HyperGrid HyperGrid::reference(ModelKind kind) {
  HyperGrid g;
  switch (kind) {
    case ModelKind::kMlp:
    case ModelKind::kRankNet:
      g.dropout_rate = {0.0, 0.2, 0.4, 0.6, 0.8};
      g.hidden_width = {64, 128, 256, 512, 1024, 2048};
      g.max_grad_norm = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
      g.learning_rate = {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
      g.minibatch = {64, 128, 256, 512, 1024};
      break;
    case ModelKind::kListNet:
    case ModelKind::kListMle:
      g.dropout_rate = {0.0, 0.2, 0.4, 0.6, 0.8};
      g.hidden_width = {64, 128, 256, 512, 1024, 2048};
      g.max_grad_norm = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
      g.learning_rate = {1e-8, 1e-7, 1e-6, 1e-5, 1e-4};
      g.minibatch = {1, 2, 4, 8, 16};
      break;
    case ModelKind::kLambdaMart:
      g.eta = {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
      g.num_boost_round = {5, 10, 20, 40, 80, 160, 320};
      g.max_depth = {2, 4, 6, 8, 10};
      break;
    default:
      break;  // heuristic kinds have nothing to tune
  }
  return g;
}

void split_dataset(const RankingDataset& dataset, double train_fraction,
                   std::vector<RankingGroup>& train,
                   std::vector<RankingGroup>& validation) {
  const int g = dataset.size();
  int n_train = static_cast<int>(std::floor(train_fraction * g));
  n_train = std::clamp(n_train, 2, g - 2);
  if (g < 4)
    throw ValidationError("train_neural: need >= 2 groups in each split");
  train.assign(dataset.groups.begin(), dataset.groups.begin() + n_train);
  validation.assign(dataset.groups.begin() + n_train, dataset.groups.end());
}

namespace {

// Loss and score-gradient of one group under the given kind's objective.
LossGrad group_loss_grad(ModelKind kind, const RankingGroup& group,
                         const Eigen::VectorXd& scores,
                         const PairSet* pairs) {
  switch (kind) {
    case ModelKind::kListNet: {
      Eigen::VectorXd targets(group.size());
      for (int i = 0; i < group.size(); ++i)
        targets[i] = static_cast<double>(group.grades[i]);
      return listnet_loss_grad(scores, targets);
    }
    case ModelKind::kListMle:
      return listmle_loss_grad(scores,
                               ground_truth_order(group.grades, group.assets));
    case ModelKind::kRankNet:
      return ranknet_loss_grad(scores, *pairs);
    default:
      throw ValidationError("group_loss_grad: unsupported kind");
  }
}

struct NeuralTrainer {
  ModelKind kind = ModelKind::kMlp;
  MlpSpec spec;
  std::vector<RankingGroup> train, validation;

  // Pooled rows for the pointwise model.
  Eigen::MatrixXd pooled_x;
  Eigen::VectorXd pooled_y;
  Eigen::MatrixXd val_x;
  Eigen::VectorXd val_y;
  std::vector<PairSet> val_pairs;  // RankNet only

  void pool_rows() {
    auto stack = [](const std::vector<RankingGroup>& groups,
                    Eigen::MatrixXd& x, Eigen::VectorXd& y) {
      int rows = 0;
      for (const auto& g : groups) rows += g.size();
      x.resize(rows, groups.front().X.cols());
      y.resize(rows);
      int off = 0;
      for (const auto& g : groups) {
        x.middleRows(off, g.size()) = g.X;
        for (int i = 0; i < g.size(); ++i) y[off + i] = g.targets[i];
        off += g.size();
      }
    };
    stack(train, pooled_x, pooled_y);
    stack(validation, val_x, val_y);
  }

  double validation_loss(const MlpParams& params) const {
    if (kind == ModelKind::kMlp) {
      Eigen::VectorXd scores =
          mlp_forward(params, spec, val_x, /*train=*/false, nullptr);
      return mse_loss_grad(scores, val_y).loss;
    }
    double total = 0.0;
    int counted = 0;
    for (size_t gi = 0; gi < validation.size(); ++gi) {
      const auto& g = validation[gi];
      Eigen::VectorXd scores =
          mlp_forward(params, spec, g.X, /*train=*/false, nullptr);
      LossGrad lg = group_loss_grad(
          kind, g, scores, kind == ModelKind::kRankNet ? &val_pairs[gi] : nullptr);
      total += lg.loss;
      ++counted;
    }
    return counted > 0 ? total / counted : kInf;
  }
};

}  // namespace

TrainedModel train_neural(ModelKind kind, const RankingDataset& dataset,
                          const NeuralHyper& hyper, const TrainConfig& config,
                          uint64_t seed) {
  if (!is_neural(kind))
    throw ValidationError("train_neural: not a neural kind");
  if (config.patience >= config.max_epochs)
    throw ValidationError("train config: patience must be < max_epochs");

  NeuralTrainer tr;
  tr.kind = kind;
  split_dataset(dataset, config.train_fraction, tr.train, tr.validation);
  tr.spec.input_dim = static_cast<int>(dataset.groups.front().X.cols());
  tr.spec.hidden_width = hyper.hidden_width;
  tr.spec.dropout = hyper.dropout;
  if (kind == ModelKind::kMlp) tr.pool_rows();
  if (kind == ModelKind::kRankNet)
    for (const auto& g : tr.validation)
      tr.val_pairs.push_back(PairSet::from_grades(g.grades));

  MlpParams params = init_params(tr.spec, derive_seed(seed, "init"));
  Eigen::VectorXd flat = params.flatten();
  AdamState adam = AdamState::create(static_cast<int>(flat.size()),
                                     hyper.learning_rate);
  Rng shuffle_rng(seed, "shuffle");
  Rng dropout_rng(seed, "dropout");
  Rng sample_rng(seed, "sample");

  TrainedModel out;
  out.history.best_epoch = -1;
  double best_val = kInf;
  Eigen::VectorXd best_flat = flat;
  int bad_epochs = 0;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    double epoch_loss = 0.0;
    int epoch_steps = 0;

    if (kind == ModelKind::kMlp) {
      std::vector<int> order(static_cast<size_t>(tr.pooled_x.rows()));
      std::iota(order.begin(), order.end(), 0);
      shuffle_rng.shuffle(order);
      for (size_t start = 0; start < order.size();
           start += static_cast<size_t>(hyper.minibatch)) {
        size_t count =
            std::min<size_t>(hyper.minibatch, order.size() - start);
        Eigen::MatrixXd xb(count, tr.spec.input_dim);
        Eigen::VectorXd yb(count);
        for (size_t i = 0; i < count; ++i) {
          xb.row(static_cast<int>(i)) = tr.pooled_x.row(order[start + i]);
          yb[static_cast<int>(i)] = tr.pooled_y[order[start + i]];
        }
        params = MlpParams::from_flat(tr.spec, flat);
        ForwardCache cache;
        Eigen::VectorXd scores =
            mlp_forward(params, tr.spec, xb, /*train=*/true, &dropout_rng,
                        &cache);
        LossGrad lg = mse_loss_grad(scores, yb);
        Eigen::VectorXd grads = mlp_backward(params, tr.spec, cache,
                                             lg.dscores);
        adam_step(adam, flat, std::move(grads), hyper.max_grad_norm);
        epoch_loss += lg.loss;
        ++epoch_steps;
      }
    } else if (kind == ModelKind::kRankNet) {
      std::vector<int> order(tr.train.size());
      std::iota(order.begin(), order.end(), 0);
      shuffle_rng.shuffle(order);
      for (int gi : order) {
        const auto& g = tr.train[gi];
        int m = std::min(hyper.minibatch, g.size());
        std::vector<int> rows = sample_rng.sample_indices(g.size(), m);
        std::sort(rows.begin(), rows.end());
        std::vector<int> grades(m);
        Eigen::MatrixXd xb(m, tr.spec.input_dim);
        for (int i = 0; i < m; ++i) {
          grades[i] = g.grades[rows[i]];
          xb.row(i) = g.X.row(rows[i]);
        }
        PairSet pairs = PairSet::from_grades(grades);
        if (pairs.empty()) continue;
        params = MlpParams::from_flat(tr.spec, flat);
        ForwardCache cache;
        Eigen::VectorXd scores =
            mlp_forward(params, tr.spec, xb, /*train=*/true, &dropout_rng,
                        &cache);
        LossGrad lg = ranknet_loss_grad(scores, pairs);
        Eigen::VectorXd grads = mlp_backward(params, tr.spec, cache,
                                             lg.dscores);
        adam_step(adam, flat, std::move(grads), hyper.max_grad_norm);
        epoch_loss += lg.loss;
        ++epoch_steps;
      }
    } else {  // listwise kinds: minibatch counts whole lists
      std::vector<int> order(tr.train.size());
      std::iota(order.begin(), order.end(), 0);
      shuffle_rng.shuffle(order);
      for (size_t start = 0; start < order.size();
           start += static_cast<size_t>(hyper.minibatch)) {
        size_t count =
            std::min<size_t>(hyper.minibatch, order.size() - start);
        params = MlpParams::from_flat(tr.spec, flat);
        Eigen::VectorXd grads = Eigen::VectorXd::Zero(flat.size());
        double batch_loss = 0.0;
        for (size_t i = 0; i < count; ++i) {
          const auto& g = tr.train[order[start + i]];
          ForwardCache cache;
          Eigen::VectorXd scores =
              mlp_forward(params, tr.spec, g.X, /*train=*/true, &dropout_rng,
                          &cache);
          LossGrad lg = group_loss_grad(kind, g, scores, nullptr);
          grads += mlp_backward(params, tr.spec, cache, lg.dscores);
          batch_loss += lg.loss;
        }
        grads /= static_cast<double>(count);
        adam_step(adam, flat, std::move(grads), hyper.max_grad_norm);
        epoch_loss += batch_loss / static_cast<double>(count);
        ++epoch_steps;
      }
    }

    double train_loss = epoch_steps > 0 ? epoch_loss / epoch_steps : 0.0;
    params = MlpParams::from_flat(tr.spec, flat);
    double val_loss = tr.validation_loss(params);
    out.history.train_loss.push_back(train_loss);
    out.history.val_loss.push_back(val_loss);
    out.history.epochs_run = epoch + 1;

    if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
      out.history.failed = true;
      log_warn(std::string("train_neural(") + to_string(kind) +
               "): diverged at epoch " + std::to_string(epoch));
      break;
    }
    if (val_loss < best_val) {
      best_val = val_loss;
      best_flat = flat;
      out.history.best_epoch = epoch;
      bad_epochs = 0;
    } else if (++bad_epochs >= config.patience) {
      break;
    }
  }

  out.model.kind = kind;
  out.model.mlp_spec = tr.spec;
  out.model.mlp = MlpParams::from_flat(tr.spec, best_flat);
  out.model.standardized_inputs = true;
  out.val_criterion = out.history.failed ? kInf : best_val;
  return out;
}

TrainedModel train_lambdamart(const RankingDataset& dataset,
                              const TreeHyper& hyper,
                              const TrainConfig& config, uint64_t seed) {
  std::vector<RankingGroup> train, validation;
  split_dataset(dataset, config.train_fraction, train, validation);

  LambdaMartParams params;
  params.eta = hyper.eta;
  params.rounds = hyper.num_boost_round;
  params.max_depth = hyper.max_depth;
  LambdaMartHistory history;
  TreeEnsemble ensemble = lambdamart_train(train, validation, params, &history);

  TrainedModel out;
  out.model.kind = ModelKind::kLambdaMart;
  out.model.ensemble = std::move(ensemble);
  out.model.standardized_inputs = true;
  double best_ndcg =
      history.best_round > 0 && !history.val_ndcg.empty()
          ? history.val_ndcg[history.best_round - 1]
          : -kInf;
  out.val_criterion = -best_ndcg;  // lower is better, uniformly
  out.history.best_epoch = history.best_round - 1;
  out.history.epochs_run = static_cast<int>(history.val_ndcg.size());
  for (double v : history.val_ndcg) out.history.val_loss.push_back(-v);
  out.history.failed = !std::isfinite(out.val_criterion);
  (void)seed;  // boosting is deterministic; kept for interface symmetry
  return out;
}

SearchResult random_search(ModelKind kind, const RankingDataset& dataset,
                           const HyperGrid& grid, const TrainConfig& config,
                           uint64_t seed) {
  Rng rng(seed, "search");
  auto pick_d = [&rng](const std::vector<double>& v) {
    if (v.empty()) throw ValidationError("random_search: empty grid list");
    return v[rng.uniform_int(static_cast<int>(v.size()))];
  };
  auto pick_i = [&rng](const std::vector<int>& v) {
    if (v.empty()) throw ValidationError("random_search: empty grid list");
    return v[rng.uniform_int(static_cast<int>(v.size()))];
  };

  std::vector<std::pair<HyperChoice, uint64_t>> candidates;  // with draw index
  std::set<std::string> seen;
  for (int iter = 0; iter < config.search_iterations; ++iter) {
    HyperChoice choice;
    if (kind == ModelKind::kLambdaMart) {
      choice.tree.eta = pick_d(grid.eta);
      choice.tree.num_boost_round = pick_i(grid.num_boost_round);
      choice.tree.max_depth = pick_i(grid.max_depth);
    } else {
      choice.nn.dropout = pick_d(grid.dropout_rate);
      choice.nn.hidden_width = pick_i(grid.hidden_width);
      choice.nn.max_grad_norm = pick_d(grid.max_grad_norm);
      choice.nn.learning_rate = pick_d(grid.learning_rate);
      choice.nn.minibatch = pick_i(grid.minibatch);
    }
    if (seen.insert(choice.to_string(kind)).second)
      candidates.emplace_back(choice, static_cast<uint64_t>(iter));
  }

  SearchResult result;
  double best = kInf;
  bool have_best = false;
  for (const auto& [choice, draw] : candidates) {
    uint64_t cand_seed = derive_seed(seed, "candidate", draw);
    TrainedModel trained;
    try {
      trained = kind == ModelKind::kLambdaMart
                    ? train_lambdamart(dataset, choice.tree, config, cand_seed)
                    : train_neural(kind, dataset, choice.nn, config,
                                   cand_seed);
      trained.model.metadata_json =
          nlohmann::json{{"hyper", choice.to_string(kind)},
                         {"train_seed", cand_seed},
                         {"best_epoch", trained.history.best_epoch},
                         {"epochs_run", trained.history.epochs_run},
                         {"val_criterion", trained.val_criterion}}
              .dump();
    } catch (const std::exception& e) {
      log_warn(std::string("candidate failed outright: ") + e.what());
      trained.history.failed = true;
      trained.val_criterion = kInf;
    }
    bool failed = trained.history.failed;
    result.leaderboard.push_back({choice, trained.val_criterion, failed});
    if (!failed && trained.val_criterion < best) {
      best = trained.val_criterion;
      result.best = std::move(trained);
      have_best = true;
    }
  }
  if (!have_best)
    throw ValidationError("random_search: every candidate failed");
  std::stable_sort(result.leaderboard.begin(), result.leaderboard.end(),
                   [](const SearchEntry& a, const SearchEntry& b) {
                     if (a.failed != b.failed) return !a.failed;
                     return a.val_criterion < b.val_criterion;
                   });
  return result;
}

WalkForwardResult walk_forward(const PanelBundle& bundle, ModelKind kind,
                               const WalkForwardConfig& wf,
                               const TrainConfig& config,
                               const HyperGrid& grid, uint64_t master_seed) {
  const int n = bundle.n_rebalances();
  const int interval = wf.retune_interval_months;
  if (n <= interval)
    throw ValidationError("walk_forward: panel shorter than one retune interval");

  WalkForwardResult result;
  for (int retune = interval; retune < n; retune += interval) {
    const int last = std::min(retune + interval, n) - 1;
    WindowProvenance window;
    window.retune_rebalance = retune;
    window.retune_date = bundle.panel.dates[bundle.calendar.indices[retune]];
    window.first_rebalance = retune;
    window.last_rebalance = last;

    if (is_heuristic(kind)) {
      window.model = ScoreModel::heuristic(
          kind, derive_seed(master_seed, "random-model"));
    } else {
      if (retune < wf.min_history_years * 12) {
        log_warn("walk_forward: window at rebalance " +
                 std::to_string(retune) + " lacks minimum history, skipped");
        continue;
      }
      RankingDataset dataset;
      try {
        dataset = bundle.training_dataset(retune, /*standardized=*/true,
                                          wf.max_train_window_months);
      } catch (const ValidationError& e) {
        log_warn(std::string("walk_forward: no training data, skipped: ") +
                 e.what());
        continue;
      }
      if (dataset.size() < 4) {
        log_warn("walk_forward: too few training groups, window skipped");
        continue;
      }
      uint64_t search_seed = derive_seed(
          master_seed, std::string("search-") + to_string(kind),
          static_cast<uint64_t>(retune));
      SearchResult search =
          random_search(kind, dataset, grid, config, search_seed);
      window.trained = true;
      window.winner = search.leaderboard.front().choice;
      window.val_criterion = search.best.val_criterion;
      window.model = std::move(search.best.model);
    }

    for (int pos = retune; pos <= last; ++pos) {
      const FeatureGroup& fg = is_heuristic(kind)
                                   ? bundle.raw_features[pos]
                                   : bundle.std_features[pos];
      if (fg.size() == 0) continue;
      RebalanceScores rs;
      rs.rebalance = pos;
      rs.rebalance_row = fg.rebalance_row;
      rs.date = fg.date;
      rs.assets = fg.assets;
      rs.scores = score(window.model, fg);
      result.scores.push_back(std::move(rs));
    }
    result.windows.push_back(std::move(window));
  }
  if (result.windows.empty())
    throw ValidationError("walk_forward: no usable windows");
  return result;
}

}  // namespace csm
