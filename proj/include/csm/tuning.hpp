#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csm/labeling.hpp"
#include "csm/pipeline.hpp"
#include "csm/score_model.hpp"

namespace csm {

struct NeuralHyper {
  double dropout = 0.0;
  int hidden_width = 64;
  double max_grad_norm = 1.0;
  double learning_rate = 1e-3;
  int minibatch = 128;  // rows (MLP), pair-pool securities (RankNet),
                        // lists per step (ListNet / ListMLE)
};

struct TreeHyper {
  double eta = 0.1;
  int num_boost_round = 80;
  int max_depth = 4;
};

struct HyperChoice {
  NeuralHyper nn;
  TreeHyper tree;
  std::string to_string(ModelKind kind) const;
};

/// Discrete per-model search grids. reference() returns the stock grids
/// the protocol ships with; restricted subsets are fine for cheap runs.
struct HyperGrid {
  std::vector<double> dropout_rate;
  std::vector<int> hidden_width;
  std::vector<double> max_grad_norm;
  std::vector<double> learning_rate;
  std::vector<int> minibatch;
  std::vector<double> eta;
  std::vector<int> num_boost_round;
  std::vector<int> max_depth;

  static HyperGrid reference(ModelKind kind);
};

struct TrainConfig {
  int max_epochs = 100;
  int patience = 25;  // consecutive non-improving epochs before stopping
  double train_fraction = 0.9;
  int search_iterations = 50;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  int best_epoch = -1;  // 0-based epoch whose parameters were kept
  int epochs_run = 0;
  bool failed = false;
};

/// One trained candidate. val_criterion is lower-is-better for every kind
/// (validation loss for neural models, negated validation NDCG@100 for
/// LambdaMART) so leaderboards sort uniformly.
struct TrainedModel {
  ScoreModel model;
  TrainHistory history;
  double val_criterion = 0.0;
};

/// Chronological 90/10 group split helper (every validation group dated
/// after every training group).
void split_dataset(const RankingDataset& dataset, double train_fraction,
                   std::vector<RankingGroup>& train,
                   std::vector<RankingGroup>& validation);

/// Epoch loop with minibatches per model kind, per-epoch validation loss,
/// best-epoch restore and early stopping. Divergence marks the candidate
/// failed instead of throwing.
TrainedModel train_neural(ModelKind kind, const RankingDataset& dataset,
                          const NeuralHyper& hyper, const TrainConfig& config,
                          uint64_t seed);

TrainedModel train_lambdamart(const RankingDataset& dataset,
                              const TreeHyper& hyper,
                              const TrainConfig& config, uint64_t seed);

struct SearchEntry {
  HyperChoice choice;
  double val_criterion = 0.0;
  bool failed = false;
};

struct SearchResult {
  TrainedModel best;
  std::vector<SearchEntry> leaderboard;  // sorted, best first
};

/// search_iterations independent uniform draws over the grid cells
/// (duplicates deduplicated), ranked by validation criterion. Deterministic
/// per seed. Throws if every candidate failed.
SearchResult random_search(ModelKind kind, const RankingDataset& dataset,
                           const HyperGrid& grid, const TrainConfig& config,
                           uint64_t seed);

struct WalkForwardConfig {
  int retune_interval_months = 60;  // retune every 5 years
  int min_history_years = 3;        // first window skipped below this
  int max_train_window_months = 0;  // 0 = expanding from data start
};

/// Out-of-sample scores for one rebalance, aligned with the feature group's
/// asset list.
struct RebalanceScores {
  int rebalance = -1;  // position in the calendar
  int rebalance_row = -1;
  Date date;
  std::vector<int> assets;
  Eigen::VectorXd scores;
};

struct WindowProvenance {
  int retune_rebalance = -1;
  Date retune_date;
  int first_rebalance = -1, last_rebalance = -1;
  bool trained = false;  // heuristics skip search and training
  HyperChoice winner;
  double val_criterion = 0.0;
  ScoreModel model;  // the frozen scorer for this window
};

struct WalkForwardResult {
  std::vector<RebalanceScores> scores;  // ordered by rebalance
  std::vector<WindowProvenance> windows;
};

/// Re-tunes every retune_interval_months on an expanding window of history,
/// freezes the winner, and scores the following window. Heuristic kinds
/// bypass training but score the same out-of-sample months.
WalkForwardResult walk_forward(const PanelBundle& bundle, ModelKind kind,
                               const WalkForwardConfig& wf,
                               const TrainConfig& config,
                               const HyperGrid& grid, uint64_t master_seed);

}  // namespace csm
