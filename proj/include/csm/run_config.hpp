#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "csm/score_model.hpp"
#include "csm/tuning.hpp"

namespace csm {

struct SyntheticSpec {
  int n_assets = 200;
  int n_years = 20;
  double signal_strength = 1.0;
};

/// One structured run configuration; defaults follow the reference
/// protocol (15% vol target, 100 names per side, 5-year retune, k = 100,
/// 50 search iterations). CLI flags override file values.
struct RunConfig {
  std::string csv_path;      // empty -> synthetic source
  SyntheticSpec synthetic;
  std::vector<ModelKind> models{
      ModelKind::kRandom,     ModelKind::kJt,      ModelKind::kBaz,
      ModelKind::kMlp,        ModelKind::kRankNet, ModelKind::kLambdaMart,
      ModelKind::kListNet,    ModelKind::kListMle};
  WalkForwardConfig walk_forward;
  TrainConfig train;
  int n_side = 100;
  double vol_target = 0.15;
  int ndcg_k = 100;
  uint64_t seed = 42;
  std::string out_dir = "out";
  /// Optional per-model grid restrictions; absent kinds use the reference
  /// grids.
  std::map<std::string, HyperGrid> grid_overrides;

  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_json_file(const std::string& path);
  std::string to_json() const;
  /// FNV-1a of the canonical JSON form; recorded in the run manifest.
  uint64_t hash() const;

  HyperGrid grid_for(ModelKind kind) const;
};

/// JSON text form of a grid (used by the run manifest).
std::string grid_to_json_text(const HyperGrid& grid);

}  // namespace csm
