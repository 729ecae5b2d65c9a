#include "csm/run_config.hpp"

#include <fstream>

#include "csm/common.hpp"
#include "json.hpp"

namespace csm {

using nlohmann::json;

namespace {

HyperGrid grid_from_json(const json& j) {
  HyperGrid g;
  auto load_d = [&](const char* key, std::vector<double>& out) {
    if (j.contains(key)) out = j.at(key).get<std::vector<double>>();
  };
  auto load_i = [&](const char* key, std::vector<int>& out) {
    if (j.contains(key)) out = j.at(key).get<std::vector<int>>();
  };
  load_d("dropout_rate", g.dropout_rate);
  load_i("hidden_width", g.hidden_width);
  load_d("max_grad_norm", g.max_grad_norm);
  load_d("learning_rate", g.learning_rate);
  load_i("minibatch", g.minibatch);
  load_d("eta", g.eta);
  load_i("num_boost_round", g.num_boost_round);
  load_i("max_depth", g.max_depth);
  return g;
}

json grid_to_json(const HyperGrid& g) {
  json j;
  if (!g.dropout_rate.empty()) j["dropout_rate"] = g.dropout_rate;
  if (!g.hidden_width.empty()) j["hidden_width"] = g.hidden_width;
  if (!g.max_grad_norm.empty()) j["max_grad_norm"] = g.max_grad_norm;
  if (!g.learning_rate.empty()) j["learning_rate"] = g.learning_rate;
  if (!g.minibatch.empty()) j["minibatch"] = g.minibatch;
  if (!g.eta.empty()) j["eta"] = g.eta;
  if (!g.num_boost_round.empty()) j["num_boost_round"] = g.num_boost_round;
  if (!g.max_depth.empty()) j["max_depth"] = g.max_depth;
  return j;
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  RunConfig c;
  if (j.contains("data")) {
    const json& d = j["data"];
    if (d.contains("csv")) c.csv_path = d["csv"].get<std::string>();
    if (d.contains("synthetic")) {
      const json& s = d["synthetic"];
      if (s.contains("n_assets")) c.synthetic.n_assets = s["n_assets"];
      if (s.contains("n_years")) c.synthetic.n_years = s["n_years"];
      if (s.contains("signal_strength"))
        c.synthetic.signal_strength = s["signal_strength"];
    }
  }
  if (j.contains("models")) {
    c.models.clear();
    for (const auto& name : j["models"])
      c.models.push_back(model_kind_from_string(name.get<std::string>()));
  }
  if (j.contains("walk_forward")) {
    const json& w = j["walk_forward"];
    if (w.contains("retune_interval_months"))
      c.walk_forward.retune_interval_months = w["retune_interval_months"];
    if (w.contains("min_history_years"))
      c.walk_forward.min_history_years = w["min_history_years"];
    if (w.contains("max_train_window_months"))
      c.walk_forward.max_train_window_months = w["max_train_window_months"];
  }
  if (j.contains("train")) {
    const json& t = j["train"];
    if (t.contains("max_epochs")) c.train.max_epochs = t["max_epochs"];
    if (t.contains("patience")) c.train.patience = t["patience"];
    if (t.contains("train_fraction"))
      c.train.train_fraction = t["train_fraction"];
    if (t.contains("search_iterations"))
      c.train.search_iterations = t["search_iterations"];
  }
  if (j.contains("n_side")) c.n_side = j["n_side"];
  if (j.contains("vol_target")) c.vol_target = j["vol_target"];
  if (j.contains("ndcg_k")) c.ndcg_k = j["ndcg_k"];
  if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
  if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
  if (j.contains("grids"))
    for (const auto& [kind, grid] : j["grids"].items())
      c.grid_overrides[kind] = grid_from_json(grid);
  if (c.train.patience >= c.train.max_epochs)
    throw ValidationError("config: patience must be below max_epochs");
  if (c.train.train_fraction <= 0.0 || c.train.train_fraction >= 1.0)
    throw ValidationError("config: train_fraction must be in (0, 1)");
  return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

std::string RunConfig::to_json() const {
  json j;
  if (!csv_path.empty()) {
    j["data"]["csv"] = csv_path;
  } else {
    j["data"]["synthetic"] = {{"n_assets", synthetic.n_assets},
                              {"n_years", synthetic.n_years},
                              {"signal_strength", synthetic.signal_strength}};
  }
  json model_names = json::array();
  for (ModelKind k : models) model_names.push_back(to_string(k));
  j["models"] = std::move(model_names);
  j["walk_forward"] = {
      {"retune_interval_months", walk_forward.retune_interval_months},
      {"min_history_years", walk_forward.min_history_years},
      {"max_train_window_months", walk_forward.max_train_window_months}};
  j["train"] = {{"max_epochs", train.max_epochs},
                {"patience", train.patience},
                {"train_fraction", train.train_fraction},
                {"search_iterations", train.search_iterations}};
  j["n_side"] = n_side;
  j["vol_target"] = vol_target;
  j["ndcg_k"] = ndcg_k;
  j["seed"] = seed;
  j["out"] = out_dir;
  if (!grid_overrides.empty()) {
    json grids;
    for (const auto& [kind, grid] : grid_overrides)
      grids[kind] = grid_to_json(grid);
    j["grids"] = std::move(grids);
  }
  return j.dump(1);
}

uint64_t RunConfig::hash() const {
  uint64_t h = 1469598103934665603ULL;
  for (char ch : to_json()) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return h;
}

HyperGrid RunConfig::grid_for(ModelKind kind) const {
  auto it = grid_overrides.find(to_string(kind));
  if (it != grid_overrides.end()) return it->second;
  return HyperGrid::reference(kind);
}

std::string grid_to_json_text(const HyperGrid& grid) {
  return grid_to_json(grid).dump();
}

}  // namespace csm
