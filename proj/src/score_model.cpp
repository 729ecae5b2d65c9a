#include "csm/score_model.hpp"

#include <fstream>

#include "csm/common.hpp"
#include "csm/dates.hpp"
#include "csm/rng.hpp"
#include "json.hpp"

namespace csm {

using nlohmann::json;

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kRandom: return "rand";
    case ModelKind::kJt: return "jt";
    case ModelKind::kBaz: return "baz";
    case ModelKind::kMlp: return "mlp";
    case ModelKind::kRankNet: return "ranknet";
    case ModelKind::kLambdaMart: return "lambdamart";
    case ModelKind::kListNet: return "listnet";
    case ModelKind::kListMle: return "listmle";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
  for (ModelKind k :
       {ModelKind::kRandom, ModelKind::kJt, ModelKind::kBaz, ModelKind::kMlp,
        ModelKind::kRankNet, ModelKind::kLambdaMart, ModelKind::kListNet,
        ModelKind::kListMle})
    if (name == to_string(k)) return k;
  throw ValidationError("unknown model kind '" + name + "'");
}

ScoreModel ScoreModel::heuristic(ModelKind kind, uint64_t random_seed) {
  ScoreModel m;
  m.kind = kind;
  m.random_seed = random_seed;
  m.standardized_inputs = false;
  return m;
}

Eigen::VectorXd score_random(int n, uint64_t seed, const Date& rebalance_date) {
  Rng rng(seed, "random-model",
          static_cast<uint64_t>(date_key(rebalance_date)));
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = rng.uniform();
  return out;
}

Eigen::VectorXd score_jt(const FeatureGroup& group) {
  return group.X.col(kFeatRawRet252);
}

Eigen::VectorXd score_baz(const FeatureGroup& group) {
  return group.X.col(kFeatBazComposite);
}

Eigen::VectorXd score(const ScoreModel& model, const FeatureGroup& group) {
  if (!is_heuristic(model.kind) &&
      group.standardized != model.standardized_inputs)
    throw ValidationError("score: feature standardization mismatch for " +
                          std::string(to_string(model.kind)));
  switch (model.kind) {
    case ModelKind::kRandom:
      return score_random(group.size(), model.random_seed, group.date);
    case ModelKind::kJt:
      return score_jt(group);
    case ModelKind::kBaz:
      return score_baz(group);
    case ModelKind::kMlp:
    case ModelKind::kRankNet:
    case ModelKind::kListNet:
    case ModelKind::kListMle:
      return mlp_forward(model.mlp, model.mlp_spec, group.X, /*train=*/false,
                         nullptr);
    case ModelKind::kLambdaMart:
      return model.ensemble.predict_matrix(group.X);
  }
  throw ValidationError("score: unknown model kind tag");
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  int r = static_cast<int>(rows.size());
  int c = r > 0 ? static_cast<int>(rows[0].size()) : 0;
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  return m;
}

json tree_to_json(const Tree& t) {
  return json{{"feature", t.feature},
              {"threshold", t.threshold},
              {"left", t.left},
              {"right", t.right},
              {"value", t.value}};
}

Tree tree_from_json(const json& j) {
  Tree t;
  t.feature = j.at("feature").get<std::vector<int>>();
  t.threshold = j.at("threshold").get<std::vector<double>>();
  t.left = j.at("left").get<std::vector<int>>();
  t.right = j.at("right").get<std::vector<int>>();
  t.value = j.at("value").get<std::vector<double>>();
  return t;
}

}  // namespace

std::string checkpoint_to_json(const ScoreModel& model) {
  json j;
  j["format_version"] = 1;
  j["kind"] = to_string(model.kind);
  j["standardized_inputs"] = model.standardized_inputs;
  j["random_seed"] = model.random_seed;
  if (!model.metadata_json.empty())
    j["metadata"] = json::parse(model.metadata_json);
  if (is_neural(model.kind)) {
    j["mlp"] = {{"input_dim", model.mlp_spec.input_dim},
                {"hidden_width", model.mlp_spec.hidden_width},
                {"dropout", model.mlp_spec.dropout},
                {"W1", matrix_to_json(model.mlp.W1)},
                {"b1", std::vector<double>(model.mlp.b1.data(),
                                           model.mlp.b1.data() +
                                               model.mlp.b1.size())},
                {"W2", matrix_to_json(model.mlp.W2)},
                {"b2", std::vector<double>(model.mlp.b2.data(),
                                           model.mlp.b2.data() +
                                               model.mlp.b2.size())},
                {"W3", std::vector<double>(model.mlp.W3.data(),
                                           model.mlp.W3.data() +
                                               model.mlp.W3.size())},
                {"b3", model.mlp.b3}};
  }
  if (model.kind == ModelKind::kLambdaMart) {
    json trees = json::array();
    for (const auto& t : model.ensemble.trees)
      trees.push_back(tree_to_json(t));
    j["ensemble"] = {{"eta", model.ensemble.eta}, {"trees", std::move(trees)}};
  }
  return j.dump(1);
}

ScoreModel checkpoint_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("format_version").get<int>() != 1)
    throw ValidationError("unsupported checkpoint version");
  ScoreModel m;
  m.kind = model_kind_from_string(j.at("kind").get<std::string>());
  m.standardized_inputs = j.at("standardized_inputs").get<bool>();
  m.random_seed = j.at("random_seed").get<uint64_t>();
  if (j.contains("metadata")) m.metadata_json = j["metadata"].dump();
  if (j.contains("mlp")) {
    const json& n = j["mlp"];
    m.mlp_spec.input_dim = n.at("input_dim").get<int>();
    m.mlp_spec.hidden_width = n.at("hidden_width").get<int>();
    m.mlp_spec.dropout = n.at("dropout").get<double>();
    m.mlp.W1 = matrix_from_json(n.at("W1"));
    m.mlp.W2 = matrix_from_json(n.at("W2"));
    auto b1 = n.at("b1").get<std::vector<double>>();
    auto b2 = n.at("b2").get<std::vector<double>>();
    auto w3 = n.at("W3").get<std::vector<double>>();
    m.mlp.b1 = Eigen::Map<Eigen::VectorXd>(b1.data(), b1.size());
    m.mlp.b2 = Eigen::Map<Eigen::VectorXd>(b2.data(), b2.size());
    m.mlp.W3 = Eigen::Map<Eigen::RowVectorXd>(w3.data(), w3.size());
    m.mlp.b3 = n.at("b3").get<double>();
  }
  if (j.contains("ensemble")) {
    m.ensemble.eta = j["ensemble"].at("eta").get<double>();
    for (const auto& t : j["ensemble"].at("trees"))
      m.ensemble.trees.push_back(tree_from_json(t));
  }
  return m;
}

void save_checkpoint(const ScoreModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write checkpoint " + path);
  out << checkpoint_to_json(model) << "\n";
}

ScoreModel load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read checkpoint " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return checkpoint_from_json(text);
}

}  // namespace csm
