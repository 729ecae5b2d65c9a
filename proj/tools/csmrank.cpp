// csmrank: rank a cross-section of assets with learning-to-rank models and
// backtest decile-style long/short momentum portfolios.
//
// Subcommands: generate, backtest, gradcheck, features, report.

#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "csm/backtest.hpp"
#include "csm/common.hpp"
#include "csm/log.hpp"
#include "csm/losses.hpp"
#include "csm/metrics.hpp"
#include "csm/nn.hpp"
#include "csm/pipeline.hpp"
#include "csm/reports.hpp"
#include "csm/rng.hpp"
#include "csm/run_config.hpp"
#include "csm/tuning.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace csm;

namespace {

constexpr const char* kVersion = "1.0.0";

std::vector<ModelKind> parse_models(const std::string& csv) {
  std::vector<ModelKind> kinds;
  std::string token;
  std::istringstream ss(csv);
  while (std::getline(ss, token, ','))
    if (!token.empty()) kinds.push_back(model_kind_from_string(token));
  if (kinds.empty()) throw ValidationError("empty model list");
  return kinds;
}

int cmd_generate(const SyntheticSpec& spec, uint64_t seed,
                 const std::string& out_path) {
  PricePanel panel = synthetic_panel(spec.n_assets, spec.n_years,
                                     spec.signal_strength, seed);
  if (out_path.find('/') != std::string::npos)
    fs::create_directories(fs::path(out_path).parent_path());
  write_prices_csv(out_path, panel);
  json manifest{{"seed", seed},
                {"n_assets", spec.n_assets},
                {"n_years", spec.n_years},
                {"signal_strength", spec.signal_strength},
                {"rows", panel.n_dates() * panel.n_assets()}};
  std::ofstream mf(out_path + ".manifest.json");
  mf << manifest.dump(1) << "\n";
  std::cout << "wrote " << out_path << " (" << panel.n_assets() << " assets x "
            << panel.n_dates() << " days)\n";
  return 0;
}

PricePanel load_panel(const RunConfig& cfg) {
  if (!cfg.csv_path.empty()) return load_prices(cfg.csv_path);
  return synthetic_panel(cfg.synthetic.n_assets, cfg.synthetic.n_years,
                         cfg.synthetic.signal_strength,
                         derive_seed(cfg.seed, "data"));
}

int cmd_backtest(const RunConfig& cfg) {
  log_info("building panel bundle");
  PanelBundle bundle = PanelBundle::build(load_panel(cfg));
  fs::create_directories(cfg.out_dir);

  std::vector<std::pair<std::string, FinancialSummary>> fin_rows;
  std::vector<std::pair<std::string, RankingSummary>> rank_rows;
  std::vector<std::pair<std::string, const BacktestResult*>> table_models;
  std::deque<BacktestResult> results;  // stable addresses for table_models

  json manifest;
  manifest["format_version"] = 1;
  manifest["version"] = kVersion;
  manifest["config"] = json::parse(cfg.to_json());
  manifest["config_hash"] = cfg.hash();
  manifest["seed"] = cfg.seed;
  manifest["models"] = json::object();

  bool all_ok = true;
  for (ModelKind kind : cfg.models) {
    const std::string name = to_string(kind);
    try {
      log_info("walk-forward for " + name);
      WalkForwardResult wf =
          walk_forward(bundle, kind, cfg.walk_forward, cfg.train,
                       cfg.grid_for(kind), cfg.seed);
      BacktestResult bt =
          run_backtest(bundle, wf.scores, {cfg.n_side, cfg.vol_target});
      if (bt.raw.empty())
        throw ValidationError("backtest produced no traded months");

      fs::path model_dir = fs::path(cfg.out_dir) / name;
      fs::create_directories(model_dir / "checkpoints");
      write_returns_csv((model_dir / "returns.csv").string(), bt);
      write_positions_csv((model_dir / "positions.csv").string(), bt,
                          bundle.panel);

      json windows = json::array();
      for (const auto& w : wf.windows) {
        std::string ckpt =
            (model_dir / "checkpoints" /
             ("window_" + w.retune_date.to_string() + ".json"))
                .string();
        ScoreModel to_save = w.model;
        json meta{{"retune_date", w.retune_date.to_string()},
                  {"trained", w.trained}};
        if (w.trained) {
          meta["winner"] = w.winner.to_string(kind);
          meta["val_criterion"] = w.val_criterion;
          if (!w.model.metadata_json.empty())
            meta["training"] = json::parse(w.model.metadata_json);
        }
        to_save.metadata_json = meta.dump();
        save_checkpoint(to_save, ckpt);
        json wj = meta;
        wj["first_rebalance"] = w.first_rebalance;
        wj["last_rebalance"] = w.last_rebalance;
        wj["checkpoint"] = ckpt;
        windows.push_back(std::move(wj));
      }
      manifest["models"][name] = {
          {"status", "ok"},
          {"months", bt.raw.size()},
          {"grid", json::parse(grid_to_json_text(cfg.grid_for(kind)))},
          {"windows", std::move(windows)}};

      fin_rows.emplace_back(name, financial_summary(bt.rescaled));
      rank_rows.emplace_back(name, ranking_summary(bt.evals, cfg.ndcg_k));
      results.push_back(std::move(bt));
      table_models.emplace_back(name, &results.back());
    } catch (const std::exception& e) {
      all_ok = false;
      log_error("model " + name + " failed: " + e.what());
      manifest["models"][name] = {{"status", "failed"}, {"error", e.what()}};
    }
  }

  write_metrics_csv((fs::path(cfg.out_dir) / "metrics.csv").string(),
                    fin_rows);
  write_metrics_json((fs::path(cfg.out_dir) / "metrics.json").string(),
                     fin_rows);
  write_ranking_csv((fs::path(cfg.out_dir) / "ranking_metrics.csv").string(),
                    rank_rows, cfg.ndcg_k);
  write_ranking_json(
      (fs::path(cfg.out_dir) / "ranking_metrics.json").string(), rank_rows,
      cfg.ndcg_k);
  write_deciles_csv((fs::path(cfg.out_dir) / "deciles.csv").string(),
                    table_models, cfg.vol_target);
  write_cumulative_csv((fs::path(cfg.out_dir) / "cumulative.csv").string(),
                       table_models);
  std::ofstream mf(fs::path(cfg.out_dir) / "manifest.json");
  mf << manifest.dump(1) << "\n";

  std::cout << "backtest complete: " << fin_rows.size() << "/"
            << cfg.models.size() << " models, outputs in " << cfg.out_dir
            << "\n";
  return all_ok ? 0 : 1;
}

int cmd_features(const RunConfig& cfg, const std::string& out_path) {
  PanelBundle bundle = PanelBundle::build(load_panel(cfg));
  if (out_path.find('/') != std::string::npos)
    fs::create_directories(fs::path(out_path).parent_path());
  write_features_csv(out_path, bundle);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_gradcheck(double tol, int trials) {
  Rng rng(7, "gradcheck-cli");
  bool all_pass = true;
  struct Case {
    const char* name;
    double max_rel = 0.0;
  };
  std::vector<Case> cases{{"mse"}, {"ranknet"}, {"listnet"}, {"listmle"}};

  for (int trial = 0; trial < trials; ++trial) {
    int n = 2 + rng.uniform_int(9);
    Eigen::VectorXd scores(n), targets(n);
    std::vector<int> grades(n), ids(n);
    for (int i = 0; i < n; ++i) {
      scores[i] = rng.normal();
      targets[i] = rng.normal();
      grades[i] = rng.uniform_int(5);
      ids[i] = i;
    }
    PairSet pairs = PairSet::from_grades(grades);
    auto order = ground_truth_order(grades, ids);

    auto check = [&](Case& c, auto loss_fn) {
      LossGrad lg = loss_fn(scores);
      auto f = [&](const Eigen::VectorXd& s) { return loss_fn(s).loss; };
      GradCheckReport rep = grad_check(f, scores, lg.dscores, tol);
      c.max_rel = std::max(c.max_rel, rep.max_rel_err);
    };
    check(cases[0],
          [&](const Eigen::VectorXd& s) { return mse_loss_grad(s, targets); });
    check(cases[1],
          [&](const Eigen::VectorXd& s) { return ranknet_loss_grad(s, pairs); });
    check(cases[2], [&](const Eigen::VectorXd& s) {
      return listnet_loss_grad(s, targets);
    });
    check(cases[3], [&](const Eigen::VectorXd& s) {
      return listmle_loss_grad(s, order);
    });
  }
  for (const auto& c : cases) {
    bool pass = c.max_rel <= tol;
    all_pass = all_pass && pass;
    std::cout << (pass ? "PASS" : "FAIL") << " " << c.name
              << " score-gradient: max rel err " << format_double(c.max_rel)
              << " (tol " << format_double(tol) << ", " << trials
              << " trials)\n";
  }

  // Network backward against finite differences on a small fixture.
  MlpSpec spec{6, 8, 0.0};
  MlpParams params = init_params(spec, 11);
  Eigen::MatrixXd x(5, 6);
  Eigen::VectorXd y(5);
  for (int i = 0; i < 5; ++i) {
    y[i] = rng.normal();
    for (int j = 0; j < 6; ++j) x(i, j) = rng.normal();
  }
  ForwardCache cache;
  Eigen::VectorXd scores = mlp_forward(params, spec, x, false, nullptr, &cache);
  LossGrad lg = mse_loss_grad(scores, y);
  Eigen::VectorXd analytic = mlp_backward(params, spec, cache, lg.dscores);
  auto f = [&](const Eigen::VectorXd& flat) {
    MlpParams p = MlpParams::from_flat(spec, flat);
    return mse_loss_grad(mlp_forward(p, spec, x, false, nullptr), y).loss;
  };
  GradCheckReport rep = grad_check(f, params.flatten(), analytic, tol, 120, 13);
  all_pass = all_pass && rep.pass;
  std::cout << (rep.pass ? "PASS" : "FAIL")
            << " mlp backward: max rel err " << format_double(rep.max_rel_err)
            << " over " << rep.coords_checked << " coordinates\n";

  return all_pass ? 0 : 1;
}

int cmd_report(const std::string& in_dir, double vol_target) {
  std::vector<std::pair<std::string, SavedReturns>> saved;
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(in_dir))
    if (entry.is_directory() && fs::exists(entry.path() / "returns.csv"))
      dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  // Preserve the original model ordering when a run manifest is present.
  if (fs::exists(fs::path(in_dir) / "manifest.json")) {
    std::ifstream mf(fs::path(in_dir) / "manifest.json");
    json manifest = json::parse(mf, nullptr, /*allow_exceptions=*/false);
    if (manifest.is_object() && manifest.contains("config") &&
        manifest["config"].contains("models")) {
      std::vector<fs::path> ordered;
      for (const auto& name : manifest["config"]["models"]) {
        fs::path dir = fs::path(in_dir) / name.get<std::string>();
        if (std::find(dirs.begin(), dirs.end(), dir) != dirs.end())
          ordered.push_back(dir);
      }
      if (!ordered.empty()) dirs = std::move(ordered);
    }
  }
  for (const auto& dir : dirs)
    saved.emplace_back(dir.filename().string(),
                       read_returns_csv((dir / "returns.csv").string()));
  if (saved.empty())
    throw ValidationError("no returns.csv found under " + in_dir);

  std::vector<std::pair<std::string, FinancialSummary>> fin_rows;
  std::deque<BacktestResult> results;
  std::vector<std::pair<std::string, const BacktestResult*>> table_models;
  for (auto& [name, sr] : saved) {
    fin_rows.emplace_back(name, financial_summary(sr.rescaled));
    BacktestResult bt;
    bt.dates = sr.dates;
    bt.raw = sr.raw;
    bt.rescaled = sr.rescaled;
    bt.deciles_raw = sr.deciles_raw;
    for (size_t i = 0; i < sr.raw.size(); ++i)
      bt.long_short_deciles_raw.push_back(sr.deciles_raw[9][i] -
                                          sr.deciles_raw[0][i]);
    results.push_back(std::move(bt));
    table_models.emplace_back(name, &results.back());
  }
  write_metrics_csv((fs::path(in_dir) / "metrics.csv").string(), fin_rows);
  write_deciles_csv((fs::path(in_dir) / "deciles.csv").string(), table_models,
                    vol_target);
  write_cumulative_csv((fs::path(in_dir) / "cumulative.csv").string(),
                       table_models);
  std::cout << "re-rendered tables for " << saved.size() << " models in "
            << in_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cross-sectional momentum learning-to-rank backtester"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "write a synthetic price panel");
  SyntheticSpec gen_spec;
  uint64_t gen_seed = 42;
  std::string gen_out = "prices.csv";
  gen->add_option("--assets", gen_spec.n_assets, "number of assets (>= 20)");
  gen->add_option("--years", gen_spec.n_years, "panel length in years (>= 2)");
  gen->add_option("--signal", gen_spec.signal_strength,
                  "momentum signal strength in [0, 1]")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output CSV path");

  auto* bt = app.add_subcommand(
      "backtest", "walk-forward train, score and backtest the model list");
  std::string bt_config, bt_models, bt_out;
  uint64_t bt_seed = 0;
  int bt_nside = 0, bt_k = 0;
  double bt_vt = 0.0;
  auto* opt_seed = bt->add_option("--seed", bt_seed, "master seed");
  auto* opt_nside =
      bt->add_option("--n-side", bt_nside, "names per long/short side");
  auto* opt_vt =
      bt->add_option("--vol-target", bt_vt, "annualized volatility target");
  auto* opt_k = bt->add_option("--k", bt_k, "NDCG truncation depth");
  bt->add_option("--config", bt_config, "JSON config file");
  bt->add_option(
      "--models", bt_models,
      "comma list: rand,jt,baz,mlp,ranknet,lambdamart,listnet,listmle");
  bt->add_option("--out", bt_out, "output directory");

  auto* gc = app.add_subcommand(
      "gradcheck", "verify analytic gradients against finite differences");
  double gc_tol = 1e-4;
  int gc_trials = 100;
  gc->add_option("--tol", gc_tol, "max relative error tolerance");
  gc->add_option("--trials", gc_trials, "random lists per loss family");

  auto* ft = app.add_subcommand("features", "dump the predictor matrix");
  std::string ft_config, ft_out = "features.csv";
  ft->add_option("--config", ft_config, "JSON config file");
  ft->add_option("--out", ft_out, "output CSV path");

  auto* rp = app.add_subcommand("report",
                                "re-render metric tables from saved returns");
  std::string rp_in;
  double rp_vt = 0.15;
  rp->add_option("--in", rp_in, "backtest output directory")->required();
  rp->add_option("--vol-target", rp_vt, "annualized volatility target");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(gen_spec, gen_seed, gen_out);
    if (gc->parsed()) return cmd_gradcheck(gc_tol, gc_trials);
    if (rp->parsed()) return cmd_report(rp_in, rp_vt);

    RunConfig cfg;
    const std::string& config_path = bt->parsed() ? bt_config : ft_config;
    if (!config_path.empty()) cfg = RunConfig::from_json_file(config_path);
    if (bt->parsed()) {
      if (!bt_models.empty()) cfg.models = parse_models(bt_models);
      if (opt_seed->count() > 0) cfg.seed = bt_seed;
      if (!bt_out.empty()) cfg.out_dir = bt_out;
      if (opt_nside->count() > 0) cfg.n_side = bt_nside;
      if (opt_vt->count() > 0) cfg.vol_target = bt_vt;
      if (opt_k->count() > 0) cfg.ndcg_k = bt_k;
      return cmd_backtest(cfg);
    }
    return cmd_features(cfg, ft_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
