#include <algorithm>
#include <cmath>

#include "csm/common.hpp"
#include "csm/labeling.hpp"
#include "csm/pipeline.hpp"
#include "csm/rng.hpp"
#include "doctest.h"

using namespace csm;

namespace {

PricePanel one_asset(const std::vector<double>& prices) {
  std::vector<PriceRecord> records;
  Date d = Date::parse("2000-01-03");
  for (double p : prices) {
    records.push_back({d, "A", p});
    d = d.next_weekday();
  }
  return make_panel(std::move(records));
}

}  // namespace

TEST_CASE("forward_target basics") {
  // Noisy history then exactly flat forward window: target 0.
  Rng rng(1, "fwd");
  std::vector<double> prices{100.0};
  for (int i = 0; i < 60; ++i)
    prices.push_back(prices.back() * (1.0 + 0.01 * rng.normal()));
  double level = prices.back();
  for (int i = 0; i < 21; ++i) prices.push_back(level);
  PricePanel p = one_asset(prices);
  VolEstimate vol = ewm_volatility(daily_returns(p));
  CHECK(forward_target(p, vol, 0, 60) == doctest::Approx(0.0));

  // Forward return 0.05 against monthly-scale sigma 0.05 -> 1.0.
  std::vector<double> p2(61, 100.0);
  for (int i = 0; i < 21; ++i) p2.push_back(i + 1 == 21 ? 105.0 : 100.0);
  PricePanel q = one_asset(p2);
  VolEstimate hand;
  double sigma_daily = 0.05 / std::sqrt(21.0);
  hand.annualized = Eigen::MatrixXd::Constant(q.n_dates(), 1,
                                              sigma_daily * std::sqrt(252.0));
  CHECK(forward_target(q, hand, 0, 60) == doctest::Approx(1.0).epsilon(1e-12));

  // Horizon past the end of the data: missing.
  CHECK(is_missing(forward_target(q, hand, 0, q.n_dates() - 1)));
}

TEST_CASE("decile_grades splits evenly and honors the floor rule") {
  std::vector<double> targets;
  std::vector<int> ids;
  for (int i = 0; i < 20; ++i) {
    targets.push_back(static_cast<double>(i));
    ids.push_back(i);
  }
  auto grades = decile_grades(targets, ids);
  std::array<int, 10> counts{};
  for (int g : grades) ++counts[g];
  for (int c : counts) CHECK(c == 2);
  // Highest target gets grade 9.
  CHECK(grades[19] == 9);
  CHECK(grades[0] == 0);
}

TEST_CASE("decile_grades N=25 count pattern from the floor rule") {
  std::vector<double> targets;
  std::vector<int> ids;
  for (int i = 0; i < 25; ++i) {
    targets.push_back(i * 0.1);
    ids.push_back(i);
  }
  auto grades = decile_grades(targets, ids);
  std::array<int, 10> counts{};
  for (int g : grades) ++counts[g];
  std::array<int, 10> expected{3, 2, 3, 2, 3, 2, 3, 2, 3, 2};
  for (int g = 0; g < 10; ++g) CHECK(counts[g] == expected[g]);
}

TEST_CASE("decile_grades requires ten valid targets") {
  std::vector<double> targets(9, 1.0);
  std::vector<int> ids(9, 0);
  CHECK(decile_grades(targets, ids).empty());

  std::vector<double> with_nan(15, 1.5);
  std::vector<int> ids2(15);
  for (int i = 0; i < 15; ++i) ids2[i] = i;
  for (int i = 0; i < 6; ++i) with_nan[i] = kMissing;
  CHECK(decile_grades(with_nan, ids2).empty());  // only 9 valid
}

TEST_CASE("decile_grades invariance under increasing transforms and order") {
  Rng rng(17, "grades");
  std::vector<double> targets;
  std::vector<int> ids;
  for (int i = 0; i < 37; ++i) {
    targets.push_back(rng.normal());
    ids.push_back(100 + i);
  }
  auto base = decile_grades(targets, ids);

  // Strictly increasing transform preserves every grade.
  std::vector<double> transformed;
  for (double t : targets) transformed.push_back(std::exp(t) + 3.0 * t);
  CHECK(decile_grades(transformed, ids) == base);

  // Permuting rows permutes grades identically (asset-id tie rule).
  std::vector<int> perm(37);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  std::vector<double> shuffled_t(37);
  std::vector<int> shuffled_ids(37);
  for (int i = 0; i < 37; ++i) {
    shuffled_t[i] = targets[perm[i]];
    shuffled_ids[i] = ids[perm[i]];
  }
  auto shuffled = decile_grades(shuffled_t, shuffled_ids);
  for (int i = 0; i < 37; ++i) CHECK(shuffled[i] == base[perm[i]]);
}

TEST_CASE("decile_grades ties break by ascending asset id") {
  std::vector<double> targets(20, 7.0);  // all tied
  std::vector<int> ids;
  for (int i = 0; i < 20; ++i) ids.push_back(1000 - i);  // descending ids
  auto grades = decile_grades(targets, ids);
  // Lowest asset id (last row) ranks first -> grade 0; highest id -> grade 9.
  CHECK(grades[19] == 0);
  CHECK(grades[0] == 9);
}

TEST_CASE("build_dataset shapes, ordering and minimum group size") {
  PanelBundle bundle = PanelBundle::build(synthetic_panel(100, 5, 0.5, 7));
  // Use the last 24 groups that can still see a forward window.
  std::vector<FeatureGroup> groups;
  for (const auto& fg : bundle.std_features)
    if (fg.size() > 0) groups.push_back(fg);
  REQUIRE(groups.size() > 24);
  groups.erase(groups.begin(),
               groups.begin() + static_cast<long>(groups.size()) - 24);
  RankingDataset ds = build_dataset(bundle.panel, bundle.vol, groups);
  CHECK(ds.size() <= 24);
  CHECK(ds.size() >= 20);  // the tail group loses its forward window
  for (const auto& g : ds.groups) {
    CHECK(g.size() <= 100);
    CHECK(g.size() >= 10);
    CHECK(*std::min_element(g.grades.begin(), g.grades.end()) == 0);
    CHECK(*std::max_element(g.grades.begin(), g.grades.end()) == 9);
  }
  for (int i = 1; i < ds.size(); ++i)
    CHECK(ds.groups[i - 1].rebalance_row < ds.groups[i].rebalance_row);
}

TEST_CASE("features never depend on prices after their rebalance") {
  PricePanel panel = synthetic_panel(30, 4, 0.8, 3);
  PanelBundle bundle = PanelBundle::build(panel);
  int pos = bundle.n_rebalances() - 3;
  const FeatureGroup& before = bundle.raw_features[pos];
  REQUIRE(before.size() > 0);
  int row = bundle.calendar.indices[pos];

  // Perturb every price strictly after the rebalance row and rebuild.
  Rng rng(5, "perturb");
  for (int t = row + 1; t < panel.n_dates(); ++t)
    for (int a = 0; a < panel.n_assets(); ++a)
      if (!is_missing(panel.close(t, a)))
        panel.close(t, a) *= 1.0 + 0.2 * rng.uniform();
  PanelBundle perturbed = PanelBundle::build(panel);
  const FeatureGroup& after = perturbed.raw_features[pos];

  REQUIRE(before.size() == after.size());
  CHECK(before.assets == after.assets);
  CHECK((before.X - after.X).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("build_dataset throws when nothing survives") {
  PanelBundle bundle = PanelBundle::build(synthetic_panel(30, 4, 0.5, 9));
  std::vector<FeatureGroup> empty_groups;
  empty_groups.push_back(bundle.std_features[0]);  // warm-up group, size 0
  CHECK_THROWS_AS(build_dataset(bundle.panel, bundle.vol, empty_groups),
                  ValidationError);
}
