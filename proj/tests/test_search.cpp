#include <gtest/gtest.h>

#include <map>
#include <set>

#include "oracles.hpp"
#include "parsent/search.hpp"
#include "search_fixtures.hpp"

using namespace parsent;

namespace {

std::vector<std::size_t> class_labels(std::initializer_list<std::pair<std::size_t, std::size_t>> sizes) {
  std::vector<std::size_t> labels;
  for (auto [c, n] : sizes)
    for (std::size_t i = 0; i < n; ++i) labels.push_back(c);
  return labels;
}

void expect_partition(const SplitIndices& s, std::size_t n) {
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  for (auto i : s.test) EXPECT_TRUE(all.insert(i).second) << "index in both halves: " << i;
  EXPECT_EQ(all.size(), n);
  EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
  EXPECT_TRUE(std::is_sorted(s.test.begin(), s.test.end()));
}

using Cfg = neural::TrainConfig;

GreedyResult run_table(const SearchGrid& grid, std::function<double(const Cfg&)> score,
                       std::size_t* calls = nullptr) {
  std::function<Cfg(const Cfg&)> train = [calls](const Cfg& c) {
    if (calls) ++*calls;
    return c;
  };
  std::function<double(const Cfg&)> eval = std::move(score);
  return greedy_search<Cfg>(grid, train, eval);
}

}  // namespace

TEST(Split, FloorRule) {
  const auto s = split(std::vector<std::size_t>(10, 0), 1, {0.7, false, 1});
  EXPECT_EQ(s.train.size(), 7u);
  EXPECT_EQ(s.test.size(), 3u);
  expect_partition(s, 10);
}

TEST(Split, Deterministic) {
  const auto labels = class_labels({{0, 30}, {1, 20}});
  EXPECT_EQ(split(labels, 2, {0.7, true, 5}).train, split(labels, 2, {0.7, true, 5}).train);
  EXPECT_NE(split(labels, 2, {0.7, true, 5}).train, split(labels, 2, {0.7, true, 6}).train);
}

TEST(Split, StratifiedProportions) {
  const auto labels = class_labels({{0, 60}, {1, 30}, {2, 10}});
  const auto s = split(labels, 3, {0.7, true, 3});
  std::map<std::size_t, std::size_t> per_class;
  for (auto i : s.train) ++per_class[labels[i]];
  EXPECT_EQ(per_class[0], 42u);
  EXPECT_EQ(per_class[1], 21u);
  EXPECT_EQ(per_class[2], 7u);
  expect_partition(s, 100);
}

TEST(Split, StratifiedRemaindersKeepOverallFloor) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const std::size_t c = 1 + rng.below(4);
    std::vector<std::size_t> labels;
    for (std::size_t k = 0; k < c; ++k)
      for (std::uint64_t i = 0, n = 1 + rng.below(20); i < n; ++i) labels.push_back(k);
    const auto s = split(labels, c, {0.7, true, rng.below(100)});
    EXPECT_EQ(s.train.size(), static_cast<std::size_t>(std::floor(labels.size() * 0.7 + 1e-9)));
    expect_partition(s, labels.size());
    for (std::size_t k = 0; k < c; ++k) {
      const double size = static_cast<double>(std::count(labels.begin(), labels.end(), k));
      const double got = static_cast<double>(std::count_if(s.train.begin(), s.train.end(), [&](auto i) { return labels[i] == k; }));
      EXPECT_LE(std::abs(got - 0.7 * size), 1.0);
    }
  }
}

TEST(Split, AbsentClassIsEmptyClassError) {
  EXPECT_THROW(split({0, 0, 2}, 3, {0.7, true, 1}), EmptyClass);
  EXPECT_NO_THROW(split({0, 0, 2}, 3, {0.7, false, 1}));
  EXPECT_THROW(split({0, 1}, 2, {1.0, true, 1}), ConfigError);
}

TEST(CarveValidation, NinetyTen) {
  std::vector<std::size_t> rows(100), labels(200, 0);
  for (std::size_t i = 0; i < 100; ++i) rows[i] = 2 * i;
  const auto s = carve_validation(rows, labels, 1, 0.1, 9);
  EXPECT_EQ(s.train.size(), 90u);
  EXPECT_EQ(s.test.size(), 10u);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  EXPECT_EQ(all, std::set<std::size_t>(rows.begin(), rows.end()));
  EXPECT_EQ(carve_validation(rows, labels, 1, 0.1, 9).test, s.test);
  EXPECT_THROW(carve_validation(rows, labels, 1, 0.0, 9), ConfigError);
}

TEST(Greedy, ConstantScoreReturnsFirstValues) {
  const SearchGrid grid;
  std::size_t calls = 0;
  const auto r = run_table(grid, [](const Cfg&) { return 1.0; }, &calls);
  EXPECT_EQ(r.best, grid.at({0, 0, 0, 0, 0}));
  EXPECT_EQ(r.passes, 1u);
  EXPECT_TRUE(r.converged);
  // 6 + 5 + 5 + 0 + 1 new points in the single pass
  EXPECT_EQ(calls, 17u);
  EXPECT_EQ(r.trace.size(), calls);
}

TEST(Greedy, SeparableScoreFindsPerAxisArgmax) {
  const std::vector<double> be = {0, 1, 5, 2, 0, 0}, bb = {0, 0, 0, 0, 3, 1}, bl = {0, 0, 0, 0, 0, 7};
  const SearchGrid grid;
  const auto r = greedy_search_indices(grid.axis_sizes(), [&](const GridPoint& p) {
    return be[p[0]] + bb[p[1]] + bl[p[2]] + (p[4] == 1 ? 0.5 : 0.0);
  });
  EXPECT_EQ(r.best, (GridPoint{2, 4, 5, 0, 1}));
}

TEST(Greedy, NonSeparableTwoByTwoStopsAtLocalOptimum) {
  // start (0,0)=2; (1,0)=1; (0,1)=1; (1,1)=3 is the global optimum but
  // needs a two-axis move.
  const std::map<GridPoint, double> table = {{{0, 0}, 2}, {{1, 0}, 1}, {{0, 1}, 1}, {{1, 1}, 3}};
  const auto r = greedy_search_indices({2, 2}, [&](const GridPoint& p) { return table.at(p); });
  EXPECT_EQ(r.best, (GridPoint{0, 0}));
  double global = 0;
  for (const auto& [p, s] : table) global = std::max(global, s);
  EXPECT_LT(r.best_score, global);
  EXPECT_TRUE(oracle::single_axis_locally_optimal(r.best, {2, 2}, [&](const GridPoint& p) { return table.at(p); }));
  // Trace holds every neighbour of the result.
  std::set<GridPoint> seen;
  for (const auto& s : r.trace) seen.insert(s.point);
  EXPECT_TRUE(seen.contains({1, 0}) && seen.contains({0, 1}));
}

TEST(Greedy, TiesPreferEarlierValue) {
  const auto r = greedy_search_indices({4}, [](const GridPoint& p) { return p[0] == 0 ? 0.0 : 1.0; });
  EXPECT_EQ(r.best, GridPoint{1});
}

TEST(Greedy, SmoothTablesAreLocallyOptimalWithinBudget) {
  const SearchGrid grid;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    fixtures::SmoothTable table(seed, grid.axis_sizes());
    std::size_t calls = 0;
    const auto r = greedy_search_indices(grid.axis_sizes(), [&](const GridPoint& p) {
      ++calls;
      return table(p);
    });
    EXPECT_LE(calls, 3u * (6 + 6 + 6 + 1 + 2));
    if (r.converged) {
      EXPECT_TRUE(oracle::single_axis_locally_optimal(r.best, grid.axis_sizes(), table)) << seed;
    }
  }
}

TEST(Greedy, ReferenceFavouringScoreYieldsReferenceConfig) {
  const SearchGrid grid;
  std::size_t calls = 0;
  const auto r = run_table(grid, fixtures::reference_score, &calls);
  EXPECT_EQ(r.best.epochs, 10u);
  EXPECT_EQ(r.best.batch_size, 64u);
  EXPECT_EQ(r.best.learning_rate, 0.0001);
  EXPECT_EQ(r.best.loss, neural::Loss::CategoricalCrossEntropy);
  EXPECT_EQ(r.best.optimizer, neural::Optimizer::Adam);
  EXPECT_LE(calls, 63u);
}

TEST(Greedy, CustomAxisOrderAndErrors) {
  const auto r = greedy_search_indices({3, 3}, [](const GridPoint& p) { return double(p[0] + p[1]); }, {1, 0});
  EXPECT_EQ(r.best, (GridPoint{2, 2}));
  EXPECT_EQ(r.trace.front().axis, 1u);
  EXPECT_THROW(greedy_search_indices({3, 0}, [](const GridPoint&) { return 0.0; }), ConfigError);
  EXPECT_THROW(greedy_search_indices({3}, [](const GridPoint&) { return 0.0; }, {4}), ConfigError);
}

TEST(Grid, ValuesAndTraceJson) {
  const SearchGrid grid;
  EXPECT_EQ(grid.epochs, (std::vector<std::size_t>{5, 10, 20, 30, 50, 100}));
  EXPECT_EQ(grid.batch_size, (std::vector<std::size_t>{2, 4, 8, 16, 32, 64}));
  EXPECT_EQ(grid.learning_rate, (std::vector<double>{0.1, 0.01, 0.001, 0.0001, 0.00001, 0.000001}));
  EXPECT_EQ(grid.axis_sizes(), (std::vector<std::size_t>{6, 6, 6, 1, 2}));
  const auto r = run_table(grid, fixtures::reference_score);
  const auto j = trace_to_json(r);
  ASSERT_EQ(j.size(), r.trace.size());
  EXPECT_TRUE(j[0].contains("config"));
  EXPECT_EQ(j[0]["axis"], "epochs");
  EXPECT_EQ(j[0]["pass"], 1);
}
