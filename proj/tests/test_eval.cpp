#include <gtest/gtest.h>

#include "oracles.hpp"
#include "parsent/eval.hpp"
#include "parsent/rng.hpp"

using namespace parsent;

namespace {

const std::vector<std::string> kAbc = {"a", "b", "c"};

// 3-class fixture:      predicted a  b  c
//                 true a        5  1  0
//                      b        2  3  1
//                      c        0  1  7
ConfusionMatrix fixture_cm() {
  std::vector<std::size_t> preds, labels;
  const std::size_t counts[3][3] = {{5, 1, 0}, {2, 3, 1}, {0, 1, 7}};
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t k = 0; k < counts[t][p]; ++k) labels.push_back(t), preds.push_back(p);
  return confusion_matrix(preds, labels, kAbc);
}

}  // namespace

TEST(ConfusionMatrix, Basics) {
  const auto perfect = confusion_matrix({0, 1, 2}, {0, 1, 2}, kAbc);
  EXPECT_EQ(perfect.counts, (std::vector<std::vector<std::size_t>>{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  const auto one = confusion_matrix({0}, {1}, {"a", "b"});
  EXPECT_EQ(one.counts[1][0], 1u);
  EXPECT_EQ(one.total(), 1u);
  EXPECT_THROW(confusion_matrix({0, 1}, {0}, kAbc), LengthMismatch);
  EXPECT_THROW(confusion_matrix({}, {}, kAbc), LengthMismatch);
}

TEST(ConfusionMatrix, MatchesNaiveTally) {
  Rng rng(1);
  std::vector<std::size_t> p, l;
  for (int i = 0; i < 200; ++i) p.push_back(rng.below(3)), l.push_back(rng.below(3));
  const auto cm = confusion_matrix(p, l, kAbc);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t q = 0; q < 3; ++q) {
      std::size_t n = 0;
      for (std::size_t k = 0; k < p.size(); ++k) n += l[k] == t && p[k] == q;
      EXPECT_EQ(cm.counts[t][q], n);
    }
}

TEST(Accuracy, Fixture) {
  EXPECT_DOUBLE_EQ(accuracy(confusion_matrix({0, 1}, {0, 1}, {"a", "b"})), 1.0);
  EXPECT_DOUBLE_EQ(accuracy(confusion_matrix({1, 0}, {0, 1}, {"a", "b"})), 0.0);
  EXPECT_DOUBLE_EQ(accuracy(fixture_cm()), 15.0 / 20.0);
}

TEST(PerClass, ZeroOverZeroIsZero) {
  const auto cm = confusion_matrix({0, 0}, {0, 0}, {"a", "b"});
  const auto s = per_class_prf(cm, 1);
  EXPECT_EQ(s.precision, 0.0);
  EXPECT_EQ(s.recall, 0.0);
  EXPECT_EQ(s.f1, 0.0);
}

TEST(PerClass, EightTwoFour) {
  // TP=8, FP=2, FN=4 for class 0
  ConfusionMatrix cm{{"a", "b"}, {{8, 4}, {2, 0}}};
  const auto s = per_class_prf(cm, 0);
  EXPECT_DOUBLE_EQ(s.precision, 0.8);
  EXPECT_DOUBLE_EQ(s.recall, 2.0 / 3.0);
  EXPECT_NEAR(s.f1, 0.7273, 5e-5);
  EXPECT_DOUBLE_EQ(s.f1, 2 * 0.8 * (2.0 / 3.0) / (0.8 + 2.0 / 3.0));
}

TEST(PerClass, EqualPrecisionRecallGivesSameF1) {
  ConfusionMatrix cm{{"a", "b"}, {{3, 1}, {1, 3}}};
  const auto s = per_class_prf(cm, 0);
  EXPECT_DOUBLE_EQ(s.f1, s.precision);
}

TEST(Weighted, FixtureByHand) {
  const auto r = weighted_metrics(fixture_cm());
  // per class: a P=5/7 R=5/6; b P=3/5 R=3/6; c P=7/8 R=7/8; supports 6, 6, 8
  const double pa = 5.0 / 7, ra = 5.0 / 6, pb = 3.0 / 5, rb = 0.5, pc = 7.0 / 8, rc = 7.0 / 8;
  auto f = [](double p, double q) { return 2 * p * q / (p + q); };
  EXPECT_NEAR(r.precision, (6 * pa + 6 * pb + 8 * pc) / 20, 1e-15);
  EXPECT_NEAR(r.f1, (6 * f(pa, ra) + 6 * f(pb, rb) + 8 * f(pc, rc)) / 20, 1e-15);
  EXPECT_EQ(r.recall, r.accuracy);
  EXPECT_EQ(r.total, 20u);
}

TEST(Weighted, SingleClassAllCorrect) {
  const auto r = weighted_metrics(confusion_matrix({0, 0, 0}, {0, 0, 0}, {"only"}));
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.f1, 1.0);
}

TEST(Weighted, IdentitiesOnRandomMatrices) {
  Rng rng(77);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t c = 1 + rng.below(5), n = 1 + rng.below(60);
    std::vector<std::size_t> p, l;
    for (std::size_t i = 0; i < n; ++i) p.push_back(rng.below(c)), l.push_back(rng.below(c));
    std::vector<std::string> names;
    for (std::size_t k = 0; k < c; ++k) names.push_back("c" + std::to_string(k));
    const auto r = weighted_metrics(confusion_matrix(p, l, names));
    ASSERT_EQ(r.recall, r.accuracy);
    const auto o = oracle::brute_force_metrics(p, l, c);
    EXPECT_NEAR(r.accuracy, o.accuracy, 1e-12);
    EXPECT_NEAR(r.precision, o.precision, 1e-12);
    EXPECT_NEAR(r.f1, o.f1, 1e-12);
    for (std::size_t k = 0; k < c; ++k) {
      const auto& s = r.per_class[k];
      if (s.precision + s.recall > 0) {
        EXPECT_GE(s.f1, std::min(s.precision, s.recall) - 1e-15);
        EXPECT_LE(s.f1, std::max(s.precision, s.recall) + 1e-15);
      }
    }
  }
}

TEST(Weighted, ClassPermutationLeavesAggregatesUnchanged) {
  Rng rng(78);
  std::vector<std::size_t> p, l;
  for (int i = 0; i < 50; ++i) p.push_back(rng.below(3)), l.push_back(rng.below(3));
  const std::size_t perm[3] = {2, 0, 1};
  std::vector<std::size_t> pp, lp;
  for (std::size_t i = 0; i < p.size(); ++i) pp.push_back(perm[p[i]]), lp.push_back(perm[l[i]]);
  const auto a = weighted_metrics(confusion_matrix(p, l, kAbc));
  const auto b = weighted_metrics(confusion_matrix(pp, lp, kAbc));
  EXPECT_NEAR(a.precision, b.precision, 1e-15);
  EXPECT_NEAR(a.f1, b.f1, 1e-15);
  EXPECT_EQ(a.accuracy, b.accuracy);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(a.per_class[c].f1, b.per_class[perm[c]].f1);
}

TEST(Format, RoundHalfUp) {
  EXPECT_EQ(format_fixed(0.8915), "0.892");
  EXPECT_EQ(format_fixed(1.0), "1.000");
  EXPECT_EQ(format_fixed(0.0), "0.000");
  EXPECT_EQ(format_fixed(0.9995), "1.000");
  EXPECT_EQ(format_fixed(0.12345), "0.123");
  EXPECT_EQ(format_fixed(0.0625), "0.063");
  EXPECT_EQ(format_fixed(2.0 / 3.0), "0.667");
}

TEST(Report, TsvLayout) {
  const auto r = weighted_metrics(confusion_matrix({0, 1}, {0, 1}, {"a", "b"}));
  const auto half = weighted_metrics(confusion_matrix({0, 0}, {0, 1}, {"a", "b"}));
  const auto text = render_report({{"model", r}, {"other", half}}, ReportFormat::Tsv);
  EXPECT_EQ(text,
            "Model\tAccuracy\tPrecision\tRecall\tF1-score\n"
            "model\t1.000\t1.000\t1.000\t1.000\n"
            "other\t0.500\t0.250\t0.500\t0.333\n");
}

TEST(Report, JsonCarriesPerClassDetail) {
  const auto r = weighted_metrics(fixture_cm());
  const auto j = nlohmann::json::parse(render_report({{"m", r}}, ReportFormat::Json));
  ASSERT_EQ(j["models"].size(), 1u);
  EXPECT_EQ(j["models"][0]["model"], "m");
  EXPECT_EQ(j["models"][0]["per_class"].size(), 3u);
  EXPECT_EQ(j["models"][0]["per_class"][2]["support"], 8);
  EXPECT_DOUBLE_EQ(j["models"][0]["accuracy"].get<double>(), r.accuracy);
}

TEST(Report, EmptyAndBadFormat) {
  EXPECT_THROW(render_report({}, ReportFormat::Tsv), ConfigError);
  EXPECT_THROW(parse_report_format("xml"), ConfigError);
}
