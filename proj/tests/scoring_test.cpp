#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "evgate/scoring.hpp"

namespace evgate {
namespace {

constexpr ClassLabel kCar = 4;
constexpr ClassLabel kTruck = 6;

TEST(Quality, WorkedExample) {
  const std::vector<ScoredMember> m{{0.2, kCar}, {0.3, kCar}, {0.4, kTruck}};
  const auto r = assess_quality(0, m, QualityWeights{0.7, 0.3}, 0.3);
  EXPECT_NEAR(r.q_score, 0.3, 1e-12);
  EXPECT_NEAR(r.q_consistency, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.q_total, 0.41, 1e-12);
  EXPECT_EQ(r.majority_label, kCar);
  EXPECT_TRUE(r.retained);
}

TEST(Quality, UniformGroup) {
  for (double s : {0.0, 0.25, 0.6, 1.0}) {
    const std::vector<ScoredMember> m(5, ScoredMember{s, 2});
    EXPECT_NEAR(assess_quality(0, m, {}, 0.3).q_total, 0.7 * s + 0.3, 1e-12);
  }
}

TEST(Quality, Defaults) {
  EXPECT_EQ(QualityWeights{}.w1, 0.7);
  EXPECT_EQ(QualityWeights{}.w2, 0.3);
}

TEST(Quality, MajorityTieGoesToSmallerLabel) {
  const std::vector<ScoredMember> m{{0.5, 7}, {0.5, 3}};
  const auto r = assess_quality(0, m, {}, 0.3);
  EXPECT_EQ(r.majority_label, 3);
  EXPECT_EQ(r.q_consistency, 0.5);
}

TEST(Quality, EmptyGroupIsAnError) {
  EXPECT_THROW(assess_quality(0, {}, {}, 0.3), std::invalid_argument);
}

TEST(QualityProperty, ConsistencyIsOneIffLabelsAgree) {
  // Every labelling of up to 5 members over 3 labels.
  for (int n = 1; n <= 5; ++n) {
    int total = 1;
    for (int k = 0; k < n; ++k) total *= 3;
    for (int code = 0; code < total; ++code) {
      std::vector<ScoredMember> m;
      int c = code;
      bool same = true;
      for (int k = 0; k < n; ++k) {
        m.push_back({0.5, c % 3});
        same = same && (m.back().label == m.front().label);
        c /= 3;
      }
      EXPECT_EQ(assess_quality(0, m, {}, 0.3).q_consistency == 1.0, same);
    }
  }
}

TEST(QualityProperty, TotalInUnitIntervalForConvexWeights) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> lab(0, 3), size(1, 12);
  for (int trial = 0; trial < 1000; ++trial) {
    const double w1 = u(rng);
    std::vector<ScoredMember> m(static_cast<std::size_t>(size(rng)));
    for (auto& x : m) x = {u(rng), lab(rng)};
    const auto r = assess_quality(0, m, {w1, 1.0 - w1}, 0.3);
    EXPECT_GE(r.q_total, 0.0);
    EXPECT_LE(r.q_total, 1.0 + 1e-12);
    EXPECT_EQ(r.q_total, w1 * r.q_score + (1.0 - w1) * r.q_consistency);
  }
}

TEST(QualityGate, StrictThreshold) {
  std::vector<QualityReport> reports{{0, 0, 0, 0.30, 0, false}, {1, 0, 0, 0.41, 0, true},
                                     {2, 0, 0, 0.31, 0, true}};
  EXPECT_EQ(quality_gate(reports, 0.30), (std::vector<std::size_t>{1, 2}));
  EXPECT_TRUE(quality_gate({}, 0.30).empty());
}

Detection member(double score, DetectionId id) {
  return Detection{BBox{0, 0, 1, 1}, 0, score, score, Source::tile(0), id};
}

TEST(Reweight, WorkedExample) {
  std::vector<Detection> m{member(0.5, 1)};
  reweight(m, 3, 0.5, 0.1);
  EXPECT_NEAR(m[0].adjusted_score, 0.534657, 1e-6);
  EXPECT_EQ(m[0].score, 0.5);
}

TEST(Reweight, ZeroBetaIsIdentity) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Detection> m;
    for (int k = 0; k < 6; ++k) m.push_back(member(u(rng), k));
    reweight(m, static_cast<std::size_t>(1 + trial % 40), u(rng), 0.0);
    for (const auto& d : m) EXPECT_EQ(d.adjusted_score, d.score);
  }
}

TEST(ReweightProperty, BoundedAndOrderPreserving) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0, 1), b(0, 0.5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Detection> m;
    for (int k = 0; k < 8; ++k) m.push_back(member(u(rng), k));
    const std::size_t n = m.size();
    const double beta = b(rng), q = u(rng);
    reweight(m, n, q, beta);
    for (const auto& d : m) {
      EXPECT_GE(d.adjusted_score, d.score);
      EXPECT_LE(d.adjusted_score, d.score * (1.0 + beta * std::log(1.0 + double(n))) + 1e-15);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (m[i].score < m[j].score) { EXPECT_LE(m[i].adjusted_score, m[j].adjusted_score); }
  }
}

}  // namespace
}  // namespace evgate
