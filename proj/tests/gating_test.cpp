#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "evgate/dbscan.hpp"
#include "evgate/gating.hpp"
#include "support/oracles.hpp"

namespace evgate {
namespace {

Detection box_at(double cx, double cy, double side, DetectionId id) {
  return Detection{BBox{cx - side / 2, cy - side / 2, cx + side / 2, cy + side / 2}, 0, 0.5, 0.5,
                   Source::tile(0), id};
}

TEST(AdaptiveEps, Examples) {
  std::vector<Detection> pool(4, Detection{BBox{0, 0, 3, 4}, 0, .5, .5, {}, 0});
  EXPECT_DOUBLE_EQ(*adaptive_spatial_eps(pool, 1.5), 7.5);
  EXPECT_NEAR(*adaptive_spatial_eps({Detection{BBox{0, 0, 2, 2}, 0, .5, .5, {}, 0}}, 1.0),
              2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_FALSE(adaptive_spatial_eps({}, 1.5).has_value());
}

TEST(SpatialGate, CoincidentBoxesFormAGroup) {
  const auto groups = spatial_gate({box_at(5, 5, 2, 1), box_at(5, 5, 3, 2), box_at(5, 5, 4, 3)},
                                   1.0, 3);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].member_ids, (std::vector<DetectionId>{1, 2, 3}));
  EXPECT_EQ(groups[0].stage, GroupStage::spatial);
}

TEST(SpatialGate, TwoBoxesCannotReachFloor) {
  EXPECT_TRUE(spatial_gate({box_at(5, 5, 2, 1), box_at(6, 5, 2, 2)}, 5.0, 3).empty());
  EXPECT_TRUE(spatial_gate({}, 5.0, 3).empty());
}

TEST(SpatialGate, KnotAndOutlier) {
  std::vector<Detection> pool{box_at(10, 10, 4, 1), box_at(11, 10, 4, 2), box_at(10, 11, 4, 3),
                              box_at(11, 11, 4, 4), box_at(10.5, 10.5, 4, 5),
                              box_at(200, 200, 4, 6)};
  const auto groups = spatial_gate(pool, 3.0, 3);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].member_ids, (std::vector<DetectionId>{1, 2, 3, 4, 5}));

  std::vector<std::vector<double>> centres;
  for (const auto& d : pool) centres.push_back({centroid(d.box).x, centroid(d.box).y});
  EXPECT_EQ(oracle::reference_dbscan(centres, oracle::RefMetric::euclidean, 3.0, 3),
            (std::vector<int>{0, 0, 0, 0, 0, -1}));
}

TEST(NormalizeEmbedding, Examples) {
  const auto v = normalize_embedding({3, 4});
  EXPECT_DOUBLE_EQ(v[0], 0.6);
  EXPECT_DOUBLE_EQ(v[1], 0.8);
  EXPECT_EQ(normalize_embedding({0, 1, 0}), (std::vector<double>{0, 1, 0}));
  EXPECT_THROW(normalize_embedding({0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(normalize_embedding({}), std::invalid_argument);
}

TEST(EmbeddingTable, NormalizesAndChecksDimension) {
  EmbeddingTable t(2);
  t.insert(1, {3, 4});
  EXPECT_DOUBLE_EQ((*t.find(1))[1], 0.8);
  EXPECT_EQ(t.find(2), nullptr);
  EXPECT_THROW(t.insert(2, {1, 2, 3}), std::invalid_argument);
}

Group group_of(std::vector<DetectionId> ids) { return Group{std::move(ids), GroupStage::spatial, {}}; }

TEST(SemanticGate, SharedEmbeddingKeepsWholeGroup) {
  EmbeddingTable t(3);
  for (DetectionId id = 1; id <= 4; ++id) t.insert(id, {1, 1, 0});
  const auto sub = semantic_gate(group_of({1, 2, 3, 4}), 7, t, 0.35, 3);
  ASSERT_EQ(sub.size(), 1u);
  EXPECT_EQ(sub[0].member_ids, (std::vector<DetectionId>{1, 2, 3, 4}));
  EXPECT_EQ(sub[0].stage, GroupStage::semantic);
  EXPECT_EQ(sub[0].parent, 7u);
}

TEST(SemanticGate, OrthogonalEmbeddingsAreNoise) {
  EmbeddingTable t(3);
  t.insert(1, {1, 0, 0});
  t.insert(2, {0, 1, 0});
  t.insert(3, {0, 0, 1});
  EXPECT_TRUE(semantic_gate(group_of({1, 2, 3}), 0, t, 0.35, 3).empty());
}

TEST(SemanticGate, SplitsMixedGroup) {
  EmbeddingTable t(2);
  for (DetectionId id : {1, 3, 5}) t.insert(id, {1, 0.05 * static_cast<double>(id)});
  for (DetectionId id : {2, 4, 6}) t.insert(id, {-0.05 * static_cast<double>(id), 1});
  t.insert(7, {-1, -1});
  const auto sub = semantic_gate(group_of({1, 2, 3, 4, 5, 6, 7}), 0, t, 0.35, 3);
  ASSERT_EQ(sub.size(), 2u);
  EXPECT_EQ(sub[0].member_ids, (std::vector<DetectionId>{1, 3, 5}));
  EXPECT_EQ(sub[1].member_ids, (std::vector<DetectionId>{2, 4, 6}));
}

TEST(SemanticGate, MissingEmbeddingNamesDetection) {
  EmbeddingTable t(2);
  t.insert(1, {1, 0});
  try {
    semantic_gate(group_of({1, 42}), 0, t, 0.35, 3);
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("42"), std::string::npos);
  }
}

TEST(SemanticGate, ExactFloorGroupMayVanish) {
  EmbeddingTable t(2);
  t.insert(1, {1, 0});
  t.insert(2, {1, 0});
  t.insert(3, {0, 1});
  EXPECT_TRUE(semantic_gate(group_of({1, 2, 3}), 0, t, 0.35, 3).empty());
}

class GatingProperty : public ::testing::Test {
 protected:
  std::vector<Detection> random_pool(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> pos(0, 200), side(4, 20);
    std::vector<Detection> pool;
    for (std::size_t i = 0; i < n; ++i) {
      // Half the boxes cluster around a few hot spots.
      double cx = pos(rng), cy = pos(rng);
      if (i % 2 == 0) {
        cx = 50.0 * static_cast<double>(1 + i % 3) + side(rng) / 4;
        cy = 60.0 + side(rng) / 4;
      }
      pool.push_back(box_at(cx, cy, side(rng), static_cast<DetectionId>(i + 1)));
    }
    return pool;
  }
};

TEST_F(GatingProperty, SpatialGroupsPartitionThePool) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pool = random_pool(rng, 60);
    const auto groups = spatial_gate(pool, *adaptive_spatial_eps(pool, 1.5), 3);
    std::set<DetectionId> seen;
    for (const auto& g : groups) {
      EXPECT_GE(g.member_ids.size(), 3u);
      for (auto id : g.member_ids) EXPECT_TRUE(seen.insert(id).second);
    }
  }
}

TEST_F(GatingProperty, ScaleEquivariantWithAdaptiveEps) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pool = random_pool(rng, 50);
    auto scaled = pool;
    for (auto& d : scaled) d.box = d.box.scaled(4.0);
    const auto a = spatial_gate(pool, *adaptive_spatial_eps(pool, 1.5), 3);
    const auto b = spatial_gate(scaled, *adaptive_spatial_eps(scaled, 1.5), 3);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].member_ids, b[k].member_ids);
  }
}

TEST_F(GatingProperty, SemanticRotationInvariantAndSubset) {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> noise(0, 0.15);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t dim = 8;
    const auto proto_a = oracle::random_unit(rng, dim);
    const auto proto_b = oracle::random_unit(rng, dim);
    Group g;
    EmbeddingTable table(dim), rotated(dim);
    // Random rotation in the plane of coordinates (0, 1) followed by a swap of axes 2 and 3.
    const double theta = std::uniform_real_distribution<double>(0, 6.28)(rng);
    for (DetectionId id = 1; id <= 20; ++id) {
      auto v = (id % 3 == 0) ? oracle::random_unit(rng, dim) : (id % 2 ? proto_a : proto_b);
      for (auto& x : v) x += noise(rng);
      table.insert(id, v);
      auto r = *table.find(id);
      const double x0 = r[0], x1 = r[1];
      r[0] = std::cos(theta) * x0 - std::sin(theta) * x1;
      r[1] = std::sin(theta) * x0 + std::cos(theta) * x1;
      std::swap(r[2], r[3]);
      rotated.insert(id, r);
      g.member_ids.push_back(id);
    }
    const auto a = semantic_gate(g, 0, table, 0.35, 3);
    const auto b = semantic_gate(g, 0, rotated, 0.35, 3);
    ASSERT_EQ(a.size(), b.size());
    std::set<DetectionId> parent(g.member_ids.begin(), g.member_ids.end()), seen;
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a[k].member_ids, b[k].member_ids);
      for (auto id : a[k].member_ids) {
        EXPECT_TRUE(parent.count(id));
        EXPECT_TRUE(seen.insert(id).second);
      }
    }
  }
}

}  // namespace
}  // namespace evgate
