#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "evgate/errors.hpp"
#include "evgate/random.hpp"
#include "evgate/search.hpp"
#include "evgate/synth.hpp"

namespace evgate {
namespace {

SearchResult point(std::string id, double p, double r, double f1 = 0.0) {
  SearchResult s;
  s.config_id = std::move(id);
  s.mean_precision = p;
  s.mean_recall = r;
  s.mean_f1 = f1;
  return s;
}

TEST(StageA, GridShapeAndOrder) {
  const auto grid = stage_a_grid();
  ASSERT_EQ(grid.size(), 24u);
  EXPECT_EQ(grid[0].tau_base, 0.25);
  EXPECT_EQ(grid[0].spatial_eps_multiplier, 1.0);
  EXPECT_EQ(grid[0].tau_tile, 0.15);
  EXPECT_EQ(grid[0].semantic_eps, 0.30);
  EXPECT_EQ(grid[1].semantic_eps, 0.40);  // fastest-varying
  EXPECT_EQ(grid[12].tau_base, 0.30);     // slowest-varying
  EXPECT_EQ(grid[23].spatial_eps_multiplier, 2.0);
  std::set<std::tuple<double, double, double, double>> distinct;
  for (const auto& c : grid) {
    EXPECT_EQ(c.beta, 0.1);
    EXPECT_EQ(c.nms_iou, 0.55);
    EXPECT_EQ(c.quality_threshold, 0.30);
    distinct.emplace(c.tau_base, c.spatial_eps_multiplier, c.tau_tile, c.semantic_eps);
  }
  EXPECT_EQ(distinct.size(), 24u);
  EXPECT_EQ(stage_a_grid(), grid);
}

TEST(StageB, SeededAndWithinRanges) {
  Config best = stage_a_grid()[5];
  const auto a = stage_b_random(9, 18, best);
  ASSERT_EQ(a.size(), 18u);
  EXPECT_EQ(stage_b_random(9, 18, best), a);
  EXPECT_NE(stage_b_random(10, 18, best), a);
  std::set<int> mins;
  for (const auto& c : a) {
    EXPECT_GE(c.beta, 0.05);
    EXPECT_LE(c.beta, 0.2);
    EXPECT_GE(c.quality_threshold, 0.2);
    EXPECT_LE(c.quality_threshold, 0.4);
    EXPECT_GE(c.nms_iou, 0.45);
    EXPECT_LE(c.nms_iou, 0.65);
    EXPECT_TRUE(c.semantic_min_samples >= 2 && c.semantic_min_samples <= 4);
    mins.insert(c.semantic_min_samples);
    EXPECT_EQ(c.tau_base, best.tau_base);
    EXPECT_EQ(c.spatial_eps_multiplier, best.spatial_eps_multiplier);
    EXPECT_EQ(c.tau_tile, best.tau_tile);
    EXPECT_EQ(c.semantic_eps, best.semantic_eps);
  }
  EXPECT_GT(mins.size(), 1u);
}

TEST(SearchSpace, ParsesOverrides) {
  const auto s = parse_search_space("tau_base = 0.2, 0.3, 0.4\nbeta_max = 0.3\n");
  EXPECT_EQ(s.tau_base, (std::vector<double>{0.2, 0.3, 0.4}));
  EXPECT_EQ(s.beta_max, 0.3);
  EXPECT_EQ(stage_a_grid({}, s).size(), 36u);
  EXPECT_THROW(parse_search_space("gamma = 1"), DataError);
}

TEST(Pareto, Examples) {
  const auto single = pareto_front({point("A01", 0.5, 0.5)});
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].config_id, "A01");

  const auto front =
      pareto_front({point("A01", 0.8, 0.6), point("A02", 0.6, 0.8), point("A03", 0.5, 0.5)});
  ASSERT_EQ(front.size(), 2u);
  EXPECT_EQ(front[0].config_id, "A02");  // recall descending
  EXPECT_EQ(front[1].config_id, "A01");

  const auto dup = pareto_front({point("B02", 0.7, 0.7), point("A09", 0.7, 0.7)});
  ASSERT_EQ(dup.size(), 1u);
  EXPECT_EQ(dup[0].config_id, "A09");

  EXPECT_TRUE(pareto_front({}).empty());
}

TEST(Pareto, WeakDominanceOnOneAxis) {
  // Equal precision, higher recall dominates.
  const auto front = pareto_front({point("A01", 0.7, 0.5), point("A02", 0.7, 0.6)});
  ASSERT_EQ(front.size(), 1u);
  EXPECT_EQ(front[0].config_id, "A02");
  EXPECT_TRUE(dominates(point("x", 0.7, 0.6), point("y", 0.7, 0.5)));
  EXPECT_FALSE(dominates(point("x", 0.7, 0.6), point("y", 0.7, 0.6)));
}

TEST(ParetoProperty, MembersAreInputsAndUndominated) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SearchResult> rs;
    const auto n = rng.uniform_int(1, 25);
    for (long long i = 0; i < n; ++i) {
      // Coarse values so duplicates and ties actually occur.
      rs.push_back(point("C" + std::to_string(100 + i), double(rng.uniform_int(0, 6)) / 6,
                         double(rng.uniform_int(0, 6)) / 6));
    }
    const auto front = pareto_front(rs);
    ASSERT_FALSE(front.empty());
    for (std::size_t k = 0; k < front.size(); ++k) {
      const auto& m = front[k];
      EXPECT_TRUE(std::any_of(rs.begin(), rs.end(), [&](const SearchResult& r) {
        return r.config_id == m.config_id && r.mean_precision == m.mean_precision &&
               r.mean_recall == m.mean_recall;
      }));
      for (const auto& r : rs) EXPECT_FALSE(dominates(r, m));
      if (k + 1 < front.size()) {
        EXPECT_GE(m.mean_recall, front[k + 1].mean_recall);
      }
    }
    // Every excluded point is dominated or duplicates a kept one.
    for (const auto& r : rs) {
      const bool kept = std::any_of(front.begin(), front.end(), [&](const SearchResult& m) {
        return m.config_id == r.config_id;
      });
      if (kept) continue;
      EXPECT_TRUE(std::any_of(rs.begin(), rs.end(), [&](const SearchResult& o) {
        return dominates(o, r) || (o.mean_precision == r.mean_precision &&
                                   o.mean_recall == r.mean_recall && o.config_id < r.config_id);
      }));
    }
  }
}

TEST(BestByF1, TieBreaks) {
  const std::vector<SearchResult> rs{point("A03", 0.9, 0.5, 0.7), point("A01", 0.5, 0.9, 0.7),
                                     point("A02", 0.6, 0.9, 0.7), point("A04", 1, 1, 0.6)};
  EXPECT_EQ(best_by_f1(rs).config_id, "A01");
  EXPECT_THROW(best_by_f1({}), std::invalid_argument);
}

TEST(Quantiles, LinearInterpolation) {
  const std::vector<double> v{0.2, 0.4, 0.6, 0.8};
  EXPECT_NEAR(quantile_sorted(v, 0.5), 0.5, 1e-12);
  EXPECT_NEAR(quantile_sorted(v, 0.25), 0.35, 1e-12);
  EXPECT_NEAR(quantile_sorted(v, 0.75), 0.65, 1e-12);
  EXPECT_EQ(quantile_sorted(v, 0.0), 0.2);
  EXPECT_EQ(quantile_sorted(v, 1.0), 0.8);
  const auto f = five_number_summary({0.8, 0.2, 0.6, 0.4});
  EXPECT_EQ(f.min, 0.2);
  EXPECT_EQ(f.max, 0.8);
  EXPECT_NEAR(f.median, 0.5, 1e-12);
  const auto one = five_number_summary({0.42});
  EXPECT_EQ(one.min, 0.42);
  EXPECT_EQ(one.q1, 0.42);
  EXPECT_EQ(one.median, 0.42);
  EXPECT_EQ(one.q3, 0.42);
  EXPECT_EQ(one.max, 0.42);
}

std::vector<SearchResult> fake_stage_a() {
  std::vector<SearchResult> rs;
  const auto grid = stage_a_grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto r = point("A" + std::to_string(10 + i), 0.5, 0.5, 0.01 * double(i));
    r.config = grid[i];
    rs.push_back(r);
  }
  return rs;
}

TEST(Sensitivity, GroupsByFieldValue) {
  const auto rs = fake_stage_a();
  const auto groups = sensitivity(rs, "tau_base");
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].value, 0.25);
  EXPECT_EQ(groups[1].value, 0.30);
  EXPECT_EQ(groups[0].count + groups[1].count, rs.size());
  EXPECT_EQ(groups[0].f1.min, 0.0);
  EXPECT_NEAR(groups[1].f1.max, 0.23, 1e-12);
  EXPECT_EQ(sensitivity(rs, "spatial_eps_multiplier").size(), 3u);
  EXPECT_EQ(sensitivity(rs, "beta").size(), 1u);
  EXPECT_THROW(sensitivity(rs, "not_a_field"), DataError);
}

TEST(SensitivityProperty, GroupSizesSumToInput) {
  const auto rs = fake_stage_a();
  for (const auto& name : config_field_names()) {
    std::size_t total = 0;
    for (const auto& g : sensitivity(rs, name)) total += g.count;
    EXPECT_EQ(total, rs.size()) << name;
  }
}

TEST(TwoStage, RunsOnSmallSubset) {
  synth::BenchmarkSpec spec;
  spec.seed = 77;
  spec.n_scenes = 2;
  const auto cases = synth::make_benchmark(spec);
  const auto out = run_two_stage(cases, Config{}, 3, 4);
  ASSERT_EQ(out.stage_a.size(), 24u);
  ASSERT_EQ(out.stage_b.size(), 4u);
  EXPECT_EQ(out.stage_a.front().config_id, "A01");
  EXPECT_EQ(out.stage_a.back().config_id, "A24");
  EXPECT_EQ(out.stage_b.front().config_id, "B01");
  EXPECT_EQ(out.best_a.config_id, best_by_f1(out.stage_a).config_id);
  EXPECT_FALSE(out.pareto.empty());
  for (const auto& r : out.stage_a) {
    EXPECT_GE(r.mean_time_s, 0.0);
    EXPECT_TRUE(r.mean_f1 >= 0.0 && r.mean_f1 <= 1.0);
  }
  for (const auto& r : out.stage_b) {
    EXPECT_EQ(r.config.tau_base, out.best_a.config.tau_base);
    EXPECT_EQ(r.config.semantic_eps, out.best_a.config.semantic_eps);
  }
  const auto again = run_two_stage(cases, Config{}, 3, 4, {}, 2);
  for (std::size_t i = 0; i < out.stage_b.size(); ++i) {
    EXPECT_EQ(again.stage_b[i].config, out.stage_b[i].config);
    EXPECT_EQ(again.stage_b[i].mean_f1, out.stage_b[i].mean_f1);
  }
}

}  // namespace
}  // namespace evgate
