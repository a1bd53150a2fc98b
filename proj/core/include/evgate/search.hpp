#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "evgate/config.hpp"
#include "evgate/pipeline.hpp"

namespace evgate {

struct SearchResult {
  std::string config_id;  // "A01".."A24", "B01".."Bnn"
  Config config;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f1 = 0.0;
  double mean_time_s = 0.0;
};

/// Stage-A values and Stage-B sampling ranges. Overridable through a
/// key-value file (see parse_search_space).
struct SearchSpace {
  std::vector<double> tau_base = {0.25, 0.30};
  std::vector<double> spatial_eps_multiplier = {1.0, 1.5, 2.0};
  std::vector<double> tau_tile = {0.15, 0.20};
  std::vector<double> semantic_eps = {0.30, 0.40};

  double beta_min = 0.05, beta_max = 0.2;
  double quality_threshold_min = 0.2, quality_threshold_max = 0.4;
  double nms_iou_min = 0.45, nms_iou_max = 0.65;
  std::vector<int> semantic_min_samples = {2, 3, 4};
};

/// Keys: the four Stage-A lists (comma-separated) and the Stage-B ranges
/// named as in SearchSpace. Unknown keys throw DataError.
SearchSpace parse_search_space(std::string_view text, std::string_view origin = "<space>");

/// Cartesian product tau_base x spatial_eps_multiplier x tau_tile x
/// semantic_eps in lexicographic order (tau_base slowest); all other fields
/// are copied from `base`.
std::vector<Config> stage_a_grid(const Config& base = {}, const SearchSpace& space = {});

/// n configs around `best`: beta, quality_threshold and nms_iou uniform in
/// their ranges, semantic_min_samples uniform over its set. Seeded.
std::vector<Config> stage_b_random(std::uint64_t seed, std::size_t n, const Config& best,
                                   const SearchSpace& space = {});

/// Evaluates each config over the cases; ids are prefix + 1-based index.
std::vector<SearchResult> evaluate_configs(const std::vector<ImageCase>& cases,
                                           const std::vector<Config>& configs,
                                           const std::string& id_prefix,
                                           std::size_t workers = 1);

/// Highest mean F1, ties to higher recall, then lower config_id. Throws
/// std::invalid_argument on an empty list.
const SearchResult& best_by_f1(const std::vector<SearchResult>& results);

/// Non-dominated set in (precision, recall), sorted by recall descending.
/// Exact duplicates keep the lower config_id only.
std::vector<SearchResult> pareto_front(const std::vector<SearchResult>& results);

/// True if a is at least as good as b on both axes and better on one.
bool dominates(const SearchResult& a, const SearchResult& b) noexcept;

struct FiveNumber {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

/// Linear-interpolation quantile of sorted data (numpy's default rule).
double quantile_sorted(const std::vector<double>& sorted, double q);
FiveNumber five_number_summary(std::vector<double> values);

struct SensitivityGroup {
  double value = 0.0;
  std::size_t count = 0;
  FiveNumber f1;
};

/// F1 distribution per distinct value of a config field, ascending by value.
/// Throws DataError for an unknown field name.
std::vector<SensitivityGroup> sensitivity(const std::vector<SearchResult>& results,
                                          std::string_view param);

struct TwoStageOutcome {
  std::vector<SearchResult> stage_a;
  std::vector<SearchResult> stage_b;
  SearchResult best_a;
  std::vector<SearchResult> pareto;  // over stage_a and stage_b together
};

/// Stage-A over `subset` (all cases when empty), then Stage-B around the
/// best Stage-A config, both evaluated on the same subset.
TwoStageOutcome run_two_stage(const std::vector<ImageCase>& subset, const Config& base,
                              std::uint64_t seed, std::size_t n_stage_b,
                              const SearchSpace& space = {}, std::size_t workers = 1);

}  // namespace evgate
