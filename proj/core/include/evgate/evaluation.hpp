#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evgate/geometry.hpp"

namespace evgate {

struct GroundTruthBox {
  BBox box;
  ClassLabel label = 0;
  friend bool operator==(const GroundTruthBox&, const GroundTruthBox&) = default;
};

struct MatchResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  /// assignment[i] is the ground-truth index matched by preds[i], if any.
  std::vector<std::optional<std::size_t>> assignment;
};

/// Greedy, class-aware matching. Predictions are taken in ranking order
/// (adjusted_score descending, id ascending); each claims the unmatched
/// same-label ground truth of highest IoU provided IoU >= iou_min.
MatchResult match(const std::vector<Detection>& preds,
                  const std::vector<GroundTruthBox>& gts, double iou_min = 0.5);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// P = tp/(tp+fp), R = tp/(tp+fn); an empty denominator yields 1.
Prf prf(std::size_t tp, std::size_t fp, std::size_t fn) noexcept;

struct ImageMetrics {
  std::string image_id;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

ImageMetrics evaluate_image(std::string image_id, const std::vector<Detection>& preds,
                            const std::vector<GroundTruthBox>& gts, double iou_min = 0.5);

/// Per-stage wall-clock seconds for one image.
using StageTimings = std::map<std::string, double>;

struct EvalReport {
  std::vector<ImageMetrics> per_image;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f1 = 0.0;
  /// Mean seconds per image for each stage that ran.
  StageTimings stage_latency;

  double mean_total_latency() const;
};

/// Macro (per-image) means. Throws std::invalid_argument when empty.
/// `timings` may be empty; otherwise it must be parallel to `per_image`.
EvalReport aggregate(std::vector<ImageMetrics> per_image,
                     const std::vector<StageTimings>& timings = {});

/// Runs `work` and adds its wall-clock duration to timings[stage].
template <typename Work>
decltype(auto) time_stage(StageTimings& timings, const std::string& stage, Work&& work) {
  using Clock = std::chrono::steady_clock;
  struct Guard {
    StageTimings& t;
    const std::string& s;
    Clock::time_point start = Clock::now();
    ~Guard() { t[s] += std::chrono::duration<double>(Clock::now() - start).count(); }
  } guard{timings, stage};
  return std::forward<Work>(work)();
}

}  // namespace evgate
