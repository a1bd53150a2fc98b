#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "evgate/config.hpp"
#include "evgate/evaluation.hpp"
#include "evgate/gating.hpp"
#include "evgate/geometry.hpp"
#include "evgate/tiling.hpp"

namespace evgate {

/// Cached detector outputs and annotations for one image.
struct ImageCase {
  std::string image_id;
  int width = 0;
  int height = 0;
  /// Grid the tile detections were produced with.
  int tile_size = 640;
  int tile_overlap = 160;
  std::vector<Detection> baseline_dets;
  /// Tile-local detections, one entry per tile in tile-index order.
  std::vector<TileDetections> tile_dets;
  std::vector<GroundTruthBox> gts;
  std::shared_ptr<const EmbeddingTable> embeddings;

  /// Checks each detection against the case layout. Throws DataError.
  void validate() const;
};

/// Stage names used as timing keys.
namespace stage {
inline constexpr const char* baseline = "baseline";
inline constexpr const char* tiling = "tiling";
inline constexpr const char* spatial = "spatial";
inline constexpr const char* semantic = "semantic";
inline constexpr const char* reweighting = "reweighting";
inline constexpr const char* fusion = "fusion";
}  // namespace stage

struct StageCounts {
  std::size_t baseline = 0;     // after tau_base
  std::size_t pooled = 0;       // after tau_tile and dedup
  std::size_t spatial = 0;      // members of spatial groups
  std::size_t semantic = 0;     // members of semantic sub-groups
  std::size_t validated = 0;    // candidates handed to fusion
  std::size_t final = 0;
};

struct PipelineResult {
  std::vector<Detection> detections;
  std::vector<Detection> validated;
  StageTimings timings;
  StageCounts counts;
};

/// Runs baseline filtering, tiling, both gates, quality reweighting and
/// CB-NMS fusion as enabled by cfg.toggles. Stages that are switched off
/// pass their input through unchanged; with tiling off no tile candidate
/// reaches fusion. `provider` may be null unless the semantic gate is on,
/// in which case a missing provider is a DataError raised before any work.
PipelineResult run_pipeline(const ImageCase& image, const Config& cfg,
                            const EmbeddingProvider* provider);

/// Uses the case's own embedding table.
PipelineResult run_pipeline(const ImageCase& image, const Config& cfg);

/// Processes every case; results are in input order for any worker count.
std::vector<PipelineResult> run_batch(const std::vector<ImageCase>& cases, const Config& cfg,
                                      std::size_t workers = 1);

/// Runs the batch and scores each image against its ground truth at IoU 0.5.
EvalReport evaluate_config(const std::vector<ImageCase>& cases, const Config& cfg,
                           std::size_t workers = 1);

struct AblationRow {
  std::string name;
  Config config;
  EvalReport report;
};

/// The cumulative ladder Baseline, +Tiling, +Spatial, +Semantic, +Reweighting.
std::vector<Config> ablation_ladder(const Config& base);
inline constexpr const char* kAblationNames[] = {"Baseline", "+Tiling", "+Spatial",
                                                 "+Semantic", "+Reweighting"};

/// Throws std::invalid_argument for an empty dataset.
std::vector<AblationRow> run_ablation(const std::vector<ImageCase>& cases, const Config& cfg,
                                      std::size_t workers = 1);

}  // namespace evgate
