#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evgate/config.hpp"
#include "evgate/evaluation.hpp"
#include "evgate/gating.hpp"
#include "evgate/pipeline.hpp"
#include "evgate/tiling.hpp"

namespace evgate::synth {

/// Logistic miss probability: 1 / (1 + exp(steepness * (size - size_50))).
struct MissCurve {
  double size_50 = 17.0;
  double steepness = 0.35;
};

/// Scene layout and simulated-detector behaviour. Object size is measured
/// as sqrt(w * h).
struct SceneSpec {
  std::uint64_t seed = 2025;
  int width = 1280;
  int height = 960;

  int n_rows = 5;
  int objects_per_row = 14;
  double min_object_size = 10.0;
  double max_object_size = 30.0;
  double min_gap = 2.0;  // spacing between neighbours in a row
  double max_gap = 8.0;
  int n_large_objects = 4;
  double min_large_size = 60.0;
  double max_large_size = 120.0;
  int n_classes = 5;

  /// Expected false positives per full image; tiles get the same density.
  double clutter_rate = 30.0;
  double clutter_near_fraction = 0.5;  // share spawned next to a real object
  double clutter_conf_mean = 0.20;
  double clutter_conf_sd = 0.07;

  MissCurve miss_curve;
  /// base_conf(size) = conf_low + (conf_high - conf_low) * sigmoid((size - conf_size_50) / conf_scale)
  double conf_low = 0.10;
  double conf_high = 0.92;
  double conf_size_50 = 22.0;
  double conf_scale = 5.0;
  double confidence_noise_sd = 0.08;
  double jitter_fraction = 0.05;   // box noise sd relative to box size
  double label_flip_prob = 0.03;

  double tile_miss_factor = 0.5;   // tiles halve the miss rate of contained objects
  double tile_conf_gain = 0.05;    // added to base_conf in tile mode
  double truncated_emit_prob = 0.25;  // partially visible objects at tile edges
  double min_visible_fraction = 0.4;

  /// Throws DataError when a field is out of range.
  void validate() const;
};

struct Scene {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<GroundTruthBox> objects;
};

/// Dense labelled rows plus scattered large objects. Deterministic in its
/// arguments; throws DataError when the objects cannot be packed.
Scene gen_scene(const SceneSpec& spec, std::string image_id = "scene");

/// Either the full image or one tile of it.
struct ViewMode {
  std::optional<TileOrigin> tile;  // nullopt: full image
  std::size_t tile_index = 0;
  double tile_size = 640.0;

  static ViewMode full_image() { return {}; }
  static ViewMode tiled(TileOrigin origin, std::size_t index, double size) {
    return ViewMode{origin, index, size};
  }
};

struct SimulatedDetections {
  std::vector<Detection> detections;
  /// Index of the scene object each detection came from; nullopt for clutter.
  std::vector<std::optional<std::size_t>> object_of;
};

/// Simulated detector output for one view. Tile-mode boxes are tile-local.
/// Ids are assigned consecutively from first_id.
SimulatedDetections simulate_detections(const Scene& scene, const ViewMode& mode,
                                        const SceneSpec& spec, DetectionId first_id);

/// Stand-in appearance encoder: each class owns a random unit prototype and
/// true-object detections scatter around it; clutter is isotropic.
class EmbeddingModel {
 public:
  /// `noise` is the expected norm of the perturbation added to a prototype
  /// before renormalizing (per-component sd = noise / sqrt(dimension)).
  EmbeddingModel(std::uint64_t seed, int n_classes, std::size_t dimension = 512,
                 double noise = 0.5);

  std::size_t dimension() const { return dimension_; }
  double noise() const { return noise_; }
  const std::vector<double>& prototype(ClassLabel label) const;

  /// Deterministic in (seed, detection id).
  std::vector<double> embed_object(ClassLabel label, DetectionId id) const;
  std::vector<double> embed_clutter(DetectionId id) const;

 private:
  std::uint64_t seed_;
  std::size_t dimension_;
  double noise_;
  std::vector<std::vector<double>> prototypes_;
};

struct CaseOptions {
  int tile_size = 640;
  int tile_overlap = 160;
  bool complete_coverage = true;
  std::size_t embedding_dimension = 512;
  double embedding_noise = 0.5;
};

/// A scene plus its simulated full-image and per-tile detector passes. Every
/// tile detection gets a synthetic embedding.
ImageCase make_case(const SceneSpec& spec, const std::string& image_id,
                    const CaseOptions& options = {});

struct BenchmarkSpec {
  std::uint64_t seed = 2025;
  std::size_t n_scenes = 50;
  SceneSpec scene;
  CaseOptions options;
};

/// Scene i uses seed derive_seed(seed, {i}) and id "scene_<iiii>".
std::vector<ImageCase> make_benchmark(const BenchmarkSpec& spec, std::size_t workers = 1);

/// Case options matching a pipeline config's tile grid.
CaseOptions case_options_for(const Config& cfg);

}  // namespace evgate::synth
