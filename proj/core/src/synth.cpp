#include "evgate/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "evgate/errors.hpp"
#include "evgate/parallel.hpp"
#include "evgate/random.hpp"

namespace evgate::synth {
namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kSceneStream = 0x5343454e45ULL;
constexpr std::uint64_t kDetectStream = 0x444554ULL;
constexpr std::uint64_t kPrototypeStream = 0x50524f544fULL;
constexpr std::uint64_t kEmbedStream = 0x454d42ULL;
constexpr std::uint64_t kModelStream = 0x4d4f44454cULL;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double miss_probability(const MissCurve& c, double size) {
  return 1.0 / (1.0 + std::exp(c.steepness * (size - c.size_50)));
}

double base_conf(const SceneSpec& s, double size) {
  return s.conf_low + (s.conf_high - s.conf_low) * sigmoid((size - s.conf_size_50) / s.conf_scale);
}

bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }

BBox clip(const BBox& b, const BBox& view) {
  return BBox{std::max(b.x1, view.x1), std::max(b.y1, view.y1), std::min(b.x2, view.x2),
              std::min(b.y2, view.y2)};
}

bool separated(const BBox& a, const BBox& b, double gap) {
  return a.x2 + gap <= b.x1 || b.x2 + gap <= a.x1 || a.y2 + gap <= b.y1 || b.y2 + gap <= a.y1;
}

std::vector<double> unit_gaussian(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (auto& x : v) x = rng.normal();
  return normalize_embedding(v);
}

}  // namespace

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0) throw DataError("scene dimensions must be positive");
  if (n_rows < 0 || objects_per_row < 0 || n_large_objects < 0) {
    throw DataError("scene object counts must be non-negative");
  }
  if (n_classes < 1) throw DataError("scene needs at least one class");
  if (!(min_object_size > 0.0 && min_object_size <= max_object_size) ||
      !(min_large_size > 0.0 && min_large_size <= max_large_size)) {
    throw DataError("object size ranges must be positive and ordered");
  }
  if (!(min_gap >= 0.0 && min_gap <= max_gap)) throw DataError("row gaps must be ordered and >= 0");
  if (!(clutter_rate >= 0.0) || !(clutter_conf_sd >= 0.0) || !(confidence_noise_sd >= 0.0) ||
      !(jitter_fraction >= 0.0) || !(conf_scale > 0.0)) {
    throw DataError("scene rates and noise levels must be non-negative");
  }
  for (double p : {clutter_near_fraction, label_flip_prob, tile_miss_factor,
                   truncated_emit_prob, min_visible_fraction, conf_low, conf_high}) {
    if (!in_unit(p)) throw DataError("scene probabilities must lie in [0,1]");
  }
}

Scene gen_scene(const SceneSpec& spec, std::string image_id) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, {kSceneStream}));
  Scene scene{std::move(image_id), spec.width, spec.height, {}};

  if (spec.n_rows > 0 && spec.objects_per_row > 0) {
    const double slot = static_cast<double>(spec.height) / spec.n_rows;
    if (spec.max_object_size > slot) {
      throw DataError(fmt::format("cannot pack {} rows of {} px objects into height {}",
                                  spec.n_rows, spec.max_object_size, spec.height));
    }
    for (int r = 0; r < spec.n_rows; ++r) {
      const auto label = static_cast<ClassLabel>(rng.uniform_int(0, spec.n_classes - 1));
      std::vector<double> ws, hs, gaps;
      double length = 0.0;
      for (int k = 0; k < spec.objects_per_row; ++k) {
        ws.push_back(rng.uniform(spec.min_object_size, spec.max_object_size));
        hs.push_back(rng.uniform(spec.min_object_size, spec.max_object_size));
        length += ws.back();
        if (k + 1 < spec.objects_per_row) {
          gaps.push_back(rng.uniform(spec.min_gap, spec.max_gap));
          length += gaps.back();
        }
      }
      if (length > spec.width) {
        throw DataError(fmt::format("row of {} objects needs {:.1f} px but the image is {} px wide",
                                    spec.objects_per_row, length, spec.width));
      }
      double x = rng.uniform(0.0, spec.width - length);
      const double yc = r * slot + spec.max_object_size / 2.0 +
                        rng.uniform(0.0, slot - spec.max_object_size);
      for (int k = 0; k < spec.objects_per_row; ++k) {
        scene.objects.push_back(
            GroundTruthBox{BBox{x, yc - hs[k] / 2.0, x + ws[k], yc + hs[k] / 2.0}, label});
        x += ws[k] + (k + 1 < spec.objects_per_row ? gaps[k] : 0.0);
      }
    }
  }

  for (int k = 0; k < spec.n_large_objects; ++k) {
    const double w = rng.uniform(spec.min_large_size, spec.max_large_size);
    const double h = w * rng.uniform(0.6, 1.0);
    const auto label = static_cast<ClassLabel>(rng.uniform_int(0, spec.n_classes - 1));
    if (w > spec.width || h > spec.height) {
      throw DataError("large object does not fit in the image");
    }
    bool placed = false;
    for (int attempt = 0; attempt < 2000 && !placed; ++attempt) {
      const double x = rng.uniform(0.0, spec.width - w);
      const double y = rng.uniform(0.0, spec.height - h);
      const BBox b{x, y, x + w, y + h};
      const bool free = std::all_of(scene.objects.begin(), scene.objects.end(),
                                    [&](const GroundTruthBox& o) {
                                      return separated(o.box, b, spec.min_gap);
                                    });
      if (free) {
        scene.objects.push_back(GroundTruthBox{b, label});
        placed = true;
      }
    }
    if (!placed) {
      throw DataError(fmt::format("could not place large object {} without overlap", k));
    }
  }

  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    for (std::size_t j = i + 1; j < scene.objects.size(); ++j) {
      const auto& a = scene.objects[i];
      const auto& b = scene.objects[j];
      if (a.label == b.label && iou(a.box, b.box) > 0.3) {
        throw DataError("generated scene violates the ground-truth separation invariant");
      }
    }
  }
  return scene;
}

SimulatedDetections simulate_detections(const Scene& scene, const ViewMode& mode,
                                        const SceneSpec& spec, DetectionId first_id) {
  const bool tiled = mode.tile.has_value();
  Rng rng(derive_seed(spec.seed, {kDetectStream, tiled ? mode.tile_index + 1 : 0}));
  const BBox view = tiled ? BBox{mode.tile->x, mode.tile->y, mode.tile->x + mode.tile_size,
                                 mode.tile->y + mode.tile_size}
                          : BBox{0.0, 0.0, static_cast<double>(scene.width),
                                 static_cast<double>(scene.height)};
  const double dx = tiled ? -mode.tile->x : 0.0;
  const double dy = tiled ? -mode.tile->y : 0.0;

  SimulatedDetections out;
  DetectionId next_id = first_id;
  const Source source = tiled ? Source::tile(mode.tile_index) : Source::baseline();

  const auto emit = [&](BBox global, ClassLabel label, double score,
                        std::optional<std::size_t> object) {
    BBox local = global.translated(dx, dy);
    if (tiled) local = clip(local, BBox{0.0, 0.0, mode.tile_size, mode.tile_size});
    if (!local.valid()) return;
    out.detections.push_back(
        Detection::make(local, label, std::clamp(score, 0.0, 1.0), source, next_id++));
    out.object_of.push_back(object);
  };

  const auto jitter = [&](const BBox& b) {
    const double sx = spec.jitter_fraction * b.width();
    const double sy = spec.jitter_fraction * b.height();
    const double e1 = rng.normal(), e2 = rng.normal(), e3 = rng.normal(), e4 = rng.normal();
    BBox j = clip(BBox{b.x1 + sx * e1, b.y1 + sy * e2, b.x2 + sx * e3, b.y2 + sy * e4}, view);
    return j.valid() ? j : clip(b, view);
  };

  const auto maybe_flip = [&](ClassLabel label) {
    if (spec.n_classes < 2 || !rng.bernoulli(spec.label_flip_prob)) return label;
    auto other = static_cast<ClassLabel>(rng.uniform_int(0, spec.n_classes - 2));
    return other >= label ? other + 1 : other;
  };

  std::vector<std::size_t> visible;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const GroundTruthBox& obj = scene.objects[i];
    const double inter = intersection_area(obj.box, view);
    if (inter <= 0.0) continue;
    visible.push_back(i);
    const double fraction = inter / obj.box.area();
    const double size = std::sqrt(obj.box.area());
    const double gain = tiled ? spec.tile_conf_gain : 0.0;
    const double roll = rng.uniform();
    if (fraction >= 1.0 - 1e-9) {
      const double p_miss =
          miss_probability(spec.miss_curve, size) * (tiled ? spec.tile_miss_factor : 1.0);
      if (roll < p_miss) continue;
      const double score = base_conf(spec, size) + gain + spec.confidence_noise_sd * rng.normal();
      emit(jitter(obj.box), maybe_flip(obj.label), score, i);
    } else {
      if (fraction < spec.min_visible_fraction || roll >= spec.truncated_emit_prob) continue;
      const double score =
          fraction * (base_conf(spec, size) + gain) + spec.confidence_noise_sd * rng.normal();
      emit(jitter(clip(obj.box, view)), maybe_flip(obj.label), score, i);
    }
  }

  const double view_fraction = view.area() / (static_cast<double>(scene.width) * scene.height);
  const double lambda = spec.clutter_rate * view_fraction;
  auto n_clutter = static_cast<long long>(std::floor(lambda));
  if (rng.bernoulli(lambda - std::floor(lambda))) ++n_clutter;
  for (long long k = 0; k < n_clutter; ++k) {
    const double w = rng.uniform(spec.min_object_size, spec.max_object_size);
    const double h = w * rng.uniform(0.8, 1.25);
    double cx = 0.0, cy = 0.0;
    if (!visible.empty() && rng.bernoulli(spec.clutter_near_fraction)) {
      const auto& anchor = scene.objects[visible[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<long long>(visible.size()) - 1))]];
      const Point c = centroid(anchor.box);
      const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double dist = rng.uniform(0.8, 2.0) * std::sqrt(anchor.box.area());
      cx = c.x + dist * std::cos(angle);
      cy = c.y + dist * std::sin(angle);
    } else {
      cx = rng.uniform(view.x1, view.x2);
      cy = rng.uniform(view.y1, view.y2);
    }
    const auto label = static_cast<ClassLabel>(rng.uniform_int(0, spec.n_classes - 1));
    const double score = rng.normal(spec.clutter_conf_mean, spec.clutter_conf_sd);
    const BBox b = clip(BBox{cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2}, view);
    if (b.width() < 2.0 || b.height() < 2.0) continue;
    emit(b, label, score, std::nullopt);
  }
  return out;
}

EmbeddingModel::EmbeddingModel(std::uint64_t seed, int n_classes, std::size_t dimension,
                               double noise)
    : seed_(seed), dimension_(dimension), noise_(noise) {
  if (dimension_ == 0) throw DataError("embedding dimension must be positive");
  if (n_classes < 1) throw DataError("embedding model needs at least one class");
  for (int c = 0; c < n_classes; ++c) {
    Rng rng(derive_seed(seed_, {kPrototypeStream, static_cast<std::uint64_t>(c)}));
    prototypes_.push_back(unit_gaussian(rng, dimension_));
  }
}

const std::vector<double>& EmbeddingModel::prototype(ClassLabel label) const {
  if (label < 0 || static_cast<std::size_t>(label) >= prototypes_.size()) {
    throw DataError(fmt::format("embedding model has no prototype for class {}", label));
  }
  return prototypes_[static_cast<std::size_t>(label)];
}

std::vector<double> EmbeddingModel::embed_object(ClassLabel label, DetectionId id) const {
  const auto& proto = prototype(label);
  if (noise_ == 0.0) return proto;
  Rng rng(derive_seed(seed_, {kEmbedStream, static_cast<std::uint64_t>(id)}));
  const double sd = noise_ / std::sqrt(static_cast<double>(dimension_));
  std::vector<double> v(proto);
  for (auto& x : v) x += sd * rng.normal();
  return normalize_embedding(v);
}

std::vector<double> EmbeddingModel::embed_clutter(DetectionId id) const {
  Rng rng(derive_seed(seed_, {kEmbedStream, static_cast<std::uint64_t>(id)}));
  return unit_gaussian(rng, dimension_);
}

ImageCase make_case(const SceneSpec& spec, const std::string& image_id,
                    const CaseOptions& options) {
  const Scene scene = gen_scene(spec, image_id);
  const TileGrid grid = plan_tiles(spec.width, spec.height, options.tile_size,
                                   options.tile_overlap, options.complete_coverage);
  const EmbeddingModel model(derive_seed(spec.seed, {kModelStream}), spec.n_classes,
                             options.embedding_dimension, options.embedding_noise);

  ImageCase c;
  c.image_id = image_id;
  c.width = spec.width;
  c.height = spec.height;
  c.tile_size = options.tile_size;
  c.tile_overlap = options.tile_overlap;
  c.gts = scene.objects;

  DetectionId next_id = 1;
  auto base = simulate_detections(scene, ViewMode::full_image(), spec, next_id);
  next_id += static_cast<DetectionId>(base.detections.size());
  c.baseline_dets = std::move(base.detections);

  auto table = std::make_shared<EmbeddingTable>(options.embedding_dimension);
  for (std::size_t t = 0; t < grid.origins.size(); ++t) {
    auto sim = simulate_detections(
        scene, ViewMode::tiled(grid.origins[t], t, options.tile_size), spec, next_id);
    next_id += static_cast<DetectionId>(sim.detections.size());
    for (std::size_t k = 0; k < sim.detections.size(); ++k) {
      const DetectionId id = sim.detections[k].id;
      const auto& obj = sim.object_of[k];
      table->insert(id, obj ? model.embed_object(scene.objects[*obj].label, id)
                            : model.embed_clutter(id));
    }
    c.tile_dets.push_back(TileDetections{grid.origins[t], std::move(sim.detections)});
  }
  c.embeddings = std::move(table);
  return c;
}

std::vector<ImageCase> make_benchmark(const BenchmarkSpec& spec, std::size_t workers) {
  std::vector<ImageCase> cases(spec.n_scenes);
  parallel_for(spec.n_scenes, workers, [&](std::size_t i) {
    SceneSpec s = spec.scene;
    s.seed = derive_seed(spec.seed, {static_cast<std::uint64_t>(i)});
    cases[i] = make_case(s, fmt::format("scene_{:04d}", i), spec.options);
  });
  return cases;
}

CaseOptions case_options_for(const Config& cfg) {
  CaseOptions o;
  o.tile_size = cfg.tile_size;
  o.tile_overlap = cfg.tile_overlap;
  o.complete_coverage = cfg.complete_coverage;
  return o;
}

}  // namespace evgate::synth
