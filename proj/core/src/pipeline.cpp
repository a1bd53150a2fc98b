#include "evgate/pipeline.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <fmt/core.h>

#include "evgate/errors.hpp"
#include "evgate/fusion.hpp"
#include "evgate/parallel.hpp"
#include "evgate/scoring.hpp"

namespace evgate {

void ImageCase::validate() const {
  if (width <= 0 || height <= 0) {
    throw DataError(fmt::format("case '{}': invalid image size {}x{}", image_id, width, height));
  }
  std::set<DetectionId> ids;
  const auto check = [&](const Detection& d, bool tile) {
    if (!d.box.valid()) {
      throw DataError(fmt::format("case '{}': detection {} has a degenerate box", image_id, d.id));
    }
    if (!(d.score >= 0.0 && d.score <= 1.0)) {
      throw DataError(fmt::format("case '{}': detection {} score {} outside [0,1]", image_id,
                                  d.id, d.score));
    }
    if (d.source.is_tile() != tile) {
      throw DataError(fmt::format("case '{}': detection {} has source {} in the wrong list",
                                  image_id, d.id, d.source.to_string()));
    }
    if (!ids.insert(d.id).second) {
      throw DataError(fmt::format("case '{}': duplicate detection id {}", image_id, d.id));
    }
  };
  for (const auto& d : baseline_dets) check(d, false);
  for (std::size_t t = 0; t < tile_dets.size(); ++t) {
    for (const auto& d : tile_dets[t].detections) {
      check(d, true);
      if (d.source.tile_index != t) {
        throw DataError(fmt::format("case '{}': detection {} claims tile {} but is listed under {}",
                                    image_id, d.id, d.source.tile_index, t));
      }
      const BBox& b = d.box;
      constexpr double kSlack = 1e-6;
      if (b.x1 < -kSlack || b.y1 < -kSlack || b.x2 > tile_size + kSlack ||
          b.y2 > tile_size + kSlack) {
        throw DataError(fmt::format("case '{}': detection {} extends beyond its {} px tile",
                                    image_id, d.id, tile_size));
      }
    }
  }
}

namespace {

std::vector<Detection> members_of(const Group& g,
                                  const std::unordered_map<DetectionId, const Detection*>& by_id) {
  std::vector<Detection> out;
  out.reserve(g.member_ids.size());
  for (DetectionId id : g.member_ids) out.push_back(*by_id.at(id));
  return out;
}

}  // namespace

PipelineResult run_pipeline(const ImageCase& image, const Config& cfg,
                            const EmbeddingProvider* provider) {
  cfg.validate();
  const Toggles& on = cfg.toggles;
  if (on.semantic && provider == nullptr) {
    throw DataError(fmt::format(
        "case '{}': semantic gate enabled but no embeddings are available", image.image_id));
  }

  PipelineResult result;
  StageTimings& timings = result.timings;

  std::vector<Detection> baseline = time_stage(timings, stage::baseline, [&] {
    std::vector<Detection> kept;
    for (const auto& d : image.baseline_dets) {
      if (d.score >= cfg.tau_base) kept.push_back(d);
    }
    return kept;
  });
  result.counts.baseline = baseline.size();

  std::vector<Detection> pool;
  if (on.tiling) {
    pool = time_stage(timings, stage::tiling, [&] {
      PoolOptions opt;
      opt.tau_tile = cfg.tau_tile;
      opt.tile_size = image.tile_size;
      opt.drop_interior_edge_hits = cfg.tile_edge_filter;
      opt.image_w = image.width;
      opt.image_h = image.height;
      return dedup(pool_candidates(image.tile_dets, opt));
    });
  }
  result.counts.pooled = pool.size();

  std::unordered_map<DetectionId, const Detection*> by_id;
  by_id.reserve(pool.size());
  for (const auto& d : pool) by_id.emplace(d.id, &d);

  // Without the spatial gate the whole pool acts as one implicit group.
  std::vector<Group> groups;
  const bool grouped = on.spatial || on.semantic || on.reweighting;
  if (on.spatial) {
    groups = time_stage(timings, stage::spatial, [&] {
      const auto eps = adaptive_spatial_eps(pool, cfg.spatial_eps_multiplier);
      if (!eps) return std::vector<Group>{};
      return spatial_gate(pool, *eps, static_cast<std::size_t>(cfg.spatial_min_samples));
    });
    for (const auto& g : groups) result.counts.spatial += g.member_ids.size();
  } else if (grouped && !pool.empty()) {
    Group all;
    for (const auto& d : pool) all.member_ids.push_back(d.id);
    groups.push_back(std::move(all));
  }

  if (on.semantic) {
    groups = time_stage(timings, stage::semantic, [&] {
      std::vector<Group> sub;
      for (std::size_t i = 0; i < groups.size(); ++i) {
        auto parts = semantic_gate(groups[i], i, *provider, cfg.semantic_eps,
                                   static_cast<std::size_t>(cfg.semantic_min_samples));
        sub.insert(sub.end(), std::make_move_iterator(parts.begin()),
                   std::make_move_iterator(parts.end()));
      }
      return sub;
    });
    for (const auto& g : groups) result.counts.semantic += g.member_ids.size();
  }

  std::vector<Detection> validated;
  if (!grouped) {
    validated = pool;
  } else if (on.reweighting) {
    validated = time_stage(timings, stage::reweighting, [&] {
      std::vector<Detection> out;
      const QualityWeights weights{cfg.quality_w1, cfg.quality_w2};
      for (std::size_t i = 0; i < groups.size(); ++i) {
        auto members = members_of(groups[i], by_id);
        std::vector<ScoredMember> scored;
        scored.reserve(members.size());
        for (const auto& m : members) scored.push_back({m.score, m.label});
        const auto report = assess_quality(i, scored, weights, cfg.quality_threshold);
        if (!report.retained) continue;
        reweight(members, members.size(), report.q_total, cfg.beta);
        out.insert(out.end(), members.begin(), members.end());
      }
      return out;
    });
  } else {
    for (const auto& g : groups) {
      auto members = members_of(g, by_id);
      validated.insert(validated.end(), members.begin(), members.end());
    }
  }
  result.counts.validated = validated.size();

  result.detections = time_stage(timings, stage::fusion, [&] {
    return fuse(FusionInput{baseline, validated, cfg.nms_iou});
  });
  result.counts.final = result.detections.size();
  result.validated = std::move(validated);
  return result;
}

PipelineResult run_pipeline(const ImageCase& image, const Config& cfg) {
  return run_pipeline(image, cfg, image.embeddings.get());
}

std::vector<PipelineResult> run_batch(const std::vector<ImageCase>& cases, const Config& cfg,
                                      std::size_t workers) {
  std::vector<PipelineResult> out(cases.size());
  parallel_for(cases.size(), workers, [&](std::size_t i) { out[i] = run_pipeline(cases[i], cfg); });
  return out;
}

EvalReport evaluate_config(const std::vector<ImageCase>& cases, const Config& cfg,
                           std::size_t workers) {
  if (cases.empty()) throw std::invalid_argument("evaluation needs at least one image");
  const auto results = run_batch(cases, cfg, workers);
  std::vector<ImageMetrics> metrics;
  std::vector<StageTimings> timings;
  metrics.reserve(cases.size());
  timings.reserve(cases.size());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    metrics.push_back(evaluate_image(cases[i].image_id, results[i].detections, cases[i].gts));
    timings.push_back(results[i].timings);
  }
  return aggregate(std::move(metrics), timings);
}

std::vector<Config> ablation_ladder(const Config& base) {
  std::vector<Config> ladder;
  Config c = base;
  c.toggles = Toggles{false, false, false, false};
  ladder.push_back(c);
  c.toggles.tiling = true;
  ladder.push_back(c);
  c.toggles.spatial = true;
  ladder.push_back(c);
  c.toggles.semantic = true;
  ladder.push_back(c);
  c.toggles.reweighting = true;
  ladder.push_back(c);
  return ladder;
}

std::vector<AblationRow> run_ablation(const std::vector<ImageCase>& cases, const Config& cfg,
                                      std::size_t workers) {
  if (cases.empty()) throw std::invalid_argument("ablation needs at least one image");
  std::vector<AblationRow> rows;
  const auto ladder = ablation_ladder(cfg);
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    rows.push_back(AblationRow{kAblationNames[i], ladder[i],
                               evaluate_config(cases, ladder[i], workers)});
  }
  return rows;
}

}  // namespace evgate
