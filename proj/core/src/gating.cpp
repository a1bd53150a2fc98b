#include "evgate/gating.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

#include "evgate/dbscan.hpp"

namespace evgate {

std::vector<double> normalize_embedding(const std::vector<double>& raw) {
  double sq = 0.0;
  for (double v : raw) sq += v * v;
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("cannot normalize a zero or non-finite embedding");
  }
  std::vector<double> out(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) out[k] = raw[k] / norm;
  return out;
}

void EmbeddingTable::insert(DetectionId id, const std::vector<double>& raw) {
  if (dimension_ == 0) dimension_ = raw.size();
  if (raw.size() != dimension_) {
    throw std::invalid_argument(fmt::format(
        "embedding for detection {} has dimension {}, expected {}", id, raw.size(),
        dimension_));
  }
  vectors_[id] = normalize_embedding(raw);
}

const std::vector<double>* EmbeddingTable::find(DetectionId id) const {
  auto it = vectors_.find(id);
  return it == vectors_.end() ? nullptr : &it->second;
}

std::optional<double> adaptive_spatial_eps(const std::vector<Detection>& pool,
                                           double multiplier) {
  if (pool.empty()) return std::nullopt;
  double sum = 0.0;
  for (const Detection& d : pool) sum += diagonal(d.box);
  return multiplier * (sum / static_cast<double>(pool.size()));
}

namespace {

std::vector<Group> collect(const std::vector<DetectionId>& ids, const ClusterLabeling& cl,
                           std::size_t min_samples, GroupStage stage,
                           std::optional<std::size_t> parent) {
  std::vector<Group> groups(static_cast<std::size_t>(cl.num_clusters));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (cl.labels[i] == kNoise) continue;
    groups[static_cast<std::size_t>(cl.labels[i])].member_ids.push_back(ids[i]);
  }
  std::vector<Group> kept;
  for (auto& g : groups) {
    if (g.member_ids.size() < min_samples) continue;
    g.stage = stage;
    g.parent = parent;
    kept.push_back(std::move(g));
  }
  return kept;
}

}  // namespace

std::vector<Group> spatial_gate(const std::vector<Detection>& pool, double eps,
                                std::size_t min_samples) {
  if (pool.empty()) return {};
  std::vector<std::vector<double>> points;
  std::vector<DetectionId> ids;
  points.reserve(pool.size());
  ids.reserve(pool.size());
  for (const Detection& d : pool) {
    const Point c = centroid(d.box);
    points.push_back({c.x, c.y});
    ids.push_back(d.id);
  }
  const auto cl = dbscan(points, Metric::euclidean, eps, min_samples);
  return collect(ids, cl, min_samples, GroupStage::spatial, std::nullopt);
}

std::vector<Group> semantic_gate(const Group& group, std::size_t parent_index,
                                 const EmbeddingProvider& provider, double eps_semantic,
                                 std::size_t min_samples) {
  if (!(eps_semantic > 0.0 && eps_semantic < 2.0)) {
    throw std::invalid_argument(
        fmt::format("semantic eps must lie in (0, 2), got {}", eps_semantic));
  }
  std::vector<std::vector<double>> points;
  points.reserve(group.member_ids.size());
  for (DetectionId id : group.member_ids) {
    const auto* v = provider.find(id);
    if (v == nullptr) {
      throw std::invalid_argument(fmt::format("no embedding for detection {}", id));
    }
    points.push_back(*v);
  }
  const auto cl = dbscan(points, Metric::cosine_unit, eps_semantic, min_samples);
  return collect(group.member_ids, cl, 1, GroupStage::semantic, parent_index);
}

}  // namespace evgate
