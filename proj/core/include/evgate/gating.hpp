#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "evgate/geometry.hpp"

namespace evgate {

enum class GroupStage { spatial, semantic };

/// A validated cluster of detections. Semantic sub-groups refer back to the
/// index of the spatial group they were split from.
struct Group {
  std::vector<DetectionId> member_ids;
  GroupStage stage = GroupStage::spatial;
  std::optional<std::size_t> parent;
};

/// Returns a unit vector; throws std::invalid_argument on a zero (or
/// non-finite) input.
std::vector<double> normalize_embedding(const std::vector<double>& raw);

/// Appearance descriptors keyed by detection id.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  /// Unit-norm embedding for `id`, or nullptr when the provider has none.
  virtual const std::vector<double>* find(DetectionId id) const = 0;
};

/// Precomputed vectors (typically loaded from an embedding file).
class EmbeddingTable final : public EmbeddingProvider {
 public:
  explicit EmbeddingTable(std::size_t dimension = 0) : dimension_(dimension) {}

  /// Normalizes `raw` and stores it. Throws on dimension mismatch.
  void insert(DetectionId id, const std::vector<double>& raw);

  std::size_t dimension() const override { return dimension_; }
  const std::vector<double>* find(DetectionId id) const override;
  std::size_t size() const { return vectors_.size(); }
  const std::map<DetectionId, std::vector<double>>& entries() const { return vectors_; }

 private:
  std::size_t dimension_;
  std::map<DetectionId, std::vector<double>> vectors_;
};

/// multiplier * mean diagonal over the pool; nullopt for an empty pool.
std::optional<double> adaptive_spatial_eps(const std::vector<Detection>& pool,
                                           double multiplier);

/// Euclidean DBSCAN over box centroids. Noise and clusters smaller than
/// min_samples are dropped; groups come out in cluster-id order.
std::vector<Group> spatial_gate(const std::vector<Detection>& pool, double eps,
                                std::size_t min_samples);

/// Cosine DBSCAN over the members' embeddings. Returns the surviving
/// sub-clusters with `parent` set to parent_index. Throws std::invalid_argument
/// naming the first member without an embedding.
std::vector<Group> semantic_gate(const Group& group, std::size_t parent_index,
                                 const EmbeddingProvider& provider, double eps_semantic,
                                 std::size_t min_samples);

}  // namespace evgate
