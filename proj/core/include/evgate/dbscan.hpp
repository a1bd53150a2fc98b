#pragma once

#include <cstddef>
#include <vector>

namespace evgate {

enum class Metric {
  euclidean,
  cosine_unit,  // 1 - dot(a, b); inputs must be unit vectors
};

inline constexpr int kNoise = -1;

/// labels[i] is the cluster of point i (0..num_clusters-1, in discovery
/// order) or kNoise.
struct ClusterLabeling {
  std::vector<int> labels;
  int num_clusters = 0;
};

double distance(Metric metric, const std::vector<double>& a, const std::vector<double>& b);

/// Brute-force DBSCAN with deterministic expansion.
///
/// A point is core when its closed eps-ball (itself included) holds at least
/// min_samples points. Points are visited in ascending index order; each
/// unvisited core point seeds a new cluster that is expanded breadth-first
/// with neighbours queued in ascending index order. A border point joins the
/// first cluster that reaches it and is never reassigned.
///
/// Throws std::invalid_argument for eps <= 0, min_samples < 1, ragged
/// dimensions, or (for cosine_unit) any vector whose norm differs from 1 by
/// more than 1e-6.
ClusterLabeling dbscan(const std::vector<std::vector<double>>& points, Metric metric,
                       double eps, std::size_t min_samples);

}  // namespace evgate
