#include "evgate/dbscan.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include <fmt/core.h>

namespace evgate {

double distance(Metric metric, const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (metric == Metric::cosine_unit) {
    double dot = 0.0;
    for (std::size_t k = 0; k < n; ++k) dot += a[k] * b[k];
    return 1.0 - dot;
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

namespace {

void validate(const std::vector<std::vector<double>>& points, Metric metric, double eps,
              std::size_t min_samples) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument(fmt::format("dbscan eps must be positive, got {}", eps));
  }
  if (min_samples < 1) throw std::invalid_argument("dbscan min_samples must be >= 1");
  if (points.empty()) return;
  const std::size_t dim = points.front().size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) {
      throw std::invalid_argument(fmt::format(
          "dbscan point {} has dimension {}, expected {}", i, points[i].size(), dim));
    }
    if (metric == Metric::cosine_unit) {
      double sq = 0.0;
      for (double v : points[i]) sq += v * v;
      if (std::abs(std::sqrt(sq) - 1.0) > 1e-6) {
        throw std::invalid_argument(fmt::format(
            "dbscan cosine metric needs unit vectors; point {} has norm {}", i,
            std::sqrt(sq)));
      }
    }
  }
}

}  // namespace

ClusterLabeling dbscan(const std::vector<std::vector<double>>& points, Metric metric,
                       double eps, std::size_t min_samples) {
  validate(points, metric, eps, min_samples);
  const std::size_t n = points.size();

  // Neighbourhoods are symmetric, so fill both halves from one distance.
  std::vector<std::vector<std::size_t>> neighbours(n);
  for (std::size_t i = 0; i < n; ++i) {
    neighbours[i].push_back(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(metric, points[i], points[j]) <= eps) {
        neighbours[i].push_back(j);
        neighbours[j].push_back(i);
      }
    }
  }
  for (auto& nb : neighbours) std::sort(nb.begin(), nb.end());

  constexpr int kUnvisited = -2;
  ClusterLabeling out;
  out.labels.assign(n, kUnvisited);

  for (std::size_t i = 0; i < n; ++i) {
    if (out.labels[i] != kUnvisited) continue;
    if (neighbours[i].size() < min_samples) {
      out.labels[i] = kNoise;
      continue;
    }
    const int cluster = out.num_clusters++;
    out.labels[i] = cluster;
    std::deque<std::size_t> frontier(neighbours[i].begin(), neighbours[i].end());
    while (!frontier.empty()) {
      const std::size_t j = frontier.front();
      frontier.pop_front();
      if (out.labels[j] == kNoise) {
        out.labels[j] = cluster;  // border point, was provisionally noise
        continue;
      }
      if (out.labels[j] != kUnvisited) continue;
      out.labels[j] = cluster;
      if (neighbours[j].size() >= min_samples) {
        frontier.insert(frontier.end(), neighbours[j].begin(), neighbours[j].end());
      }
    }
  }
  return out;
}

}  // namespace evgate
