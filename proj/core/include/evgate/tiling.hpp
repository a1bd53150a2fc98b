#pragma once

#include <cstddef>
#include <vector>

#include "evgate/geometry.hpp"

namespace evgate {

struct TileOrigin {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const TileOrigin&, const TileOrigin&) = default;
  friend auto operator<=>(const TileOrigin&, const TileOrigin&) = default;
};

/// Planned overlapping square tiles. Origins are row-major (y, then x).
struct TileGrid {
  int image_w = 0;
  int image_h = 0;
  int tile = 0;
  int overlap = 0;
  int stride = 0;
  std::vector<TileOrigin> origins;
};

/// Grid anchors {0, S, 2S, ...} clipped to [0, W-T] per axis. With
/// complete_coverage an extra anchor at exactly W-T (H-T) is appended when
/// the last regular anchor falls short, so the tiles cover the full image.
TileGrid plan_tiles(int image_w, int image_h, int tile, int overlap,
                    bool complete_coverage = true);

/// Detections reported by the detector for one tile, in tile-local coordinates.
struct TileDetections {
  TileOrigin origin;
  std::vector<Detection> detections;
};

/// Lifts a tile-local detection into image coordinates and tags it with the
/// tile index. Throws if the box leaves [0, tile_size]^2 by more than 1e-6.
Detection globalize(const TileOrigin& origin, std::size_t tile_index, double tile_size,
                    Detection d);

struct PoolOptions {
  double tau_tile = 0.15;
  double tile_size = 640.0;
  /// Experimental: drop tile detections that touch an interior tile edge
  /// (an edge not lying on the image border). Off by default.
  bool drop_interior_edge_hits = false;
  double image_w = 0.0;
  double image_h = 0.0;
  double edge_margin = 1.0;
};

/// Union of globalized tile detections with score >= tau_tile. Output order
/// is tile index, then input order within the tile.
std::vector<Detection> pool_candidates(const std::vector<TileDetections>& per_tile,
                                       const PoolOptions& options);

/// Collapses detections whose (box rounded to 1e-3 px, label) key repeats,
/// keeping the highest-scoring member in the position of the first occurrence.
std::vector<Detection> dedup(const std::vector<Detection>& pool);

}  // namespace evgate
