#include "evgate/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <tuple>

#include <fmt/core.h>

namespace evgate {
namespace {

std::vector<int> axis_anchors(int extent, int tile, int stride, bool complete) {
  std::vector<int> anchors;
  const int last = extent - tile;
  for (int a = 0; a <= last; a += stride) anchors.push_back(a);
  if (complete && anchors.back() < last) anchors.push_back(last);
  return anchors;
}

}  // namespace

TileGrid plan_tiles(int image_w, int image_h, int tile, int overlap,
                    bool complete_coverage) {
  if (tile <= 0 || overlap < 0 || overlap >= tile) {
    throw std::invalid_argument(fmt::format(
        "tile overlap must satisfy 0 <= overlap < tile (tile={}, overlap={})", tile,
        overlap));
  }
  if (tile > image_w || tile > image_h) {
    throw std::invalid_argument(fmt::format(
        "tile size {} exceeds image dimensions {}x{}", tile, image_w, image_h));
  }
  TileGrid grid{image_w, image_h, tile, overlap, tile - overlap, {}};
  const auto xs = axis_anchors(image_w, tile, grid.stride, complete_coverage);
  const auto ys = axis_anchors(image_h, tile, grid.stride, complete_coverage);
  for (int y : ys) {
    for (int x : xs) {
      grid.origins.push_back(TileOrigin{static_cast<double>(x), static_cast<double>(y)});
    }
  }
  std::sort(grid.origins.begin(), grid.origins.end(),
            [](const TileOrigin& a, const TileOrigin& b) {
              return std::tie(a.y, a.x) < std::tie(b.y, b.x);
            });
  grid.origins.erase(std::unique(grid.origins.begin(), grid.origins.end()),
                     grid.origins.end());
  return grid;
}

Detection globalize(const TileOrigin& origin, std::size_t tile_index, double tile_size,
                    Detection d) {
  constexpr double kSlack = 1e-6;
  const BBox& b = d.box;
  if (b.x1 < -kSlack || b.y1 < -kSlack || b.x2 > tile_size + kSlack ||
      b.y2 > tile_size + kSlack) {
    throw std::invalid_argument(fmt::format(
        "detection {} box ({}, {}, {}, {}) extends beyond tile extent {}", d.id, b.x1,
        b.y1, b.x2, b.y2, tile_size));
  }
  d.box = b.translated(origin.x, origin.y);
  d.source = Source::tile(tile_index);
  return d;
}

namespace {

bool touches_interior_edge(const Detection& local, const TileOrigin& origin,
                           const PoolOptions& opt) {
  const BBox& b = local.box;
  const double t = opt.tile_size;
  const double m = opt.edge_margin;
  const bool left = b.x1 <= m && origin.x > 0.0;
  const bool top = b.y1 <= m && origin.y > 0.0;
  const bool right = b.x2 >= t - m && origin.x + t < opt.image_w;
  const bool bottom = b.y2 >= t - m && origin.y + t < opt.image_h;
  return left || top || right || bottom;
}

}  // namespace

std::vector<Detection> pool_candidates(const std::vector<TileDetections>& per_tile,
                                       const PoolOptions& options) {
  std::vector<Detection> pool;
  for (std::size_t t = 0; t < per_tile.size(); ++t) {
    const auto& tile = per_tile[t];
    for (const Detection& d : tile.detections) {
      if (d.score < options.tau_tile) continue;
      if (options.drop_interior_edge_hits &&
          touches_interior_edge(d, tile.origin, options)) {
        continue;
      }
      pool.push_back(globalize(tile.origin, t, options.tile_size, d));
    }
  }
  return pool;
}

std::vector<Detection> dedup(const std::vector<Detection>& pool) {
  using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t, ClassLabel>;
  const auto q = [](double v) { return static_cast<std::int64_t>(std::llround(v * 1000.0)); };

  std::map<Key, std::size_t> slot_of;
  std::vector<Detection> out;
  out.reserve(pool.size());
  for (const Detection& d : pool) {
    const Key key{q(d.box.x1), q(d.box.y1), q(d.box.x2), q(d.box.y2), d.label};
    auto [it, inserted] = slot_of.emplace(key, out.size());
    if (inserted) {
      out.push_back(d);
    } else if (d.score > out[it->second].score) {
      out[it->second] = d;
    }
  }
  return out;
}

}  // namespace evgate
