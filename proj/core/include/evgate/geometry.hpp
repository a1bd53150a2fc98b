#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

namespace evgate {

/// Axis-aligned box in continuous pixel coordinates, origin top-left.
/// A valid box has finite coordinates and strictly positive width and height.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  /// Builds a box and throws std::invalid_argument if it is degenerate or
  /// non-finite. Use this at every ingestion boundary.
  static BBox make(double x1, double y1, double x2, double y2);

  double width() const noexcept { return x2 - x1; }
  double height() const noexcept { return y2 - y1; }
  double area() const noexcept { return width() * height(); }
  bool valid() const noexcept;

  BBox translated(double dx, double dy) const noexcept {
    return BBox{x1 + dx, y1 + dy, x2 + dx, y2 + dy};
  }
  BBox scaled(double k) const noexcept {
    return BBox{x1 * k, y1 * k, x2 * k, y2 * k};
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

using ClassLabel = int;
using DetectionId = std::int64_t;

/// Where a candidate came from: the full-image pass or a numbered tile.
struct Source {
  enum class Kind { baseline, tile };
  Kind kind = Kind::baseline;
  std::size_t tile_index = 0;

  static Source baseline() noexcept { return {}; }
  static Source tile(std::size_t index) noexcept { return {Kind::tile, index}; }
  bool is_tile() const noexcept { return kind == Kind::tile; }

  /// "baseline" or "tile:<index>".
  std::string to_string() const;
  static Source parse(const std::string& text);

  friend bool operator==(const Source&, const Source&) = default;
};

struct Detection {
  BBox box;
  ClassLabel label = 0;
  double score = 0.0;           // detector confidence in [0,1]
  double adjusted_score = 0.0;  // ranking score, == score until reweighted
  Source source;
  DetectionId id = 0;

  /// Validating constructor; adjusted_score starts equal to score.
  static Detection make(BBox box, ClassLabel label, double score, Source source,
                        DetectionId id);

  friend bool operator==(const Detection&, const Detection&) = default;
};

double iou(const BBox& a, const BBox& b) noexcept;
double intersection_area(const BBox& a, const BBox& b) noexcept;
Point centroid(const BBox& b) noexcept;
double diagonal(const BBox& b) noexcept;

}  // namespace evgate
