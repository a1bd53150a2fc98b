#include "evgate/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string_view>

#include <fmt/core.h>

namespace evgate {

BBox BBox::make(double x1, double y1, double x2, double y2) {
  BBox b{x1, y1, x2, y2};
  if (!b.valid()) {
    throw std::invalid_argument(
        fmt::format("invalid box ({}, {}, {}, {}): need finite coordinates with "
                    "x1 < x2 and y1 < y2",
                    x1, y1, x2, y2));
  }
  return b;
}

bool BBox::valid() const noexcept {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
         std::isfinite(y2) && x1 < x2 && y1 < y2;
}

std::string Source::to_string() const {
  if (kind == Kind::baseline) return "baseline";
  return fmt::format("tile:{}", tile_index);
}

Source Source::parse(const std::string& text) {
  if (text == "baseline") return Source::baseline();
  constexpr std::string_view prefix = "tile:";
  if (text.size() > prefix.size() && text.compare(0, prefix.size(), prefix) == 0) {
    const std::string digits = text.substr(prefix.size());
    if (std::all_of(digits.begin(), digits.end(),
                    [](unsigned char c) { return std::isdigit(c) != 0; })) {
      return Source::tile(static_cast<std::size_t>(std::stoull(digits)));
    }
  }
  throw std::invalid_argument(fmt::format("unrecognized detection source '{}'", text));
}

Detection Detection::make(BBox box, ClassLabel label, double score, Source source,
                          DetectionId id) {
  if (!box.valid()) {
    throw std::invalid_argument(fmt::format("detection {} has an invalid box", id));
  }
  if (!(score >= 0.0 && score <= 1.0)) {
    throw std::invalid_argument(
        fmt::format("detection {} has score {} outside [0,1]", id, score));
  }
  return Detection{box, label, score, score, source, id};
}

double intersection_area(const BBox& a, const BBox& b) noexcept {
  const double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const BBox& a, const BBox& b) noexcept {
  if (a == b) return 1.0;
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Point centroid(const BBox& b) noexcept {
  return Point{(b.x1 + b.x2) * 0.5, (b.y1 + b.y2) * 0.5};
}

double diagonal(const BBox& b) noexcept { return std::hypot(b.width(), b.height()); }

}  // namespace evgate
