#pragma once

// Equality of ImageCase values up to the 6-decimal printed precision.

#include <cmath>
#include <string>

#include "evgate/pipeline.hpp"

namespace evgate::testing {

inline bool close6(double a, double b) { return std::abs(a - b) <= 5e-7 + 1e-12; }

inline bool close6(const BBox& a, const BBox& b) {
  return close6(a.x1, b.x1) && close6(a.y1, b.y1) && close6(a.x2, b.x2) && close6(a.y2, b.y2);
}

inline bool same_detection(const Detection& a, const Detection& b) {
  return close6(a.box, b.box) && a.label == b.label && close6(a.score, b.score) &&
         a.source == b.source && a.id == b.id;
}

/// Empty string when equal, otherwise a description of the first difference.
inline std::string case_difference(const ImageCase& a, const ImageCase& b) {
  if (a.image_id != b.image_id) return "image_id";
  if (a.width != b.width || a.height != b.height) return "image size";
  if (a.tile_size != b.tile_size || a.tile_overlap != b.tile_overlap) return "tile grid";
  if (a.gts.size() != b.gts.size()) return "gt count";
  for (std::size_t i = 0; i < a.gts.size(); ++i) {
    if (!close6(a.gts[i].box, b.gts[i].box) || a.gts[i].label != b.gts[i].label) {
      return "gt " + std::to_string(i);
    }
  }
  if (a.baseline_dets.size() != b.baseline_dets.size()) return "baseline count";
  for (std::size_t i = 0; i < a.baseline_dets.size(); ++i) {
    if (!same_detection(a.baseline_dets[i], b.baseline_dets[i])) {
      return "baseline det " + std::to_string(i);
    }
  }
  if (a.tile_dets.size() != b.tile_dets.size()) return "tile count";
  for (std::size_t t = 0; t < a.tile_dets.size(); ++t) {
    const auto& ta = a.tile_dets[t];
    const auto& tb = b.tile_dets[t];
    if (!close6(ta.origin.x, tb.origin.x) || !close6(ta.origin.y, tb.origin.y)) {
      return "tile origin " + std::to_string(t);
    }
    if (ta.detections.size() != tb.detections.size()) return "tile dets " + std::to_string(t);
    for (std::size_t i = 0; i < ta.detections.size(); ++i) {
      if (!same_detection(ta.detections[i], tb.detections[i])) {
        return "tile " + std::to_string(t) + " det " + std::to_string(i);
      }
    }
  }
  if (bool(a.embeddings) != bool(b.embeddings)) return "embedding presence";
  if (a.embeddings) {
    const auto& ea = a.embeddings->entries();
    const auto& eb = b.embeddings->entries();
    if (ea.size() != eb.size()) return "embedding count";
    for (const auto& [id, v] : ea) {
      const auto* w = b.embeddings->find(id);
      if (w == nullptr || w->size() != v.size()) return "embedding " + std::to_string(id);
      // Renormalizing after rounding can move a component by a few ulps of 1e-6.
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (std::abs(v[k] - (*w)[k]) > 2e-6) return "embedding " + std::to_string(id);
      }
    }
  }
  return {};
}

}  // namespace evgate::testing
