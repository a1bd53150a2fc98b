#pragma once

#include <vector>

#include "evgate/geometry.hpp"

namespace evgate {

struct FusionInput {
  std::vector<Detection> baseline;   // full-image detections above tau_base
  std::vector<Detection> validated;  // gated (and possibly reweighted) tile candidates
  double iou_threshold = 0.55;
};

/// Ranking order used throughout: adjusted_score descending, then raw score
/// descending, then id ascending.
bool ranks_before(const Detection& a, const Detection& b) noexcept;

/// Class-balanced NMS: independent greedy NMS per label. A box is suppressed
/// only when its IoU with a kept box of the same label is strictly greater
/// than iou_threshold. Survivors are returned in ranking order, verbatim.
std::vector<Detection> cb_nms(std::vector<Detection> dets, double iou_threshold);

/// cb_nms over baseline followed by validated.
std::vector<Detection> fuse(const FusionInput& input);

}  // namespace evgate
