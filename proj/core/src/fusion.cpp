#include "evgate/fusion.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <fmt/core.h>

namespace evgate {

bool ranks_before(const Detection& a, const Detection& b) noexcept {
  if (a.adjusted_score != b.adjusted_score) return a.adjusted_score > b.adjusted_score;
  if (a.score != b.score) return a.score > b.score;
  return a.id < b.id;
}

std::vector<Detection> cb_nms(std::vector<Detection> dets, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw std::invalid_argument(
        fmt::format("NMS IoU threshold must lie in (0,1), got {}", iou_threshold));
  }
  std::map<ClassLabel, std::vector<Detection>> by_label;
  for (auto& d : dets) by_label[d.label].push_back(std::move(d));

  std::vector<Detection> kept;
  for (auto& [label, members] : by_label) {
    std::sort(members.begin(), members.end(), ranks_before);
    std::vector<bool> suppressed(members.size(), false);
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (suppressed[i]) continue;
      kept.push_back(members[i]);
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        if (!suppressed[j] && iou(members[i].box, members[j].box) > iou_threshold) {
          suppressed[j] = true;
        }
      }
    }
  }
  std::sort(kept.begin(), kept.end(), ranks_before);
  return kept;
}

std::vector<Detection> fuse(const FusionInput& input) {
  std::vector<Detection> all;
  all.reserve(input.baseline.size() + input.validated.size());
  all.insert(all.end(), input.baseline.begin(), input.baseline.end());
  all.insert(all.end(), input.validated.begin(), input.validated.end());
  return cb_nms(std::move(all), input.iou_threshold);
}

}  // namespace evgate
