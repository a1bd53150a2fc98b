#include "evgate/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace evgate {

MatchResult match(const std::vector<Detection>& preds,
                  const std::vector<GroundTruthBox>& gts, double iou_min) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (preds[a].adjusted_score != preds[b].adjusted_score) {
      return preds[a].adjusted_score > preds[b].adjusted_score;
    }
    return preds[a].id < preds[b].id;
  });

  MatchResult r;
  r.assignment.assign(preds.size(), std::nullopt);
  std::vector<bool> taken(gts.size(), false);
  for (std::size_t i : order) {
    double best_iou = -1.0;
    std::optional<std::size_t> best;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g] || gts[g].label != preds[i].label) continue;
      const double v = iou(preds[i].box, gts[g].box);
      if (v >= iou_min && v > best_iou) {
        best_iou = v;
        best = g;
      }
    }
    if (best) {
      taken[*best] = true;
      r.assignment[i] = best;
      ++r.tp;
    }
  }
  r.fp = preds.size() - r.tp;
  r.fn = gts.size() - r.tp;
  return r;
}

Prf prf(std::size_t tp, std::size_t fp, std::size_t fn) noexcept {
  Prf m;
  m.precision = (tp + fp) == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  m.recall = (tp + fn) == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double s = m.precision + m.recall;
  m.f1 = s > 0.0 ? 2.0 * m.precision * m.recall / s : 0.0;
  return m;
}

ImageMetrics evaluate_image(std::string image_id, const std::vector<Detection>& preds,
                            const std::vector<GroundTruthBox>& gts, double iou_min) {
  const MatchResult mr = match(preds, gts, iou_min);
  const Prf m = prf(mr.tp, mr.fp, mr.fn);
  return ImageMetrics{std::move(image_id), mr.tp, mr.fp, mr.fn,
                      m.precision, m.recall, m.f1};
}

double EvalReport::mean_total_latency() const {
  double total = 0.0;
  for (const auto& [stage, seconds] : stage_latency) total += seconds;
  return total;
}

EvalReport aggregate(std::vector<ImageMetrics> per_image,
                     const std::vector<StageTimings>& timings) {
  if (per_image.empty()) throw std::invalid_argument("cannot aggregate an empty dataset");
  if (!timings.empty() && timings.size() != per_image.size()) {
    throw std::invalid_argument("stage timings must align with per-image metrics");
  }
  EvalReport rep;
  const double n = static_cast<double>(per_image.size());
  for (const auto& m : per_image) {
    rep.mean_precision += m.precision;
    rep.mean_recall += m.recall;
    rep.mean_f1 += m.f1;
  }
  rep.mean_precision /= n;
  rep.mean_recall /= n;
  rep.mean_f1 /= n;
  for (const auto& t : timings) {
    for (const auto& [stage, seconds] : t) rep.stage_latency[stage] += seconds;
  }
  for (auto& [stage, seconds] : rep.stage_latency) seconds /= n;
  rep.per_image = std::move(per_image);
  return rep;
}

}  // namespace evgate
