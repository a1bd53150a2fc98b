#include "evgate/scoring.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace evgate {

QualityReport assess_quality(std::size_t group_id, std::span<const ScoredMember> members,
                             const QualityWeights& weights, double threshold) {
  if (members.empty()) {
    throw std::invalid_argument("quality assessment of an empty group");
  }
  double sum = 0.0;
  std::map<ClassLabel, std::size_t> votes;
  for (const auto& m : members) {
    sum += m.score;
    ++votes[m.label];
  }
  // std::map iterates labels ascending, so the first maximum is the smallest label.
  ClassLabel majority = votes.begin()->first;
  std::size_t best = 0;
  for (const auto& [label, count] : votes) {
    if (count > best) {
      best = count;
      majority = label;
    }
  }
  const double n = static_cast<double>(members.size());
  QualityReport r;
  r.group_id = group_id;
  r.q_score = sum / n;
  r.q_consistency = static_cast<double>(best) / n;
  r.q_total = weights.w1 * r.q_score + weights.w2 * r.q_consistency;
  r.majority_label = majority;
  r.retained = r.q_total > threshold;
  return r;
}

std::vector<std::size_t> quality_gate(std::span<const QualityReport> reports,
                                      double threshold) {
  std::vector<std::size_t> kept;
  for (const auto& r : reports) {
    if (r.q_total > threshold) kept.push_back(r.group_id);
  }
  return kept;
}

double reweight_factor(std::size_t group_size, double q_total, double beta) noexcept {
  return 1.0 + beta * std::log(1.0 + static_cast<double>(group_size)) * q_total;
}

void reweight(std::span<Detection> members, std::size_t group_size, double q_total,
              double beta) noexcept {
  const double factor = reweight_factor(group_size, q_total, beta);
  for (Detection& d : members) d.adjusted_score = d.score * factor;
}

}  // namespace evgate
