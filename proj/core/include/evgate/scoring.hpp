#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evgate/geometry.hpp"

namespace evgate {

struct QualityWeights {
  double w1 = 0.7;  // mean confidence
  double w2 = 0.3;  // label consistency
};

struct QualityReport {
  std::size_t group_id = 0;
  double q_score = 0.0;
  double q_consistency = 0.0;
  double q_total = 0.0;
  ClassLabel majority_label = 0;  // ties go to the smaller label
  bool retained = false;          // q_total > threshold
};

struct ScoredMember {
  double score = 0.0;
  ClassLabel label = 0;
};

/// Blend of mean member confidence and majority-label fraction. Throws
/// std::invalid_argument for an empty member list.
QualityReport assess_quality(std::size_t group_id, std::span<const ScoredMember> members,
                             const QualityWeights& weights, double threshold);

/// Ids of reports with q_total strictly above threshold, in input order.
std::vector<std::size_t> quality_gate(std::span<const QualityReport> reports,
                                      double threshold);

/// The multiplicative boost 1 + beta * ln(1 + group_size) * q_total.
double reweight_factor(std::size_t group_size, double q_total, double beta) noexcept;

/// Sets adjusted_score = score * reweight_factor(...) on every member.
/// The raw score is left alone.
void reweight(std::span<Detection> members, std::size_t group_size, double q_total,
              double beta) noexcept;

}  // namespace evgate
