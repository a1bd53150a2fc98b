#include "evgate/search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <fmt/core.h>

#include "evgate/errors.hpp"
#include "evgate/random.hpp"

namespace evgate {
namespace {

template <typename T>
std::vector<T> parse_list(const KeyValue& kv) {
  std::vector<T> out;
  std::stringstream ss(kv.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::stringstream one(item);
    T v{};
    if (!(one >> v) || !(one >> std::ws).eof()) {
      throw DataError(fmt::format("line {}: '{}' has a bad list entry '{}'", kv.line, kv.key, item));
    }
    out.push_back(v);
  }
  if (out.empty()) throw DataError(fmt::format("line {}: '{}' is empty", kv.line, kv.key));
  return out;
}

double parse_one(const KeyValue& kv) {
  const auto v = parse_list<double>(kv);
  if (v.size() != 1) throw DataError(fmt::format("line {}: '{}' takes one value", kv.line, kv.key));
  return v.front();
}

}  // namespace

SearchSpace parse_search_space(std::string_view text, std::string_view origin) {
  SearchSpace s;
  for (const auto& kv : parse_key_values(text, origin)) {
    if (kv.key == "tau_base") s.tau_base = parse_list<double>(kv);
    else if (kv.key == "spatial_eps_multiplier") s.spatial_eps_multiplier = parse_list<double>(kv);
    else if (kv.key == "tau_tile") s.tau_tile = parse_list<double>(kv);
    else if (kv.key == "semantic_eps") s.semantic_eps = parse_list<double>(kv);
    else if (kv.key == "beta_min") s.beta_min = parse_one(kv);
    else if (kv.key == "beta_max") s.beta_max = parse_one(kv);
    else if (kv.key == "quality_threshold_min") s.quality_threshold_min = parse_one(kv);
    else if (kv.key == "quality_threshold_max") s.quality_threshold_max = parse_one(kv);
    else if (kv.key == "nms_iou_min") s.nms_iou_min = parse_one(kv);
    else if (kv.key == "nms_iou_max") s.nms_iou_max = parse_one(kv);
    else if (kv.key == "semantic_min_samples") s.semantic_min_samples = parse_list<int>(kv);
    else throw DataError(fmt::format("{}:{}: unknown search-space key '{}'", origin, kv.line, kv.key));
  }
  return s;
}

std::vector<Config> stage_a_grid(const Config& base, const SearchSpace& space) {
  std::vector<Config> out;
  for (double tb : space.tau_base) {
    for (double em : space.spatial_eps_multiplier) {
      for (double tt : space.tau_tile) {
        for (double se : space.semantic_eps) {
          Config c = base;
          c.tau_base = tb;
          c.spatial_eps_multiplier = em;
          c.tau_tile = tt;
          c.semantic_eps = se;
          out.push_back(c);
        }
      }
    }
  }
  return out;
}

std::vector<Config> stage_b_random(std::uint64_t seed, std::size_t n, const Config& best,
                                   const SearchSpace& space) {
  if (n < 1) throw std::invalid_argument("stage B needs at least one sample");
  if (space.semantic_min_samples.empty()) {
    throw std::invalid_argument("stage B needs at least one semantic_min_samples value");
  }
  Rng rng(derive_seed(seed, {0x53544147452d42ULL}));
  std::vector<Config> out;
  for (std::size_t i = 0; i < n; ++i) {
    Config c = best;
    c.beta = rng.uniform(space.beta_min, space.beta_max);
    c.quality_threshold = rng.uniform(space.quality_threshold_min, space.quality_threshold_max);
    c.nms_iou = rng.uniform(space.nms_iou_min, space.nms_iou_max);
    const auto k = rng.uniform_int(0, static_cast<long long>(space.semantic_min_samples.size()) - 1);
    c.semantic_min_samples = space.semantic_min_samples[static_cast<std::size_t>(k)];
    out.push_back(c);
  }
  return out;
}

std::vector<SearchResult> evaluate_configs(const std::vector<ImageCase>& cases,
                                           const std::vector<Config>& configs,
                                           const std::string& id_prefix, std::size_t workers) {
  std::vector<SearchResult> out;
  out.reserve(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const EvalReport rep = evaluate_config(cases, configs[i], workers);
    out.push_back(SearchResult{fmt::format("{}{:02d}", id_prefix, i + 1), configs[i],
                               rep.mean_precision, rep.mean_recall, rep.mean_f1,
                               rep.mean_total_latency()});
  }
  return out;
}

const SearchResult& best_by_f1(const std::vector<SearchResult>& results) {
  if (results.empty()) throw std::invalid_argument("no search results to rank");
  return *std::min_element(results.begin(), results.end(),
                           [](const SearchResult& a, const SearchResult& b) {
                             if (a.mean_f1 != b.mean_f1) return a.mean_f1 > b.mean_f1;
                             if (a.mean_recall != b.mean_recall) return a.mean_recall > b.mean_recall;
                             return a.config_id < b.config_id;
                           });
}

bool dominates(const SearchResult& a, const SearchResult& b) noexcept {
  return a.mean_precision >= b.mean_precision && a.mean_recall >= b.mean_recall &&
         (a.mean_precision > b.mean_precision || a.mean_recall > b.mean_recall);
}

std::vector<SearchResult> pareto_front(const std::vector<SearchResult>& results) {
  std::vector<SearchResult> front;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    bool keep = true;
    for (std::size_t j = 0; j < results.size() && keep; ++j) {
      if (i == j) continue;
      const auto& o = results[j];
      if (dominates(o, r)) keep = false;
      const bool same = o.mean_precision == r.mean_precision && o.mean_recall == r.mean_recall;
      if (same && (o.config_id < r.config_id || (o.config_id == r.config_id && j < i))) {
        keep = false;
      }
    }
    if (keep) front.push_back(r);
  }
  std::sort(front.begin(), front.end(), [](const SearchResult& a, const SearchResult& b) {
    if (a.mean_recall != b.mean_recall) return a.mean_recall > b.mean_recall;
    if (a.mean_precision != b.mean_precision) return a.mean_precision > b.mean_precision;
    return a.config_id < b.config_id;
  });
  return front;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

FiveNumber five_number_summary(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return FiveNumber{values.front(), quantile_sorted(values, 0.25), quantile_sorted(values, 0.5),
                    quantile_sorted(values, 0.75), values.back()};
}

std::vector<SensitivityGroup> sensitivity(const std::vector<SearchResult>& results,
                                          std::string_view param) {
  std::map<double, std::vector<double>> groups;
  for (const auto& r : results) {
    groups[config_field_value(r.config, param)].push_back(r.mean_f1);
  }
  if (results.empty()) (void)config_field_value(Config{}, param);  // still reject bad names
  std::vector<SensitivityGroup> out;
  for (auto& [value, f1s] : groups) {
    out.push_back(SensitivityGroup{value, f1s.size(), five_number_summary(f1s)});
  }
  return out;
}

TwoStageOutcome run_two_stage(const std::vector<ImageCase>& subset, const Config& base,
                              std::uint64_t seed, std::size_t n_stage_b,
                              const SearchSpace& space, std::size_t workers) {
  TwoStageOutcome out;
  out.stage_a = evaluate_configs(subset, stage_a_grid(base, space), "A", workers);
  out.best_a = best_by_f1(out.stage_a);
  out.stage_b = evaluate_configs(subset, stage_b_random(seed, n_stage_b, out.best_a.config, space),
                                 "B", workers);
  std::vector<SearchResult> all = out.stage_a;
  all.insert(all.end(), out.stage_b.begin(), out.stage_b.end());
  out.pareto = pareto_front(all);
  return out;
}

}  // namespace evgate
