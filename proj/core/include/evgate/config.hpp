#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace evgate {

struct Toggles {
  bool tiling = true;
  bool spatial = true;
  bool semantic = true;
  bool reweighting = true;
  friend bool operator==(const Toggles&, const Toggles&) = default;
};

/// Every post-processing hyperparameter. Defaults are the reference setup:
/// 640 px tiles with 160 px overlap, tau_base 0.30 / tau_tile 0.15, spatial
/// eps 1.5x mean diagonal, semantic eps 0.35, min_samples 3 for both gates,
/// quality weights 0.7 / 0.3 with threshold 0.30, beta 0.1, NMS IoU 0.55.
struct Config {
  double tau_base = 0.30;
  double tau_tile = 0.15;
  int tile_size = 640;
  int tile_overlap = 160;
  double spatial_eps_multiplier = 1.5;
  int spatial_min_samples = 3;
  double semantic_eps = 0.35;
  int semantic_min_samples = 3;
  double quality_w1 = 0.7;
  double quality_w2 = 0.3;
  double quality_threshold = 0.30;
  double beta = 0.1;
  double nms_iou = 0.55;
  bool complete_coverage = true;
  bool tile_edge_filter = false;  // experimental, see PoolOptions
  Toggles toggles;
  std::uint64_t seed = 2025;

  /// Throws DataError naming the first offending field.
  void validate() const;

  friend bool operator==(const Config&, const Config&) = default;
};

/// Field names accepted in config files, in canonical order.
const std::vector<std::string>& config_field_names();

/// Numeric view of a field (booleans as 0/1). Throws DataError for an
/// unknown name.
double config_field_value(const Config& cfg, std::string_view name);

/// Parses `value` into the named field. Throws DataError on unknown names or
/// unparsable values.
void set_config_field(Config& cfg, std::string_view name, std::string_view value);

/// One `key = value` pair with its 1-based line number.
struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

/// Flat key-value text: one `key = value` per line, `#` starts a comment,
/// blank lines ignored. Throws DataError on lines without '='.
std::vector<KeyValue> parse_key_values(std::string_view text, std::string_view origin);

/// Defaults overlaid with the keys in `text`. Unknown keys are errors.
Config parse_config(std::string_view text, std::string_view origin = "<config>");

/// Loads a config file; the literal name "default" yields Config{}.
Config load_config(const std::string& path);

/// Canonical serialization; parse_config(to_config_text(c)) == c.
std::string to_config_text(const Config& cfg);

}  // namespace evgate
