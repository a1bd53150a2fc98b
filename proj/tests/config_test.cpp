#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "evgate/config.hpp"
#include "evgate/errors.hpp"

namespace evgate {
namespace {

TEST(Config, DefaultsAreValid) {
  const Config c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.tile_size, 640);
  EXPECT_EQ(c.tile_overlap, 160);
  EXPECT_EQ(c.seed, 2025u);
  EXPECT_TRUE(c.toggles.tiling && c.toggles.spatial && c.toggles.semantic && c.toggles.reweighting);
}

TEST(Config, TextRoundTrip) {
  Config c;
  c.tau_base = 0.275;
  c.semantic_eps = 0.123456789;
  c.tile_edge_filter = true;
  c.toggles.semantic = false;
  c.seed = 18446744073709551615ull;
  EXPECT_EQ(parse_config(to_config_text(c)), c);
  EXPECT_EQ(parse_config(to_config_text(Config{})), Config{});
}

TEST(Config, OverlaysDefaults) {
  const auto c = parse_config("# tuned\n beta = 0.2\n\nsemantic = false  # off\n");
  EXPECT_EQ(c.beta, 0.2);
  EXPECT_FALSE(c.toggles.semantic);
  EXPECT_EQ(c.nms_iou, Config{}.nms_iou);
}

TEST(Config, UnknownKeyNamesKeyAndLine) {
  try {
    parse_config("beta = 0.1\nbeta_x = 3\n", "cfg.txt");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("beta_x"), std::string::npos) << what;
    EXPECT_NE(what.find("cfg.txt:2"), std::string::npos) << what;
  }
}

TEST(Config, RejectsMalformedValues) {
  EXPECT_THROW(parse_config("beta = abc"), DataError);
  EXPECT_THROW(parse_config("tile_size = 6.5"), DataError);
  EXPECT_THROW(parse_config("tiling = maybe"), DataError);
  EXPECT_THROW(parse_config("no equals sign"), DataError);
  EXPECT_THROW(parse_config("tile_overlap = 640"), DataError);
  EXPECT_THROW(parse_config("nms_iou = 1.0"), DataError);
  EXPECT_THROW(parse_config("semantic_eps = 2.5"), DataError);
}

TEST(Config, FieldRegistry) {
  const auto& names = config_field_names();
  EXPECT_EQ(names.front(), "tau_base");
  EXPECT_EQ(names.back(), "seed");
  Config c;
  for (const auto& n : names) EXPECT_NO_THROW(config_field_value(c, n)) << n;
  set_config_field(c, "spatial_min_samples", "5");
  EXPECT_EQ(config_field_value(c, "spatial_min_samples"), 5.0);
  EXPECT_EQ(config_field_value(c, "tiling"), 1.0);
  EXPECT_THROW(config_field_value(c, "nope"), DataError);
}

TEST(Config, LoadDefaultAndFile) {
  EXPECT_EQ(load_config("default"), Config{});
  const auto path = std::filesystem::temp_directory_path() / "evgate_config_test.txt";
  {
    std::ofstream out(path);
    out << "quality_threshold = 0.35\n";
  }
  EXPECT_EQ(load_config(path.string()).quality_threshold, 0.35);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path.string()), DataError);
}

}  // namespace
}  // namespace evgate
