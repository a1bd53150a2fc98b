#include "evgate/render.hpp"

#include <fmt/core.h>

#include "evgate/io.hpp"

namespace evgate::io {
namespace {

constexpr double kGap = 24.0;
constexpr double kHeader = 28.0;

void box(std::string& out, const BBox& b, const char* cls, const std::string& caption) {
  out += fmt::format(
      "    <rect class=\"{}\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\"/>\n",
      cls, b.x1, b.y1, b.width(), b.height());
  if (!caption.empty()) {
    out += fmt::format("    <text class=\"{}-text\" x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", cls,
                       b.x1, b.y1 - 2.0, caption);
  }
}

void panel(std::string& out, const ImageCase& image, const std::vector<Detection>& dets,
           const char* id, const char* title, double offset_x) {
  out += fmt::format("  <g id=\"{}\" transform=\"translate({:.2f},{:.2f})\">\n", id, offset_x,
                     kHeader);
  out += fmt::format("    <text class=\"title\" x=\"0\" y=\"-8\">{}</text>\n", title);
  out += fmt::format(
      "    <rect class=\"frame\" x=\"0\" y=\"0\" width=\"{}\" height=\"{}\"/>\n", image.width,
      image.height);
  for (const auto& g : image.gts) box(out, g.box, "gt", "");
  for (const auto& d : dets) {
    box(out, d.box, d.source.is_tile() ? "recovered" : "baseline",
        fmt::format("{} {:.2f}", d.label, d.adjusted_score));
  }
  out += "  </g>\n";
}

}  // namespace

std::string render_overlay_svg(const ImageCase& image, const std::vector<Detection>& baseline,
                               const std::vector<Detection>& pipeline) {
  const double w = 2.0 * image.width + kGap;
  const double h = image.height + kHeader;
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.0f} {:.0f}\">\n",
      w, h, w, h);
  out +=
      "  <style>\n"
      "    .frame { fill: #202020; stroke: none; }\n"
      "    .gt { fill: none; stroke: #33cc33; stroke-width: 1.5; stroke-dasharray: 4 2; }\n"
      "    .baseline { fill: none; stroke: #3399ff; stroke-width: 1.5; }\n"
      "    .recovered { fill: none; stroke: #ff8800; stroke-width: 2; }\n"
      "    .baseline-text { fill: #3399ff; font: 9px sans-serif; }\n"
      "    .recovered-text { fill: #ff8800; font: 9px sans-serif; }\n"
      "    .title { fill: #000000; font: bold 16px sans-serif; }\n"
      "  </style>\n";
  out += fmt::format("  <title>{}</title>\n", image.image_id);
  panel(out, image, baseline, "panel-baseline", "Baseline", 0.0);
  panel(out, image, pipeline, "panel-pipeline", "Full pipeline", image.width + kGap);
  out += "</svg>\n";
  return out;
}

void render_overlay(const ImageCase& image, const std::vector<Detection>& baseline,
                    const std::vector<Detection>& pipeline, const std::filesystem::path& path) {
  write_file(path, render_overlay_svg(image, baseline, pipeline));
}

}  // namespace evgate::io
