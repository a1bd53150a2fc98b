#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "evgate/pipeline.hpp"

namespace evgate::io {

/// Side-by-side SVG: the left panel shows baseline-only output, the right
/// panel the full pipeline. Ground truth is drawn in both panels with class
/// "gt"; baseline-sourced boxes use class "baseline" and tile-sourced
/// survivors use class "recovered". Each box carries a "label score" caption.
std::string render_overlay_svg(const ImageCase& image, const std::vector<Detection>& baseline,
                               const std::vector<Detection>& pipeline);

/// Writes render_overlay_svg to `path`; throws DataError if unwritable.
void render_overlay(const ImageCase& image, const std::vector<Detection>& baseline,
                    const std::vector<Detection>& pipeline, const std::filesystem::path& path);

}  // namespace evgate::io
