#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "evgate/evaluation.hpp"
#include "evgate/pipeline.hpp"
#include "evgate/search.hpp"

namespace evgate::io {

/// Version tag written in every file header. Readers reject any other value.
inline constexpr int kFormatVersion = 1;

// ---------------------------------------------------------------------------
// Case files (<image_id>.case.jsonl)
//
// One JSON object per line, fixed key order, reals printed with 6 decimals.
//   {"format":"evgate.case","version":1,"image_id":..,"width":..,"height":..,
//    "tile_size":..,"tile_overlap":..,"tiles":N,"gts":G,"dets":D}
//   {"record":"tile","index":i,"x":..,"y":..}                      N lines
//   {"record":"gt","x1":..,"y1":..,"x2":..,"y2":..,"label":..}     G lines
//   {"record":"det","image_id":..,"id":..,"x1":..,"y1":..,"x2":..,"y2":..,
//    "label":..,"score":..,"source":"baseline"|"tile:<i>"
//    [,"tile_origin_x":..,"tile_origin_y":..]}                    D lines
// Tile detections are stored in tile-local coordinates.
//
// Embedding files (<image_id>.emb.jsonl)
//   {"format":"evgate.embeddings","version":1,"image_id":..,"dimension":D,"count":N}
//   {"record":"emb","image_id":..,"detection_id":..,"v":[..D reals..]}
// Vectors are re-normalized on load.
// ---------------------------------------------------------------------------

void write_case(std::ostream& out, const ImageCase& c);
/// Throws DataError on version mismatch or malformed records. Embeddings are
/// not part of the case stream; see read_embeddings.
ImageCase read_case(std::istream& in, const std::string& origin = "<case>");

void write_embeddings(std::ostream& out, const std::string& image_id, const EmbeddingTable& t);
EmbeddingTable read_embeddings(std::istream& in, const std::string& origin = "<embeddings>");

/// Writes <dir>/<id>.case.jsonl and, when present, <dir>/<id>.emb.jsonl.
void save_case(const std::filesystem::path& dir, const ImageCase& c);
/// Loads a case and its embedding file if one exists next to it.
ImageCase load_case(const std::filesystem::path& case_file);

/// A benchmark directory: manifest.txt lists image ids in order.
void save_benchmark(const std::filesystem::path& dir, const std::vector<ImageCase>& cases);
std::vector<ImageCase> load_benchmark(const std::filesystem::path& dir);

/// Warnings for cases whose recorded tile grid differs from the config.
/// The case's own grid is always used by the pipeline.
std::vector<std::string> grid_mismatch_warnings(const std::vector<ImageCase>& cases,
                                                const Config& cfg);

// ---------------------------------------------------------------------------
// Detection result files (<image_id>.dets.jsonl), image coordinates.
//   {"format":"evgate.detections","version":1,"image_id":..,"count":N}
//   {"record":"det","image_id":..,"id":..,"x1":..,..,"label":..,"score":..,
//    "adjusted_score":..,"source":..}
// ---------------------------------------------------------------------------
void write_detections(std::ostream& out, const std::string& image_id,
                      const std::vector<Detection>& dets);
std::vector<Detection> read_detections(std::istream& in, const std::string& origin = "<dets>");

// ---------------------------------------------------------------------------
// VisDrone annotation text: x,y,w,h,score,category,truncation,occlusion
// ---------------------------------------------------------------------------
struct VisDroneAnnotations {
  std::vector<GroundTruthBox> boxes;
  std::size_t dropped_degenerate = 0;  // w <= 0 or h <= 0
  std::size_t dropped_ignored = 0;     // category 0 (ignored regions)
};

/// Throws DataError naming the line number of a malformed line.
VisDroneAnnotations parse_visdrone(std::istream& in, const std::string& origin = "<visdrone>");
VisDroneAnnotations load_visdrone_annotations(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Reports. Metric reports are deterministic; latency lives in separate files.
// ---------------------------------------------------------------------------
std::string report_text(const EvalReport& r, const std::string& title);
std::string report_json(const EvalReport& r, const std::string& title);
std::string latency_json(const std::vector<std::pair<std::string, StageTimings>>& rows);
std::string ablation_text(const std::vector<AblationRow>& rows);
std::string ablation_json(const std::vector<AblationRow>& rows);
std::string search_table_text(const std::vector<SearchResult>& ranked);
std::string search_results_json(const std::vector<SearchResult>& results);
std::string sensitivity_json(const std::vector<SearchResult>& results,
                             const std::vector<std::string>& params);

/// Writes text to a file, throwing DataError if it cannot be opened.
void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

}  // namespace evgate::io
