#include "evgate/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "evgate/errors.hpp"

namespace evgate::io {
namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kCaseFormat = "evgate.case";
constexpr const char* kEmbeddingFormat = "evgate.embeddings";
constexpr const char* kDetectionFormat = "evgate.detections";

std::string real(double v) { return fmt::format("{:.6f}", v); }

void check_image_id(const std::string& id) {
  const bool ok = !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) != 0 || c == '_' || c == '-' || c == '.';
  });
  if (!ok) throw DataError(fmt::format("image id '{}' must match [A-Za-z0-9._-]+", id));
}

/// Reads non-empty lines as JSON objects, remembering line numbers.
class LineReader {
 public:
  LineReader(std::istream& in, std::string origin) : in_(in), origin_(std::move(origin)) {}

  bool next(json& out) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        out = json::parse(line);
      } catch (const json::exception& e) {
        fail(fmt::format("not valid JSON ({})", e.what()));
      }
      if (!out.is_object()) fail("expected a JSON object");
      return true;
    }
    return false;
  }

  json require() {
    json j;
    if (!next(j)) fail("unexpected end of file");
    return j;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(fmt::format("{}:{}: {}", origin_, line_no_, what));
  }

  template <typename T>
  T get(const json& j, const char* key) const {
    auto it = j.find(key);
    if (it == j.end()) fail(fmt::format("missing field '{}'", key));
    try {
      return it->get<T>();
    } catch (const json::exception&) {
      fail(fmt::format("field '{}' has the wrong type", key));
    }
  }

  void header(const json& j, const char* format) const {
    if (get<std::string>(j, "format") != format) {
      fail(fmt::format("expected a '{}' header", format));
    }
    const int version = get<int>(j, "version");
    if (version != kFormatVersion) {
      fail(fmt::format("format version {} is not supported (expected {})", version,
                       kFormatVersion));
    }
  }

  void record(const json& j, const char* kind) const {
    if (get<std::string>(j, "record") != kind) fail(fmt::format("expected a '{}' record", kind));
  }

 private:
  std::istream& in_;
  std::string origin_;
  int line_no_ = 0;
};

BBox read_box(const LineReader& r, const json& j) {
  const BBox b{r.get<double>(j, "x1"), r.get<double>(j, "y1"), r.get<double>(j, "x2"),
               r.get<double>(j, "y2")};
  if (!b.valid()) r.fail("degenerate or non-finite box");
  return b;
}

std::string box_fields(const BBox& b) {
  return fmt::format("\"x1\":{},\"y1\":{},\"x2\":{},\"y2\":{}", real(b.x1), real(b.y1),
                     real(b.x2), real(b.y2));
}

}  // namespace

void write_case(std::ostream& out, const ImageCase& c) {
  check_image_id(c.image_id);
  std::size_t n_dets = c.baseline_dets.size();
  for (const auto& t : c.tile_dets) n_dets += t.detections.size();
  out << fmt::format(
      "{{\"format\":\"{}\",\"version\":{},\"image_id\":\"{}\",\"width\":{},\"height\":{},"
      "\"tile_size\":{},\"tile_overlap\":{},\"tiles\":{},\"gts\":{},\"dets\":{}}}\n",
      kCaseFormat, kFormatVersion, c.image_id, c.width, c.height, c.tile_size, c.tile_overlap,
      c.tile_dets.size(), c.gts.size(), n_dets);
  for (std::size_t t = 0; t < c.tile_dets.size(); ++t) {
    out << fmt::format("{{\"record\":\"tile\",\"index\":{},\"x\":{},\"y\":{}}}\n", t,
                       real(c.tile_dets[t].origin.x), real(c.tile_dets[t].origin.y));
  }
  for (const auto& g : c.gts) {
    out << fmt::format("{{\"record\":\"gt\",{},\"label\":{}}}\n", box_fields(g.box), g.label);
  }
  const auto det_line = [&](const Detection& d, const TileOrigin* origin) {
    out << fmt::format("{{\"record\":\"det\",\"image_id\":\"{}\",\"id\":{},{},\"label\":{},"
                       "\"score\":{},\"source\":\"{}\"",
                       c.image_id, d.id, box_fields(d.box), d.label, real(d.score),
                       d.source.to_string());
    if (origin != nullptr) {
      out << fmt::format(",\"tile_origin_x\":{},\"tile_origin_y\":{}", real(origin->x),
                         real(origin->y));
    }
    out << "}\n";
  };
  for (const auto& d : c.baseline_dets) det_line(d, nullptr);
  for (const auto& t : c.tile_dets) {
    for (const auto& d : t.detections) det_line(d, &t.origin);
  }
}

ImageCase read_case(std::istream& in, const std::string& origin) {
  LineReader r(in, origin);
  const json head = r.require();
  r.header(head, kCaseFormat);
  ImageCase c;
  c.image_id = r.get<std::string>(head, "image_id");
  c.width = r.get<int>(head, "width");
  c.height = r.get<int>(head, "height");
  c.tile_size = r.get<int>(head, "tile_size");
  c.tile_overlap = r.get<int>(head, "tile_overlap");
  const auto n_tiles = r.get<std::size_t>(head, "tiles");
  const auto n_gts = r.get<std::size_t>(head, "gts");
  const auto n_dets = r.get<std::size_t>(head, "dets");

  for (std::size_t t = 0; t < n_tiles; ++t) {
    const json j = r.require();
    r.record(j, "tile");
    if (r.get<std::size_t>(j, "index") != t) r.fail("tile records must be in index order");
    c.tile_dets.push_back(TileDetections{{r.get<double>(j, "x"), r.get<double>(j, "y")}, {}});
  }
  for (std::size_t g = 0; g < n_gts; ++g) {
    const json j = r.require();
    r.record(j, "gt");
    c.gts.push_back(GroundTruthBox{read_box(r, j), r.get<int>(j, "label")});
  }
  for (std::size_t k = 0; k < n_dets; ++k) {
    const json j = r.require();
    r.record(j, "det");
    Source src;
    try {
      src = Source::parse(r.get<std::string>(j, "source"));
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
    const double score = r.get<double>(j, "score");
    if (!(score >= 0.0 && score <= 1.0)) r.fail("score outside [0,1]");
    const Detection d = Detection{read_box(r, j), r.get<int>(j, "label"), score, score, src,
                                  r.get<DetectionId>(j, "id")};
    if (!src.is_tile()) {
      c.baseline_dets.push_back(d);
      continue;
    }
    if (src.tile_index >= c.tile_dets.size()) r.fail("detection refers to an unknown tile");
    const TileOrigin o{r.get<double>(j, "tile_origin_x"), r.get<double>(j, "tile_origin_y")};
    if (std::abs(o.x - c.tile_dets[src.tile_index].origin.x) > 1e-6 ||
        std::abs(o.y - c.tile_dets[src.tile_index].origin.y) > 1e-6) {
      r.fail("detection tile origin disagrees with the tile record");
    }
    c.tile_dets[src.tile_index].detections.push_back(d);
  }
  json extra;
  if (r.next(extra)) r.fail("trailing records after the declared counts");
  c.validate();
  return c;
}

void write_embeddings(std::ostream& out, const std::string& image_id, const EmbeddingTable& t) {
  check_image_id(image_id);
  out << fmt::format(
      "{{\"format\":\"{}\",\"version\":{},\"image_id\":\"{}\",\"dimension\":{},\"count\":{}}}\n",
      kEmbeddingFormat, kFormatVersion, image_id, t.dimension(), t.size());
  std::string line;
  for (const auto& [id, v] : t.entries()) {
    line = fmt::format("{{\"record\":\"emb\",\"image_id\":\"{}\",\"detection_id\":{},\"v\":[",
                       image_id, id);
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k) line += ',';
      line += real(v[k]);
    }
    line += "]}\n";
    out << line;
  }
}

EmbeddingTable read_embeddings(std::istream& in, const std::string& origin) {
  LineReader r(in, origin);
  const json head = r.require();
  r.header(head, kEmbeddingFormat);
  const auto dim = r.get<std::size_t>(head, "dimension");
  const auto count = r.get<std::size_t>(head, "count");
  EmbeddingTable table(dim);
  for (std::size_t k = 0; k < count; ++k) {
    const json j = r.require();
    r.record(j, "emb");
    const auto v = r.get<std::vector<double>>(j, "v");
    if (v.size() != dim) r.fail(fmt::format("vector has {} values, expected {}", v.size(), dim));
    try {
      table.insert(r.get<DetectionId>(j, "detection_id"), v);
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
  }
  json extra;
  if (r.next(extra)) r.fail("trailing records after the declared count");
  return table;
}

void save_case(const fs::path& dir, const ImageCase& c) {
  fs::create_directories(dir);
  std::ostringstream buf;
  write_case(buf, c);
  write_file(dir / (c.image_id + ".case.jsonl"), buf.str());
  if (c.embeddings) {
    std::ostringstream eb;
    write_embeddings(eb, c.image_id, *c.embeddings);
    write_file(dir / (c.image_id + ".emb.jsonl"), eb.str());
  }
}

ImageCase load_case(const fs::path& case_file) {
  std::ifstream in(case_file);
  if (!in) throw DataError(fmt::format("cannot open case file '{}'", case_file.string()));
  ImageCase c = read_case(in, case_file.string());
  const fs::path emb = case_file.parent_path() / (c.image_id + ".emb.jsonl");
  if (fs::exists(emb)) {
    std::ifstream ein(emb);
    c.embeddings = std::make_shared<EmbeddingTable>(read_embeddings(ein, emb.string()));
  }
  return c;
}

void save_benchmark(const fs::path& dir, const std::vector<ImageCase>& cases) {
  fs::create_directories(dir);
  std::string manifest = fmt::format("# evgate benchmark manifest v{}\n", kFormatVersion);
  for (const auto& c : cases) {
    save_case(dir, c);
    manifest += c.image_id + "\n";
  }
  write_file(dir / "manifest.txt", manifest);
}

std::vector<ImageCase> load_benchmark(const fs::path& dir) {
  const fs::path manifest = dir / "manifest.txt";
  if (!fs::exists(manifest)) {
    throw DataError(fmt::format("'{}' has no manifest.txt", dir.string()));
  }
  std::istringstream in(read_file(manifest));
  std::string line;
  std::getline(in, line);
  if (line != fmt::format("# evgate benchmark manifest v{}", kFormatVersion)) {
    throw DataError(fmt::format("'{}': unsupported manifest header", manifest.string()));
  }
  std::vector<ImageCase> cases;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    cases.push_back(load_case(dir / (line + ".case.jsonl")));
  }
  return cases;
}

std::vector<std::string> grid_mismatch_warnings(const std::vector<ImageCase>& cases,
                                                const Config& cfg) {
  std::vector<std::string> out;
  for (const auto& c : cases) {
    if (c.tile_size != cfg.tile_size || c.tile_overlap != cfg.tile_overlap) {
      out.push_back(fmt::format(
          "case '{}' was cached with tile {}/{} but the config asks for {}/{}; using the "
          "case's grid",
          c.image_id, c.tile_size, c.tile_overlap, cfg.tile_size, cfg.tile_overlap));
    }
  }
  return out;
}

void write_detections(std::ostream& out, const std::string& image_id,
                      const std::vector<Detection>& dets) {
  check_image_id(image_id);
  out << fmt::format("{{\"format\":\"{}\",\"version\":{},\"image_id\":\"{}\",\"count\":{}}}\n",
                     kDetectionFormat, kFormatVersion, image_id, dets.size());
  for (const auto& d : dets) {
    out << fmt::format(
        "{{\"record\":\"det\",\"image_id\":\"{}\",\"id\":{},{},\"label\":{},\"score\":{},"
        "\"adjusted_score\":{},\"source\":\"{}\"}}\n",
        image_id, d.id, box_fields(d.box), d.label, real(d.score), real(d.adjusted_score),
        d.source.to_string());
  }
}

std::vector<Detection> read_detections(std::istream& in, const std::string& origin) {
  LineReader r(in, origin);
  const json head = r.require();
  r.header(head, kDetectionFormat);
  const auto count = r.get<std::size_t>(head, "count");
  std::vector<Detection> out;
  for (std::size_t k = 0; k < count; ++k) {
    const json j = r.require();
    r.record(j, "det");
    Detection d;
    d.box = read_box(r, j);
    d.label = r.get<int>(j, "label");
    d.score = r.get<double>(j, "score");
    d.adjusted_score = j.contains("adjusted_score") ? r.get<double>(j, "adjusted_score") : d.score;
    d.id = r.get<DetectionId>(j, "id");
    try {
      d.source = Source::parse(r.get<std::string>(j, "source"));
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
    out.push_back(d);
  }
  return out;
}

VisDroneAnnotations parse_visdrone(std::istream& in, const std::string& origin) {
  VisDroneAnnotations out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    // Some exports end each line with a trailing comma.
    if (!fields.empty() && fields.back().find_first_not_of(" \t") == std::string::npos) {
      fields.pop_back();
    }
    if (fields.size() != 8) {
      throw DataError(fmt::format("{}:{}: expected 8 comma-separated fields, found {}", origin,
                                  line_no, fields.size()));
    }
    double v[8];
    for (int k = 0; k < 8; ++k) {
      std::size_t used = 0;
      try {
        v[k] = std::stod(fields[k], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || fields[k].find_first_not_of(" \t", used) != std::string::npos) {
        throw DataError(fmt::format("{}:{}: field {} ('{}') is not a number", origin, line_no,
                                    k + 1, fields[k]));
      }
    }
    const double x = v[0], y = v[1], w = v[2], h = v[3];
    const int category = static_cast<int>(v[5]);
    if (w <= 0.0 || h <= 0.0) {
      ++out.dropped_degenerate;
      continue;
    }
    if (category == 0) {
      ++out.dropped_ignored;
      continue;
    }
    out.boxes.push_back(GroundTruthBox{BBox{x, y, x + w, y + h}, category});
  }
  return out;
}

VisDroneAnnotations load_visdrone_annotations(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open annotation file '{}'", path.string()));
  return parse_visdrone(in, path.string());
}

std::string report_text(const EvalReport& r, const std::string& title) {
  std::string out = fmt::format("# {}\n", title);
  out += fmt::format("images {}\nmean_precision {:.6f}\nmean_recall {:.6f}\nmean_f1 {:.6f}\n",
                     r.per_image.size(), r.mean_precision, r.mean_recall, r.mean_f1);
  out += "image_id tp fp fn precision recall f1\n";
  for (const auto& m : r.per_image) {
    out += fmt::format("{} {} {} {} {:.6f} {:.6f} {:.6f}\n", m.image_id, m.tp, m.fp, m.fn,
                       m.precision, m.recall, m.f1);
  }
  return out;
}

namespace {

ojson report_object(const EvalReport& r) {
  ojson j;
  j["images"] = r.per_image.size();
  j["mean_precision"] = r.mean_precision;
  j["mean_recall"] = r.mean_recall;
  j["mean_f1"] = r.mean_f1;
  ojson per = ojson::array();
  for (const auto& m : r.per_image) {
    per.push_back(ojson{{"image_id", m.image_id}, {"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn},
                        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}});
  }
  j["per_image"] = std::move(per);
  return j;
}

ojson config_object(const Config& c) {
  ojson j;
  for (const auto& name : config_field_names()) j[name] = config_field_value(c, name);
  return j;
}

}  // namespace

std::string report_json(const EvalReport& r, const std::string& title) {
  ojson j;
  j["format"] = "evgate.report";
  j["version"] = kFormatVersion;
  j["title"] = title;
  j.update(report_object(r));
  return j.dump(2) + "\n";
}

std::string latency_json(const std::vector<std::pair<std::string, StageTimings>>& rows) {
  ojson j;
  j["format"] = "evgate.latency";
  j["version"] = kFormatVersion;
  j["unit"] = "seconds_per_image";
  ojson arr = ojson::array();
  for (const auto& [name, t] : rows) {
    ojson stages;
    double total = 0.0;
    for (const auto& [stage, s] : t) {
      stages[stage] = s;
      total += s;
    }
    arr.push_back(ojson{{"name", name}, {"stages", stages}, {"total", total}});
  }
  j["rows"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::string ablation_text(const std::vector<AblationRow>& rows) {
  std::string out = fmt::format("{:<14}{:>11}{:>11}{:>11}\n", "Configuration", "Precision",
                                "Recall", "F1-score");
  for (const auto& row : rows) {
    out += fmt::format("{:<14}{:>11.3f}{:>11.3f}{:>11.3f}\n", row.name, row.report.mean_precision,
                       row.report.mean_recall, row.report.mean_f1);
  }
  return out;
}

std::string ablation_json(const std::vector<AblationRow>& rows) {
  ojson j;
  j["format"] = "evgate.ablation";
  j["version"] = kFormatVersion;
  ojson arr = ojson::array();
  for (const auto& row : rows) {
    ojson o;
    o["name"] = row.name;
    o["toggles"] = ojson{{"tiling", row.config.toggles.tiling},
                         {"spatial", row.config.toggles.spatial},
                         {"semantic", row.config.toggles.semantic},
                         {"reweighting", row.config.toggles.reweighting}};
    o.update(report_object(row.report));
    arr.push_back(std::move(o));
  }
  j["rows"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::string search_table_text(const std::vector<SearchResult>& ranked) {
  std::string out = fmt::format("{:<14}{:>11}{:>11}{:>11}  {}\n", "Configuration", "Precision",
                                "Recall", "F1-score", "settings");
  for (const auto& r : ranked) {
    const Config& c = r.config;
    out += fmt::format(
        "{:<14}{:>11.3f}{:>11.3f}{:>11.3f}  tau_base={} eps_mult={} tau_tile={} sem_eps={} "
        "beta={:.4f} q_thr={:.4f} nms_iou={:.4f} sem_min={}\n",
        r.config_id, r.mean_precision, r.mean_recall, r.mean_f1, c.tau_base,
        c.spatial_eps_multiplier, c.tau_tile, c.semantic_eps, c.beta, c.quality_threshold,
        c.nms_iou, c.semantic_min_samples);
  }
  return out;
}

std::string search_results_json(const std::vector<SearchResult>& results) {
  ojson j;
  j["format"] = "evgate.search";
  j["version"] = kFormatVersion;
  ojson arr = ojson::array();
  for (const auto& r : results) {
    arr.push_back(ojson{{"config_id", r.config_id},
                        {"mean_precision", r.mean_precision},
                        {"mean_recall", r.mean_recall},
                        {"mean_f1", r.mean_f1},
                        {"config", config_object(r.config)}});
  }
  j["results"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::string sensitivity_json(const std::vector<SearchResult>& results,
                             const std::vector<std::string>& params) {
  ojson j;
  j["format"] = "evgate.sensitivity";
  j["version"] = kFormatVersion;
  ojson by_param;
  for (const auto& p : params) {
    ojson arr = ojson::array();
    for (const auto& g : sensitivity(results, p)) {
      arr.push_back(ojson{{"value", g.value},   {"count", g.count},   {"min", g.f1.min},
                          {"q1", g.f1.q1},      {"median", g.f1.median}, {"q3", g.f1.q3},
                          {"max", g.f1.max}});
    }
    by_param[p] = std::move(arr);
  }
  j["parameters"] = std::move(by_param);
  return j.dump(2) + "\n";
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw DataError(fmt::format("failed while writing '{}'", path.string()));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace evgate::io
