// evgate: command line front end for the detection post-processing library.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "evgate/config.hpp"
#include "evgate/errors.hpp"
#include "evgate/io.hpp"
#include "evgate/pipeline.hpp"
#include "evgate/render.hpp"
#include "evgate/search.hpp"
#include "evgate/synth.hpp"

namespace fs = std::filesystem;
using namespace evgate;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string config = "default";
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> workers;
  std::string cases = "bench";
};

struct Context {
  Config cfg;
  fs::path out;
  std::size_t workers = 1;
  fs::path cases_dir;
};

std::size_t workers_from_env() {
  const char* env = std::getenv("EVIDENCE_GATE_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) {
    throw UsageError(fmt::format("EVIDENCE_GATE_WORKERS must be a positive integer, got '{}'", env));
  }
  return static_cast<std::size_t>(v);
}

Context resolve(const GlobalOptions& g, bool needs_out) {
  if (needs_out && g.out.empty()) throw UsageError("--out is required for this command");
  Context ctx;
  ctx.cfg = load_config(g.config);
  if (g.seed) ctx.cfg.seed = *g.seed;
  ctx.out = g.out;
  ctx.workers = g.workers ? *g.workers : workers_from_env();
  ctx.cases_dir = g.cases;
  if (needs_out) fs::create_directories(ctx.out);
  return ctx;
}

std::vector<ImageCase> load_cases(const Context& ctx) {
  auto cases = io::load_benchmark(ctx.cases_dir);
  if (cases.empty()) {
    throw DataError(fmt::format("benchmark '{}' contains no cases", ctx.cases_dir.string()));
  }
  for (const auto& w : io::grid_mismatch_warnings(cases, ctx.cfg)) {
    std::cerr << "warning: " << w << "\n";
  }
  return cases;
}

std::vector<ImageCase> select(const std::vector<ImageCase>& cases,
                              const std::vector<std::string>& ids) {
  if (ids.empty()) return cases;
  std::vector<ImageCase> out;
  for (const auto& id : ids) {
    const auto it = std::find_if(cases.begin(), cases.end(),
                                 [&](const ImageCase& c) { return c.image_id == id; });
    if (it == cases.end()) throw DataError(fmt::format("no case with image id '{}'", id));
    out.push_back(*it);
  }
  return out;
}

void write_config_snapshot(const Context& ctx) {
  io::write_file(ctx.out / "config.txt", to_config_text(ctx.cfg));
}

void print_report_line(const std::string& name, const EvalReport& r) {
  fmt::print("{:<14} P {:.3f}  R {:.3f}  F1 {:.3f}  ({} images, {:.2f} ms/image)\n", name,
             r.mean_precision, r.mean_recall, r.mean_f1, r.per_image.size(),
             1e3 * r.mean_total_latency());
}

int cmd_synth(const GlobalOptions& g, std::size_t n_scenes) {
  const Context ctx = resolve(g, true);
  synth::BenchmarkSpec spec;
  spec.seed = ctx.cfg.seed;
  spec.n_scenes = n_scenes;
  spec.options = synth::case_options_for(ctx.cfg);
  const auto cases = synth::make_benchmark(spec, ctx.workers);
  io::save_benchmark(ctx.out, cases);
  fmt::print("wrote {} cases to {}\n", cases.size(), ctx.out.string());
  return 0;
}

int cmd_pipeline(const GlobalOptions& g) {
  const Context ctx = resolve(g, true);
  const auto cases = load_cases(ctx);
  const auto results = run_batch(cases, ctx.cfg, ctx.workers);
  std::vector<ImageMetrics> metrics;
  std::vector<StageTimings> timings;
  const fs::path dets_dir = ctx.out / "dets";
  fs::create_directories(dets_dir);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    metrics.push_back(evaluate_image(cases[i].image_id, results[i].detections, cases[i].gts));
    timings.push_back(results[i].timings);
    std::ostringstream buf;
    io::write_detections(buf, cases[i].image_id, results[i].detections);
    io::write_file(dets_dir / (cases[i].image_id + ".dets.jsonl"), buf.str());
  }
  const auto report = aggregate(std::move(metrics), timings);
  io::write_file(ctx.out / "report.txt", io::report_text(report, "pipeline"));
  io::write_file(ctx.out / "report.json", io::report_json(report, "pipeline"));
  io::write_file(ctx.out / "latency.json", io::latency_json({{"pipeline", report.stage_latency}}));
  write_config_snapshot(ctx);
  print_report_line("pipeline", report);
  return 0;
}

int cmd_eval(const GlobalOptions& g, const std::string& dets) {
  const Context ctx = resolve(g, true);
  const auto cases = load_cases(ctx);
  EvalReport report;
  if (dets.empty()) {
    report = evaluate_config(cases, ctx.cfg, ctx.workers);
  } else {
    std::vector<ImageMetrics> metrics;
    for (const auto& c : cases) {
      const fs::path file = fs::path(dets) / (c.image_id + ".dets.jsonl");
      std::istringstream in(io::read_file(file));
      metrics.push_back(evaluate_image(c.image_id, io::read_detections(in, file.string()), c.gts));
    }
    report = aggregate(std::move(metrics));
  }
  io::write_file(ctx.out / "eval.txt", io::report_text(report, "eval"));
  io::write_file(ctx.out / "eval.json", io::report_json(report, "eval"));
  print_report_line("eval", report);
  return 0;
}

int cmd_ablate(const GlobalOptions& g) {
  const Context ctx = resolve(g, true);
  const auto cases = load_cases(ctx);
  const auto rows = run_ablation(cases, ctx.cfg, ctx.workers);
  io::write_file(ctx.out / "ablation.txt", io::ablation_text(rows));
  io::write_file(ctx.out / "ablation.json", io::ablation_json(rows));
  std::vector<std::pair<std::string, StageTimings>> lat;
  for (const auto& r : rows) lat.emplace_back(r.name, r.report.stage_latency);
  io::write_file(ctx.out / "ablation_latency.json", io::latency_json(lat));
  write_config_snapshot(ctx);
  for (const auto& r : rows) print_report_line(r.name, r.report);
  return 0;
}

int cmd_search(const GlobalOptions& g, const std::string& space_file,
               const std::vector<std::string>& subset, std::size_t n_stage_b) {
  const Context ctx = resolve(g, true);
  SearchSpace space;
  if (!space_file.empty()) space = parse_search_space(io::read_file(space_file), space_file);
  const auto cases = select(load_cases(ctx), subset);
  const auto outcome = run_two_stage(cases, ctx.cfg, ctx.cfg.seed, n_stage_b, space, ctx.workers);

  std::vector<SearchResult> all = outcome.stage_a;
  all.insert(all.end(), outcome.stage_b.begin(), outcome.stage_b.end());

  Config base_cfg = ctx.cfg;
  base_cfg.toggles = Toggles{false, false, false, false};
  const auto base = evaluate_configs(cases, {base_cfg}, "Baseline", ctx.workers).front();
  std::vector<SearchResult> ranked = all;
  std::stable_sort(ranked.begin(), ranked.end(), [](const SearchResult& a, const SearchResult& b) {
    if (a.mean_f1 != b.mean_f1) return a.mean_f1 > b.mean_f1;
    if (a.mean_recall != b.mean_recall) return a.mean_recall > b.mean_recall;
    return a.config_id < b.config_id;
  });
  SearchResult base_row = base;
  base_row.config_id = "Baseline";
  ranked.insert(ranked.begin(), base_row);

  io::write_file(ctx.out / "stage_a.json", io::search_results_json(outcome.stage_a));
  io::write_file(ctx.out / "stage_b.json", io::search_results_json(outcome.stage_b));
  io::write_file(ctx.out / "pareto.json", io::search_results_json(outcome.pareto));
  io::write_file(ctx.out / "ranked.txt", io::search_table_text(ranked));
  io::write_file(ctx.out / "sensitivity.json",
                 io::sensitivity_json(all, {"tau_base", "spatial_eps_multiplier", "tau_tile",
                                            "semantic_eps", "beta", "quality_threshold",
                                            "nms_iou", "semantic_min_samples"}));
  std::vector<std::pair<std::string, StageTimings>> lat;
  for (const auto& r : all) lat.emplace_back(r.config_id, StageTimings{{"total", r.mean_time_s}});
  io::write_file(ctx.out / "search_latency.json", io::latency_json(lat));
  write_config_snapshot(ctx);

  fmt::print("stage A: {} configs, best {} (F1 {:.3f})\n", outcome.stage_a.size(),
             outcome.best_a.config_id, outcome.best_a.mean_f1);
  fmt::print("stage B: {} configs; Pareto front has {} points\n", outcome.stage_b.size(),
             outcome.pareto.size());
  return 0;
}

int cmd_render(const GlobalOptions& g, const std::vector<std::string>& images) {
  const Context ctx = resolve(g, true);
  const auto cases = select(load_cases(ctx), images);
  Config base_cfg = ctx.cfg;
  base_cfg.toggles = Toggles{false, false, false, false};
  for (const auto& c : cases) {
    const auto baseline = run_pipeline(c, base_cfg, nullptr).detections;
    const auto full = run_pipeline(c, ctx.cfg).detections;
    io::render_overlay(c, baseline, full, ctx.out / (c.image_id + ".svg"));
  }
  fmt::print("rendered {} overlays to {}\n", cases.size(), ctx.out.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detection post-processing: tiling, evidence gating and class-wise NMS", "evgate"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  GlobalOptions g;
  app.add_option("--config", g.config, "Config file, or 'default'")->capture_default_str();
  app.add_option("--seed", g.seed, "Override the config seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--workers", g.workers, "Worker threads (falls back to EVIDENCE_GATE_WORKERS)")
      ->check(CLI::PositiveNumber);
  app.add_option("--cases", g.cases, "Benchmark directory to read")->capture_default_str();

  std::size_t n_scenes = 50;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic benchmark");
  synth_cmd->add_option("--scenes", n_scenes, "Number of scenes")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run one config and write reports");

  std::string dets_dir;
  auto* eval_cmd = app.add_subcommand("eval", "Metrics only, optionally for saved detections");
  eval_cmd->add_option("--dets", dets_dir, "Directory of <id>.dets.jsonl files");

  auto* ablate_cmd = app.add_subcommand("ablate", "Cumulative ablation ladder");

  std::string space_file;
  std::vector<std::string> subset;
  std::size_t n_stage_b = 18;
  auto* search_cmd = app.add_subcommand("search", "Two-stage parameter search");
  search_cmd->add_option("--space", space_file, "Search-space override file");
  search_cmd->add_option("--subset", subset, "Image ids to search on (default: all)")
      ->delimiter(',');
  search_cmd->add_option("--stage-b", n_stage_b, "Number of Stage-B samples")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  std::vector<std::string> images;
  auto* render_cmd = app.add_subcommand("render", "SVG overlays, baseline vs full pipeline");
  render_cmd->add_option("--image", images, "Image ids to render (default: all)")
      ->delimiter(',');

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();
  const std::string usage = app.help();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*synth_cmd) return cmd_synth(g, n_scenes);
    if (*pipeline_cmd) return cmd_pipeline(g);
    if (*eval_cmd) return cmd_eval(g, dets_dir);
    if (*ablate_cmd) return cmd_ablate(g);
    if (*search_cmd) return cmd_search(g, space_file, subset, n_stage_b);
    if (*render_cmd) return cmd_render(g, images);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << usage;
    return kUsageError;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsageError;
}
