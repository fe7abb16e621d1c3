#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "mptrack/detector.hpp"
#include "mptrack/errors.hpp"
#include "mptrack/io.hpp"
#include "mptrack/metrics.hpp"
#include "mptrack/pipeline.hpp"
#include "mptrack/synth.hpp"

namespace fs = std::filesystem;
using namespace mptrack;

namespace {

Detection init_from(const std::vector<SequenceRecord>& records) {
  if (records.empty()) {
    throw ValidationError("sequence is empty");
  }
  if (!records.front().gt) {
    throw ValidationError(
        "first frame needs ground truth to initialize tracking");
  }
  const Box& b = records.front().gt->box;
  Detection d;
  d.x = b.x;
  d.y = b.y;
  d.w = b.w;
  d.h = b.h;
  d.confidence = 1.0;
  return d;
}

std::vector<SequenceRecord> load_records(const RunManifest& m,
                                         std::uint64_t seed) {
  if (!m.scenario_path.empty()) {
    ScenarioSpec spec = load_scenario(m.scenario_path);
    spec.seed = seed;  // one seed knob drives generation and tracking
    return generate(spec);
  }
  return load_sequence(m.correspondence_path, m.detection_path,
                       m.ground_truth_path);
}

TrackerConfig config_for(const RunManifest& m) {
  TrackerConfig cfg;
  if (!m.config_path.empty()) cfg = load_config(m.config_path);
  cfg.ablation = m.ablation;
  return cfg;
}

void ensure_parent_dir(const std::string& file_path) {
  const fs::path parent = fs::path(file_path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

MetricSet metrics_for(const std::vector<FrameResult>& results,
                      const std::vector<SequenceRecord>& records) {
  MetricSet m = evaluate(build_log(results, records));
  for (const FrameResult& r : results) {
    if (r.failure) ++m.failures;
  }
  return m;
}

int cmd_simulate(const std::string& spec_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed) {
  ScenarioSpec spec = load_scenario(spec_path);
  if (seed) spec.seed = *seed;
  const std::vector<SequenceRecord> records = generate(spec);

  fs::create_directories(out_dir);
  const fs::path out(out_dir);

  std::vector<CorrespondenceRecord> corr;
  std::vector<std::pair<int, Detection>> dets;
  std::vector<std::pair<int, GroundTruth>> gts;
  for (const SequenceRecord& rec : records) {
    corr.push_back({rec.frame_id, rec.ref_frame_id, rec.correspondences});
    if (rec.detection) dets.emplace_back(rec.frame_id, *rec.detection);
    if (rec.gt) gts.emplace_back(rec.frame_id, *rec.gt);
  }
  write_correspondences((out / "correspondences.jsonl").string(), corr);
  write_detections((out / "detections.jsonl").string(), dets);
  write_ground_truth((out / "ground_truth.jsonl").string(), gts);

  RunManifest m;
  m.correspondence_path = "correspondences.jsonl";
  m.detection_path = "detections.jsonl";
  m.ground_truth_path = "ground_truth.jsonl";
  m.out_dir = ".";
  m.seed = spec.seed;
  save_manifest((out / "manifest.json").string(), m);

  std::cout << "wrote " << records.size() << " frames to " << out_dir << " ("
            << dets.size() << " detections)\n";
  return 0;
}

int cmd_track(const std::string& manifest_path, const std::string& config_path,
              std::string out_path, std::optional<std::uint64_t> seed,
              std::optional<bool> md, std::optional<bool> mp,
              std::optional<bool> asr, std::optional<double> fixed_k) {
  RunManifest m = load_manifest(manifest_path);
  if (!config_path.empty()) m.config_path = config_path;
  const std::uint64_t eff_seed = seed ? *seed : m.seed;

  TrackerConfig cfg = config_for(m);
  if (md) cfg.ablation.motion_decouple = *md;
  if (mp) cfg.ablation.motion_prediction = *mp;
  if (asr) cfg.ablation.adaptive_search_region = *asr;
  if (fixed_k) cfg.ablation.fixed_k = *fixed_k;
  cfg.validate();

  const std::vector<SequenceRecord> records = load_records(m, eff_seed);
  const ReplaySource source = ReplaySource::from_records(records);
  const std::vector<FrameResult> results =
      run_sequence(records, init_from(records), cfg, source, eff_seed);

  if (out_path.empty()) {
    const fs::path dir = m.out_dir.empty() ? fs::path(".") : fs::path(m.out_dir);
    out_path = (dir / "results.jsonl").lexically_normal().string();
  }
  ensure_parent_dir(out_path);
  write_results(out_path, results);

  int failures = 0;
  for (const FrameResult& r : results) {
    if (r.failure) ++failures;
  }
  std::cout << "wrote " << out_path << " (" << results.size() << " frames, "
            << failures << " failures)\n";
  return 0;
}

int cmd_eval(const std::string& results_path, const std::string& gt_path,
             const std::string& out_path) {
  const std::vector<FrameResult> results = read_results(results_path);
  const std::vector<std::pair<int, GroundTruth>> gt =
      read_ground_truth(gt_path);

  std::unordered_map<int, GroundTruth> by_frame;
  for (const auto& [frame, g] : gt) by_frame[frame] = g;

  const PredictionLog log = build_log(results, gt);
  MetricSet tracker = evaluate(log);
  for (const FrameResult& r : results) {
    if (r.failure) ++tracker.failures;
  }

  // Reference predictor scored on the same frames: holds the previous true
  // position, zero velocity. What a detector with no motion model would use.
  PredictionLog base_log;
  for (const PredictionLogEntry& e : log.entries) {
    PredictionLogEntry b = e;
    if (!b.excluded) {
      auto prev = by_frame.find(e.frame_id - 1);
      if (prev == by_frame.end()) {
        throw ValidationError("eval: ground truth missing for frame " +
                              std::to_string(e.frame_id - 1));
      }
      b.predicted_pos = prev->second.box.center();
      b.predicted_vx = 0.0;
      b.predicted_vy = 0.0;
    }
    base_log.entries.push_back(b);
  }
  const MetricSet baseline = evaluate(base_log);

  std::string report =
      render_report({{"tracker", tracker}, {"zero-velocity", baseline}});
  const double ratio = baseline.position.mean > 1e-12
                           ? tracker.position.mean / baseline.position.mean
                           : 1.0;
  char line[96];
  std::snprintf(line, sizeof(line),
                "position error ratio (tracker/zero-velocity): %.3f\n", ratio);
  report += line;

  std::cout << report;
  if (!out_path.empty()) {
    ensure_parent_dir(out_path);
    write_text_file(out_path, report);
  }
  return 0;
}

int cmd_ablate(const std::string& manifest_path, const std::string& config_path,
               int seeds, std::optional<std::uint64_t> seed,
               std::optional<double> fixed_k, std::string out_dir) {
  if (seeds < 1) throw ValidationError("--seeds must be at least 1");
  RunManifest m = load_manifest(manifest_path);
  if (!config_path.empty()) m.config_path = config_path;
  const std::uint64_t base_seed = seed ? *seed : m.seed;

  TrackerConfig cfg = config_for(m);
  if (fixed_k) cfg.ablation.fixed_k = *fixed_k;

  if (out_dir.empty()) out_dir = m.out_dir.empty() ? "." : m.out_dir;
  fs::create_directories(out_dir);

  std::vector<std::pair<std::string, MetricSet>> rows;
  for (const AblationRow& row : ablation_grid()) {
    TrackerConfig row_cfg = cfg;
    row_cfg.ablation = row.flags;
    row_cfg.ablation.fixed_k = cfg.ablation.fixed_k;
    row_cfg.validate();

    std::vector<MetricSet> per_seed;
    for (int i = 0; i < seeds; ++i) {
      const std::uint64_t s = base_seed + static_cast<std::uint64_t>(i);
      const std::vector<SequenceRecord> records = load_records(m, s);
      const ReplaySource source = ReplaySource::from_records(records);
      const std::vector<FrameResult> results =
          run_sequence(records, init_from(records), row_cfg, source, s);
      per_seed.push_back(metrics_for(results, records));
      if (i == 0) {
        write_results((fs::path(out_dir) / ("results_" + row.name + ".jsonl"))
                          .lexically_normal()
                          .string(),
                      results);
      }
    }
    rows.emplace_back(row.name, aggregate(per_seed));
  }

  const std::string report = render_report(rows);
  write_text_file((fs::path(out_dir) / "ablation_report.txt").string(),
                  report);
  std::cout << report;
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{
      "Motion-prediction tracking core: synthetic scenarios, camera-motion "
      "decoupling, Kalman prediction, adaptive search regions"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand(
      "simulate", "Generate a synthetic sequence from a scenario spec");
  std::string sim_spec;
  std::string sim_out = ".";
  std::uint64_t sim_seed = 0;
  sim->add_option("--spec", sim_spec, "Scenario spec JSON path")->required();
  sim->add_option("--out", sim_out, "Output directory");
  auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "Generation seed");

  // track
  auto* trk = app.add_subcommand("track", "Run the tracker over a manifest");
  std::string trk_manifest;
  std::string trk_config;
  std::string trk_out;
  std::uint64_t trk_seed = 0;
  double trk_fixed_k = 0.0;
  trk->add_option("--manifest", trk_manifest, "Run manifest JSON path")
      ->required();
  trk->add_option("--config", trk_config, "Tracker config file");
  trk->add_option("--out", trk_out, "Results JSONL path");
  auto* trk_seed_opt = trk->add_option("--seed", trk_seed, "Run seed");
  auto* md_on = trk->add_flag("--md", "Enable camera-motion decoupling");
  auto* md_off = trk->add_flag("--no-md", "Disable camera-motion decoupling");
  auto* mp_on = trk->add_flag("--mp", "Enable motion prediction");
  auto* mp_off = trk->add_flag("--no-mp", "Disable motion prediction");
  auto* asr_on = trk->add_flag("--asr", "Enable the adaptive search region");
  auto* asr_off = trk->add_flag("--no-asr", "Use the fixed search region");
  auto* trk_k_opt = trk->add_option("--fixed-k", trk_fixed_k,
                                    "Region scale when the adaptive region "
                                    "is off");

  // eval
  auto* evl = app.add_subcommand(
      "eval", "Score a results file against ground truth");
  std::string evl_results;
  std::string evl_gt;
  std::string evl_out;
  evl->add_option("--results", evl_results, "Results JSONL path")->required();
  evl->add_option("--gt", evl_gt, "Ground-truth JSONL path")->required();
  evl->add_option("--out", evl_out, "Write the report here too");

  // ablate
  auto* abl = app.add_subcommand(
      "ablate", "Run the component on/off grid and aggregate metrics");
  std::string abl_manifest;
  std::string abl_config;
  std::string abl_out;
  int abl_seeds = 5;
  std::uint64_t abl_seed = 0;
  double abl_fixed_k = 0.0;
  abl->add_option("--manifest", abl_manifest, "Run manifest JSON path")
      ->required();
  abl->add_option("--config", abl_config, "Tracker config file");
  abl->add_option("--out", abl_out, "Output directory");
  abl->add_option("--seeds", abl_seeds, "Number of seeds to average over");
  auto* abl_seed_opt = abl->add_option("--seed", abl_seed, "First seed");
  auto* abl_k_opt = abl->add_option("--fixed-k", abl_fixed_k,
                                    "Region scale for rows without the "
                                    "adaptive region");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto opt_seed = [](const CLI::Option* o, std::uint64_t v) {
    return o->count() > 0 ? std::optional<std::uint64_t>(v) : std::nullopt;
  };

  if (sim->parsed()) {
    return cmd_simulate(sim_spec, sim_out, opt_seed(sim_seed_opt, sim_seed));
  }
  if (trk->parsed()) {
    auto tri = [](const CLI::Option* on, const CLI::Option* off,
                  const char* name) -> std::optional<bool> {
      if (on->count() > 0 && off->count() > 0) {
        throw ValidationError(std::string("--") + name + " and --no-" + name +
                              " are mutually exclusive");
      }
      if (on->count() > 0) return true;
      if (off->count() > 0) return false;
      return std::nullopt;
    };
    return cmd_track(trk_manifest, trk_config, trk_out,
                     opt_seed(trk_seed_opt, trk_seed), tri(md_on, md_off, "md"),
                     tri(mp_on, mp_off, "mp"), tri(asr_on, asr_off, "asr"),
                     trk_k_opt->count() > 0
                         ? std::optional<double>(trk_fixed_k)
                         : std::nullopt);
  }
  if (evl->parsed()) {
    return cmd_eval(evl_results, evl_gt, evl_out);
  }
  if (abl->parsed()) {
    return cmd_ablate(abl_manifest, abl_config, abl_seeds,
                      opt_seed(abl_seed_opt, abl_seed),
                      abl_k_opt->count() > 0
                          ? std::optional<double>(abl_fixed_k)
                          : std::nullopt,
                      abl_out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
