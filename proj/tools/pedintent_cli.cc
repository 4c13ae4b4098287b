/*
 * Copyright 2026 The pedintent Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// pedintent: train, classify, eval, bench, gen, calibrate, validate.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
// PEDINTENT_LOG selects stderr verbosity (error, warn, info, debug).

#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pedintent/error.h"
#include "pedintent/eval.h"
#include "pedintent/geometry.h"
#include "pedintent/id3.h"
#include "pedintent/io.h"
#include "pedintent/kinematics.h"
#include "pedintent/pipeline.h"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace pedintent;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

LogLevel CurrentLogLevel() {
  static const LogLevel level = [] {
    const char* env = std::getenv("PEDINTENT_LOG");
    const std::string v = env ? env : "";
    if (v == "error") return LogLevel::kError;
    if (v == "info") return LogLevel::kInfo;
    if (v == "debug") return LogLevel::kDebug;
    return LogLevel::kWarn;
  }();
  return level;
}

void Log(LogLevel level, const std::string& msg) {
  static constexpr const char* kNames[] = {"error", "warn", "info", "debug"};
  if (level <= CurrentLogLevel()) {
    std::cerr << "[" << kNames[static_cast<int>(level)] << "] " << msg << '\n';
  }
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config_path;
  std::string tree_path;
  double horizon_s = 0.0;  // 0 = from config
};

pipeline::PipelineConfig EffectiveConfig(const CommonOptions& o) {
  pipeline::PipelineConfig cfg;
  if (!o.config_path.empty()) {
    cfg = io::LoadConfig(o.config_path);
    if (!cfg.tree_path.empty() && fs::path(cfg.tree_path).is_relative()) {
      cfg.tree_path = (fs::path(o.config_path).parent_path() / cfg.tree_path).string();
    }
  }
  if (!o.tree_path.empty()) cfg.tree_path = o.tree_path;
  if (o.horizon_s > 0.0) cfg.horizon_s = o.horizon_s;
  cfg.Validate();
  return cfg;
}

std::shared_ptr<const id3::TreeNode> RequireTree(const pipeline::PipelineConfig& cfg) {
  if (cfg.tree_path.empty()) throw UsageError("no tree given (use --tree or tree_path in config)");
  return std::make_shared<const id3::TreeNode>(id3::LoadTreeFile(cfg.tree_path));
}

json LatencyJson(const eval::LatencyStats& s) {
  return json{{"samples", s.samples},
              {"mean", s.mean_us},
              {"p50", s.p50_us},
              {"p95", s.p95_us},
              {"max", s.max_us}};
}

// Worst case over every classified frame, so the figure bounds all paths.
std::size_t MaxOpsPerPrediction(std::span<const pipeline::FrameResult> results,
                                const id3::TreeNode& tree, const pipeline::PipelineConfig& cfg) {
  std::size_t worst = 0;
  for (const auto& r : results) {
    if (!r.v_mid || !r.phi_deg || !r.mid || !r.discrete) continue;
    const auto ops = eval::CountOps({r.v_mid->vx, r.v_mid->vy, *r.phi_deg}, tree, cfg, *r.mid);
    worst = std::max(worst, ops.Total());
  }
  return worst;
}

void WriteTextFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidConfig, "cannot write " + path.string());
  out << text;
}

// ---------------------------------------------------------------- train

int RunTrain(const CommonOptions& common, const std::vector<std::string>& inputs,
             const std::string& out_path) {
  if (inputs.empty()) throw UsageError("train needs at least one input file");
  const auto cfg = EffectiveConfig(common);
  id3::Dataset samples;
  for (const auto& path : inputs) {
    const auto frames = io::ReadLandmarkFile(path);
    const auto file_samples = pipeline::LabeledSamples(frames, cfg);
    if (file_samples.empty()) {
      throw Error(ErrorCode::kEmptyDataset, path + ": no labelable frames");
    }
    Log(LogLevel::kInfo, fmt::format("{}: {} samples", path, file_samples.size()));
    samples.insert(samples.end(), file_samples.begin(), file_samples.end());
  }
  const id3::GainReport gains = id3::ComputeGains(samples);
  const id3::TreeNode tree = id3::BuildTree(samples);
  id3::SaveTreeFile(tree, out_path);

  json ranking = json::array();
  for (auto a : gains.Ranking()) ranking.push_back(features::AttributeName(a));
  json report{
      {"samples", samples.size()},
      {"gains", {{"vx", gains.Of(features::Attribute::kVx)},
                 {"vy", gains.Of(features::Attribute::kVy)},
                 {"phi", gains.Of(features::Attribute::kPhi)}}},
      {"ranking", ranking},
      {"root", tree.is_leaf() ? json(nullptr)
                              : json(features::AttributeName(tree.split().attribute))},
      {"depth", id3::Depth(tree)},
      {"tree", out_path},
      {"config", io::ConfigToJson(cfg)},
  };
  std::cout << report.dump(2) << '\n';
  return 0;
}

// ------------------------------------------------------------- classify

int RunClassify(const CommonOptions& common, const std::string& input, const std::string& out_path,
                int variant, const std::string& format, bool omit_latency) {
  if (variant < 1 || variant > 3) throw UsageError("--variant must be 1, 2 or 3");
  auto cfg = EffectiveConfig(common);
  cfg.emit_path = variant == 2;
  const auto tree = RequireTree(cfg);

  std::ifstream file_in;
  std::istream* in = &std::cin;
  if (input != "-") {
    file_in.open(input);
    if (!file_in) throw Error(ErrorCode::kMalformedInput, "cannot open " + input);
    in = &file_in;
  }
  std::ofstream file_out;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file_out.open(out_path, std::ios::binary);
    if (!file_out) throw Error(ErrorCode::kInvalidConfig, "cannot write " + out_path);
    out = &file_out;
  }

  io::OutputOptions options;
  options.variant = static_cast<io::Variant>(variant);
  options.format = format == "jsonl" ? io::OutputFormat::kJsonl : io::OutputFormat::kCsv;
  options.include_latency = !omit_latency;
  io::ResultWriter writer(*out, options);
  writer.WriteHeader();

  pipeline::Pipeline pipeline(cfg, tree);
  std::size_t frame_index = 0;
  auto source = io::JsonlSource(*in);
  const pipeline::FrameSource logged = [&]() {
    auto item = source();
    if (item) {
      ++frame_index;
      if (!item->frame) Log(LogLevel::kWarn, fmt::format("frame {}: {}", frame_index, item->error));
    }
    return item;
  };
  pipeline::RunStream(logged, pipeline, [&](const pipeline::FrameResult& r) {
    if (r.skipped == pipeline::SkipReason::kNonMonotonic) {
      Log(LogLevel::kWarn, fmt::format("frame {}: timestamp out of order", frame_index));
    }
    writer.Write(r);
  });
  out->flush();
  return 0;
}

// ----------------------------------------------------------------- eval

struct EvalOptions {
  std::vector<std::string> inputs;
  int synthetic_seeds = 0;
  double noise = 3.0;
  std::uint64_t seed = 7;
  double margin_px = 50.0;
  std::string out_dir;
};

int RunEval(const CommonOptions& common, const EvalOptions& o) {
  const auto cfg = EffectiveConfig(common);
  const auto tree = RequireTree(cfg);

  struct Named {
    std::string name;
    std::vector<pipeline::LandmarkFrame> frames;
  };
  std::vector<Named> files;
  for (const auto& path : o.inputs) files.push_back({path, io::ReadLandmarkFile(path)});
  if (o.synthetic_seeds > 0) {
    const auto scenarios = eval::EvaluationFiles(o.noise);
    for (std::size_t k = 0; k < scenarios.size(); ++k) {
      const auto seed = eval::ScenarioSeed(o.seed, k);
      files.push_back({fmt::format("synthetic_{}_{}", k, features::ClassName(scenarios[k].movement)),
                       eval::GenerateScenario(scenarios[k], seed, cfg.geometry)});
    }
  }
  if (files.empty()) throw UsageError("eval needs input files or --synthetic");

  std::vector<double> margins;
  for (int m = 0; m <= 200; m += 10) margins.push_back(m);

  std::vector<double> all_errors;
  std::vector<double> per_file;
  std::vector<double> latencies;
  std::size_t ops = 0;
  std::ostringstream per_file_csv;
  per_file_csv << "file,frames,scored,mean_accuracy\n";
  for (const auto& f : files) {
    pipeline::Pipeline p(cfg, tree);
    const auto results = pipeline::RunFrames(f.frames, p);
    const auto truth = pipeline::TrackFromResults(results);
    const auto errors = eval::PredictionErrors(results, truth, cfg.horizon_s);
    if (errors.empty()) throw Error(ErrorCode::kEmptyEvaluation, f.name + ": no scorable frames");
    const double acc = eval::AccuracyAtMargin(errors, o.margin_px);
    per_file.push_back(acc);
    per_file_csv << fmt::format("{},{},{},{:.6f}\n", f.name, f.frames.size(), errors.size(), acc);
    all_errors.insert(all_errors.end(), errors.begin(), errors.end());
    for (const auto& r : results) {
      if (!r.skipped || r.skipped == pipeline::SkipReason::kInsufficientHistory) {
        latencies.push_back(r.latency_us);
      }
    }
    ops = std::max(ops, MaxOpsPerPrediction(results, *tree, cfg));
  }
  const auto report = eval::MakeAccuracyReport(per_file);
  const auto curve = eval::CurveFromErrors(all_errors, margins);

  std::ostringstream curve_csv;
  curve_csv << "margin,accuracy\n";
  for (const auto& p : curve) curve_csv << fmt::format("{:.1f},{:.6f}\n", p.margin_px, p.accuracy);

  const json summary{
      {"files", files.size()},
      {"margin_px", o.margin_px},
      {"margin_m", kinematics::PixelsToMeters(o.margin_px, cfg.geometry)},
      {"mean", report.mean},
      {"variance", report.variance},
      {"latency_us", LatencyJson(eval::SummarizeLatencies(latencies))},
      {"ops_per_prediction", ops},
      {"reference_ops_per_prediction", eval::kReferenceOpsPerPrediction},
      {"config", io::ConfigToJson(cfg)},
  };
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    WriteTextFile(fs::path(o.out_dir) / "margin_curve.csv", curve_csv.str());
    WriteTextFile(fs::path(o.out_dir) / "per_file.csv", per_file_csv.str());
    WriteTextFile(fs::path(o.out_dir) / "summary.json", summary.dump(2) + "\n");
  }
  std::cout << summary.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------- bench

int RunBench(const CommonOptions& common, const std::string& input, std::size_t iterations,
             std::size_t warmup, std::uint64_t seed) {
  const auto cfg = EffectiveConfig(common);
  const auto tree = RequireTree(cfg);
  std::vector<pipeline::LandmarkFrame> frames;
  if (input.empty()) {
    eval::SyntheticScenario s;
    s.movement = features::MovementClass::kObliqueRightAgainst;
    s.duration_s = 1000.0 / s.fps;
    s.noise_sigma_px = 3.0;
    frames = eval::GenerateScenario(s, seed, cfg.geometry);
  } else {
    frames = io::ReadLandmarkFile(input);
  }
  const auto stats = eval::LatencyBench(frames, cfg, tree, iterations, warmup);
  pipeline::Pipeline p(cfg, tree);
  const auto results = pipeline::RunFrames(frames, p);
  const json summary{
      {"frames", frames.size()},
      {"iterations", iterations},
      {"warmup", warmup},
      {"latency_us", LatencyJson(stats)},
      {"ops_per_prediction", MaxOpsPerPrediction(results, *tree, cfg)},
      {"reference_ops_per_prediction", eval::kReferenceOpsPerPrediction},
      {"config", io::ConfigToJson(cfg)},
  };
  std::cout << summary.dump(2) << '\n';
  return 0;
}

// ------------------------------------------------------------------ gen

struct GenOptions {
  std::string movement = "all";
  std::string corpus;
  std::uint64_t seed = 7;
  std::string out_dir = ".";
  double duration_s = 30.0;
  double fps = 15.0;
  double noise = 0.0;
  double speed = 60.0;
  double phi = 90.0;
};

int RunGen(const CommonOptions& common, GenOptions o, bool seed_given) {
  const auto cfg = EffectiveConfig(common);
  std::vector<std::pair<std::string, eval::SyntheticScenario>> jobs;
  if (o.corpus == "train") {
    if (!seed_given) o.seed = eval::kTrainingCorpusSeed;
    const auto corpus = eval::TrainingCorpus(o.noise > 0.0 ? o.noise : 3.0);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      jobs.emplace_back(fmt::format("train_{:02}_{}.jsonl", i, features::ClassName(corpus[i].movement)),
                        corpus[i]);
    }
  } else if (o.corpus == "eval") {
    const auto files = eval::EvaluationFiles(o.noise > 0.0 ? o.noise : 3.0);
    for (std::size_t i = 0; i < files.size(); ++i) {
      jobs.emplace_back(fmt::format("eval_{}_{}.jsonl", i, features::ClassName(files[i].movement)),
                        files[i]);
    }
  } else if (!o.corpus.empty()) {
    throw UsageError("--corpus must be 'train' or 'eval'");
  } else {
    std::vector<features::MovementClass> classes;
    if (o.movement == "all") {
      classes.assign(features::kAllClasses.begin(), features::kAllClasses.end());
    } else {
      const auto c = features::ClassFromName(o.movement);
      if (!c) throw UsageError("unknown class '" + o.movement + "'");
      classes.push_back(*c);
    }
    for (auto c : classes) {
      eval::SyntheticScenario s;
      s.movement = c;
      s.duration_s = o.duration_s;
      s.fps = o.fps;
      s.noise_sigma_px = o.noise;
      s.speed_px_s = o.speed;
      s.phi_deg = o.phi;
      jobs.emplace_back(fmt::format("{}.jsonl", features::ClassName(c)), s);
    }
  }
  fs::create_directories(o.out_dir);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& [name, scenario] = jobs[i];
    // Seeds follow the class index for per-class files so a single-class run
    // reproduces the same stream as the matching file of --class all.
    const std::size_t seed_index =
        o.corpus.empty() ? static_cast<std::size_t>(scenario.movement) : i;
    const auto frames =
        eval::GenerateScenario(scenario, eval::ScenarioSeed(o.seed, seed_index), cfg.geometry);
    const auto path = (fs::path(o.out_dir) / name).string();
    io::WriteLandmarkFile(path, frames);
    std::cout << path << '\n';
  }
  return 0;
}

// ------------------------------------------------------------ calibrate

int RunCalibrate(const std::string& input) {
  std::ifstream in(input);
  if (!in) throw Error(ErrorCode::kMalformedInput, "cannot open " + input);
  std::vector<geometry::CalibrationSample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    geometry::CalibrationSample s;
    if (!(fields >> s.theta_deg >> s.phi_deg)) {
      if (samples.empty() && line_no == 1) continue;  // header
      throw Error(ErrorCode::kMalformedInput,
                  input + ":" + std::to_string(line_no) + ": expected theta_deg,phi_deg");
    }
    samples.push_back(s);
  }
  const auto fit = geometry::FitCalibration(samples);
  const json out{{"samples", samples.size()},
                 {"slope", fit.slope},
                 {"intercept", fit.intercept},
                 {"reference_slope", geometry::kCalibrationSlope},
                 {"reference_intercept", geometry::kCalibrationIntercept}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

// ------------------------------------------------------------- validate

int RunValidate(const std::vector<std::string>& inputs) {
  if (inputs.empty()) throw UsageError("validate needs at least one input file");
  bool ok = true;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kMalformedInput, "cannot open " + path);
    const auto report = io::ValidateStream(in);
    std::cout << fmt::format("{}: {} lines, {} with pose, {} errors\n", path, report.lines,
                             report.frames_with_pose, report.errors.size());
    for (const auto& e : report.errors) std::cout << "  " << e << '\n';
    ok = ok && report.ok();
  }
  return ok ? 0 : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pedestrian movement-intent classification from pose landmarks"};
  app.require_subcommand(1);
  CommonOptions common;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "Pipeline config file (JSON)");
    sub->add_option("--tree", common.tree_path, "Decision tree file");
    sub->add_option("--horizon", common.horizon_s, "Prediction horizon in seconds")
        ->check(CLI::PositiveNumber);
  };

  auto* train = app.add_subcommand("train", "Build a decision tree from landmark streams");
  std::vector<std::string> train_inputs;
  std::string train_out = "tree.json";
  train->add_option("inputs", train_inputs, "JSONL landmark files")->required();
  train->add_option("--out", train_out, "Output tree file");
  add_common(train);

  auto* classify = app.add_subcommand("classify", "Classify a landmark stream frame by frame");
  std::string classify_input = "-";
  std::string classify_out;
  int variant = 1;
  std::string format = "csv";
  bool omit_latency = false;
  classify->add_option("--input", classify_input, "JSONL landmark stream ('-' for stdin)");
  classify->add_option("--out", classify_out, "Output file (default stdout)");
  classify->add_option("--variant", variant, "1 collision, 2 path, 3 direction");
  classify->add_option("--format", format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  classify->add_flag("--omit-latency", omit_latency, "Leave out the latency column");
  add_common(classify);

  auto* evaluate = app.add_subcommand("eval", "Accuracy against realized future positions");
  EvalOptions eval_opts;
  evaluate->add_option("inputs", eval_opts.inputs, "JSONL landmark files");
  evaluate->add_flag("--synthetic", eval_opts.synthetic_seeds,
                     "Also evaluate the seven-file synthetic set");
  evaluate->add_option("--noise", eval_opts.noise, "Noise sigma in px for --synthetic");
  evaluate->add_option("--seed", eval_opts.seed, "Seed for --synthetic");
  evaluate->add_option("--margin", eval_opts.margin_px, "Error margin in px")
      ->check(CLI::NonNegativeNumber);
  evaluate->add_option("--out", eval_opts.out_dir, "Directory for CSV and JSON reports");
  add_common(evaluate);

  auto* bench = app.add_subcommand("bench", "Per-frame latency benchmark");
  std::string bench_input;
  std::size_t iterations = 5;
  std::size_t warmup = 20;
  std::uint64_t bench_seed = 7;
  bench->add_option("--input", bench_input, "JSONL stream (default: 1000 synthetic frames)");
  bench->add_option("--iterations", iterations, "Passes over the stream")->check(CLI::PositiveNumber);
  bench->add_option("--warmup", warmup, "Measurements discarded at the start");
  bench->add_option("--seed", bench_seed, "Seed for the synthetic stream");
  add_common(bench);

  auto* gen = app.add_subcommand("gen", "Generate synthetic landmark streams");
  GenOptions gen_opts;
  gen->add_option("--class", gen_opts.movement, "Movement class name or 'all'");
  gen->add_option("--corpus", gen_opts.corpus, "'train' or 'eval' corpus instead of --class");
  auto* seed_opt = gen->add_option("--seed", gen_opts.seed, "Base seed");
  gen->add_option("--out", gen_opts.out_dir, "Output directory");
  gen->add_option("--duration", gen_opts.duration_s, "Seconds per stream")->check(CLI::PositiveNumber);
  gen->add_option("--fps", gen_opts.fps, "Frame rate")->check(CLI::PositiveNumber);
  gen->add_option("--noise", gen_opts.noise, "Landmark noise sigma in px");
  gen->add_option("--speed", gen_opts.speed, "Walking speed in px/s");
  gen->add_option("--phi", gen_opts.phi, "Facing angle in degrees, [0, 180)");
  add_common(gen);

  auto* calibrate = app.add_subcommand("calibrate", "Fit the theta-to-phi line from a CSV");
  std::string calibrate_input;
  calibrate->add_option("input", calibrate_input, "CSV of theta_deg,phi_deg")->required();

  auto* validate = app.add_subcommand("validate", "Check JSONL landmark files against the schema");
  std::vector<std::string> validate_inputs;
  validate->add_option("inputs", validate_inputs, "JSONL landmark files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train) return RunTrain(common, train_inputs, train_out);
    if (*classify) {
      return RunClassify(common, classify_input, classify_out, variant, format, omit_latency);
    }
    if (*evaluate) return RunEval(common, eval_opts);
    if (*bench) return RunBench(common, bench_input, iterations, warmup, bench_seed);
    if (*gen) return RunGen(common, gen_opts, seed_opt->count() > 0);
    if (*calibrate) return RunCalibrate(calibrate_input);
    if (*validate) return RunValidate(validate_inputs);
  } catch (const UsageError& e) {
    Log(LogLevel::kError, e.what());
    return kExitUsage;
  } catch (const Error& e) {
    Log(LogLevel::kError, e.what());
    return kExitData;
  } catch (const std::exception& e) {
    Log(LogLevel::kError, std::string("internal error: ") + e.what());
    return kExitInternal;
  }
  return kExitUsage;
}
