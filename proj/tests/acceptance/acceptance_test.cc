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

// One PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "oracles.h"
#include "pedintent/error.h"
#include "pedintent/eval.h"
#include "pedintent/geometry.h"
#include "pedintent/id3.h"
#include "pedintent/io.h"
#include "pedintent/pipeline.h"

using namespace pedintent;
using features::Attribute;
using features::MovementClass;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void Report(bool ok, const std::string& name, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// Quaternions q and -q are the same rotation.
double SignedQuaternionError(const geometry::Quaternion& q, const geometry::Quaternion& ref) {
  const double plus = std::max({std::abs(q.a - ref.a), std::abs(q.b - ref.b),
                                std::abs(q.c - ref.c), std::abs(q.d - ref.d)});
  const double minus = std::max({std::abs(q.a + ref.a), std::abs(q.b + ref.b),
                                 std::abs(q.c + ref.c), std::abs(q.d + ref.d)});
  return std::min(plus, minus);
}

void QuaternionCriterion() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> angle(0.01, std::numbers::pi - 0.01);
  double worst_q = 0.0;
  double worst_theta = 0.0;
  constexpr int kRotations = 10000;
  for (int i = 0; i < kRotations; ++i) {
    const oracle::AxisAngle aa{oracle::RandomUnitVector(rng), angle(rng)};
    const auto q = geometry::QuaternionFromMatrix(oracle::MatrixFromAxisAngle(aa));
    worst_q = std::max(worst_q, SignedQuaternionError(q, oracle::QuaternionFromAxisAngle(aa)));
    worst_theta = std::max(worst_theta, std::abs(geometry::ThetaFromQuaternion(q) - aa.angle / 2));
  }
  const double elapsed = Seconds(start);
  Report(worst_q <= 1e-9 && worst_theta <= 1e-9 && elapsed < 5.0, "quaternion_conversion",
         fmt::format("{} rotations, max component error {:.3e}, max theta error {:.3e}, {:.3f} s",
                     kRotations, worst_q, worst_theta, elapsed));
}

void CalibrationCriterion() {
  const std::vector<geometry::CalibrationSample> table = {
      {88, 175}, {83, 155}, {78, 135}, {73, 115}, {68, 95},
      {63, 75},  {58, 55},  {53, 35},  {48, 15},  {46, 5}};
  const auto fit = geometry::FitCalibration(table);
  const double lo = geometry::PhiFromTheta(std::numbers::pi / 4);
  const double hi = geometry::PhiFromTheta(std::numbers::pi / 2);
  const bool ok = fit.slope >= 3.9 && fit.slope <= 4.15 && fit.intercept >= -185.0 &&
                  fit.intercept <= -172.0 && std::abs(lo) <= 1e-9 && std::abs(hi - 180.0) <= 1e-9;
  Report(ok, "phi_calibration",
         fmt::format("fit slope {:.6f} intercept {:.6f}; phi(pi/4) {:.3e}, phi(pi/2) {:.9f}",
                     fit.slope, fit.intercept, lo, hi));
}

void EntropyCriterion() {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  double min_gain = 0.0;
  constexpr int kDatasets = 1000;
  for (int i = 0; i < kDatasets; ++i) {
    const auto d = oracle::RandomDataset(rng, 200, 9);
    const double h = oracle::HistogramEntropy(oracle::Labels(d));
    worst = std::max(worst, std::abs(id3::Entropy(d) - h));
    for (Attribute a : features::kAllAttributes) {
      const double ch = oracle::HistogramConditionalEntropy(d, a);
      const double g = id3::InformationGain(d, a);
      worst = std::max({worst, std::abs(id3::ConditionalEntropy(d, a) - ch), std::abs(g - (h - ch))});
      min_gain = std::min(min_gain, g);
    }
  }
  Report(worst <= 1e-12 && min_gain >= -1e-12, "entropy_and_gain",
         fmt::format("{} random datasets, max deviation from oracle {:.3e}, min gain {:.3e}",
                     kDatasets, worst, min_gain));
}

id3::Dataset TrainingSamples(const pipeline::PipelineConfig& cfg) {
  id3::Dataset all;
  const auto corpus = eval::TrainingCorpus();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto frames = eval::GenerateScenario(
        corpus[i], eval::ScenarioSeed(eval::kTrainingCorpusSeed, i), cfg.geometry);
    const auto samples = pipeline::LabeledSamples(frames, cfg);
    all.insert(all.end(), samples.begin(), samples.end());
  }
  return all;
}

std::shared_ptr<const id3::TreeNode> GainCriterion(const pipeline::PipelineConfig& cfg) {
  const id3::Dataset samples = TrainingSamples(cfg);
  const auto gains = id3::ComputeGains(samples);
  const auto tree = std::make_shared<const id3::TreeNode>(id3::BuildTree(samples));
  const auto rank = gains.Ranking();
  const bool root_vx = !tree->is_leaf() && tree->split().attribute == Attribute::kVx;
  const bool ok = rank[0] == Attribute::kVx && rank[1] == Attribute::kVy &&
                  rank[2] == Attribute::kPhi && gains.Of(Attribute::kVx) > gains.Of(Attribute::kVy) &&
                  gains.Of(Attribute::kVy) > gains.Of(Attribute::kPhi) && root_vx;
  Report(ok, "gain_ranking",
         fmt::format("{} samples; gain vx {:.4f}, vy {:.4f}, phi {:.4f}; root {}, depth {}",
                     samples.size(), gains.Of(Attribute::kVx), gains.Of(Attribute::kVy),
                     gains.Of(Attribute::kPhi),
                     tree->is_leaf() ? "leaf" : std::string(features::AttributeName(tree->split().attribute)),
                     id3::Depth(*tree)));
  return tree;
}

void NoiselessCriterion(const pipeline::PipelineConfig& cfg,
                        const std::shared_ptr<const id3::TreeNode>& tree) {
  double worst_class = 2.0;
  double worst_margin = 1.0;
  std::string worst_name;
  for (MovementClass c : features::kAllClasses) {
    for (double phi : {30.0, 90.0, 150.0}) {
      eval::SyntheticScenario s;
      s.movement = c;
      s.phi_deg = phi;
      s.duration_s = 30.0;
      s.fps = 15.0;
      s.noise_sigma_px = 0.0;
      const auto frames = eval::GenerateScenario(s, 1, cfg.geometry);
      pipeline::Pipeline p(cfg, tree);
      const auto results = pipeline::RunFrames(frames, p);
      const double acc = eval::ClassificationAccuracy(results, c);
      const auto errors =
          eval::PredictionErrors(results, pipeline::TrackFromResults(results), cfg.horizon_s);
      const double margin = eval::AccuracyAtMargin(errors, 50.0);
      if (acc < worst_class) {
        worst_class = acc;
        worst_name = fmt::format("{}@{}", features::ClassName(c), phi);
      }
      worst_margin = std::min(worst_margin, margin);
    }
  }
  Report(worst_class >= 0.95 && worst_margin == 1.0, "noiseless_streams",
         fmt::format("27 streams of 30 s at 15 fps; min classification accuracy {:.4f} ({}), "
                     "min accuracy within 50 px {:.4f}",
                     worst_class, worst_name, worst_margin));
}

void NoisyRegimeCriterion(const pipeline::PipelineConfig& cfg,
                          const std::shared_ptr<const id3::TreeNode>& tree) {
  std::vector<double> margins;
  for (int m = 0; m <= 200; m += 10) margins.push_back(m);
  std::vector<double> per_file;
  std::vector<double> errors_all;
  double worst_seed_variance = 0.0;
  constexpr int kSeeds = 10;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const auto files = eval::EvaluationFiles(3.0, seed - 1);
    std::vector<double> seed_acc;
    for (std::size_t k = 0; k < files.size(); ++k) {
      const auto frames = eval::GenerateScenario(
          files[k], eval::ScenarioSeed(static_cast<std::uint64_t>(seed), k), cfg.geometry);
      pipeline::Pipeline p(cfg, tree);
      const auto results = pipeline::RunFrames(frames, p);
      const auto errors =
          eval::PredictionErrors(results, pipeline::TrackFromResults(results), cfg.horizon_s);
      seed_acc.push_back(eval::AccuracyAtMargin(errors, 50.0));
      errors_all.insert(errors_all.end(), errors.begin(), errors.end());
    }
    worst_seed_variance = std::max(worst_seed_variance, eval::MakeAccuracyReport(seed_acc).variance);
    per_file.insert(per_file.end(), seed_acc.begin(), seed_acc.end());
  }
  const auto report = eval::MakeAccuracyReport(per_file);
  bool monotone = true;
  std::string curve_detail;
  try {
    const auto curve = eval::CurveFromErrors(errors_all, margins);
    curve_detail = fmt::format("curve {:.3f} at 0 px to {:.3f} at 200 px", curve.front().accuracy,
                               curve.back().accuracy);
  } catch (const std::logic_error& e) {
    monotone = false;
    curve_detail = e.what();
  }
  const bool ok = report.mean >= 0.75 && report.mean <= 0.95 && report.variance <= 0.01 &&
                  worst_seed_variance <= 0.01 && monotone;
  Report(ok, "noisy_regime",
         fmt::format("sigma 3 px, {} files; accuracy within 50 px ({:.3f} m) mean {:.4f}, "
                     "variance {:.6f}, worst per-seed variance {:.6f}; {}",
                     per_file.size(), kinematics::PixelsToMeters(50.0, cfg.geometry), report.mean,
                     report.variance, worst_seed_variance, curve_detail));
}

void LatencyCriterion(const pipeline::PipelineConfig& cfg,
                      const std::shared_ptr<const id3::TreeNode>& tree) {
  const auto start = Clock::now();
  eval::SyntheticScenario s;
  s.movement = MovementClass::kObliqueRightAgainst;
  s.noise_sigma_px = 3.0;
  s.duration_s = 1000.0 / s.fps;
  const auto frames = eval::GenerateScenario(s, 7, cfg.geometry);
  const auto stats = eval::LatencyBench(frames, cfg, tree, 1, 20);
  const double elapsed = Seconds(start);
  Report(stats.samples >= 980 && frames.size() >= 1000 && stats.mean_us <= 8000.0 && elapsed < 30.0,
         "per_frame_latency",
         fmt::format("{} frames, {} measured after 20 warm-up; mean {:.3f} us, p95 {:.3f} us, "
                     "max {:.3f} us; {:.3f} s total",
                     frames.size(), stats.samples, stats.mean_us, stats.p95_us, stats.max_us,
                     elapsed));
}

void OpCountCriterion(const pipeline::PipelineConfig& cfg,
                      const std::shared_ptr<const id3::TreeNode>& tree) {
  std::size_t worst = 0;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> v(-120.0, 120.0);
  std::uniform_real_distribution<double> phi(0.0, 180.0);
  for (int i = 0; i < 5000; ++i) {
    worst = std::max(worst, eval::CountOps({v(rng), v(rng), phi(rng)}, *tree, cfg).Total());
  }
  for (const auto& f : features::AllDiscreteFeatures()) {
    // Values straddling each bin boundary.
    const double speeds[] = {-10.0, 0.0, 10.0};
    const double phis[] = {30.0, 90.0, 150.0};
    worst = std::max(worst, eval::CountOps({speeds[static_cast<int>(f.vx)],
                                            speeds[static_cast<int>(f.vy)],
                                            phis[static_cast<int>(f.phi)]},
                                           *tree, cfg)
                                .Total());
  }
  Report(worst <= 100, "ops_per_prediction",
         fmt::format("worst case {} operations (reference figure {})", worst,
                     eval::kReferenceOpsPerPrediction));
}

std::string TrainAndClassify(const pipeline::PipelineConfig& cfg, std::string* tree_text) {
  const auto samples = TrainingSamples(cfg);
  const auto tree = std::make_shared<const id3::TreeNode>(id3::BuildTree(samples));
  *tree_text = id3::SerializeTree(*tree);
  std::ostringstream out;
  io::ResultWriter writer(out, {io::Variant::kCollision, io::OutputFormat::kCsv, false});
  writer.WriteHeader();
  const auto files = eval::EvaluationFiles(3.0);
  for (std::size_t k = 0; k < files.size(); ++k) {
    const auto frames = eval::GenerateScenario(files[k], eval::ScenarioSeed(5, k), cfg.geometry);
    pipeline::Pipeline p(cfg, tree);
    for (const auto& r : pipeline::RunFrames(frames, p)) writer.Write(r);
  }
  return out.str();
}

void DeterminismCriterion(const pipeline::PipelineConfig& cfg) {
  std::string tree_a, tree_b;
  const std::string rows_a = TrainAndClassify(cfg, &tree_a);
  const std::string rows_b = TrainAndClassify(cfg, &tree_b);
  const auto lines = std::count(rows_a.begin(), rows_a.end(), '\n');
  Report(tree_a == tree_b && rows_a == rows_b, "determinism",
         fmt::format("tree {} bytes {}, {} output lines {}", tree_a.size(),
                     tree_a == tree_b ? "identical" : "differ", lines,
                     rows_a == rows_b ? "identical" : "differ"));
}

}  // namespace

int main() {
  try {
    const pipeline::PipelineConfig cfg;
    QuaternionCriterion();
    CalibrationCriterion();
    EntropyCriterion();
    const auto tree = GainCriterion(cfg);
    NoiselessCriterion(cfg, tree);
    NoisyRegimeCriterion(cfg, tree);
    LatencyCriterion(cfg, tree);
    OpCountCriterion(cfg, tree);
    DeterminismCriterion(cfg);
  } catch (const std::exception& e) {
    Report(false, "harness", e.what());
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
