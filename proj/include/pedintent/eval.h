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

// Evaluation: synthetic walkers with known motion, accuracy against the
// realized future position, latency measurement and op counting.

#ifndef PEDINTENT_EVAL_H_
#define PEDINTENT_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pedintent/features.h"
#include "pedintent/id3.h"
#include "pedintent/kinematics.h"
#include "pedintent/pipeline.h"

namespace pedintent::eval {

struct SyntheticScenario {
  features::MovementClass movement = features::MovementClass::kStationary;
  double speed_px_s = 60.0;
  // Facing angle the shoulder pose is built to produce. Values close to 180
  // put the look-at rotation near pi and are rejected by the pipeline.
  double phi_deg = 90.0;
  double duration_s = 30.0;
  double fps = 15.0;
  double noise_sigma_px = 0.0;
  double shoulder_width_px = 40.0;

  void Validate() const;
};

// Linear walk through the frame centre (at mid-stream) plus isotropic
// Gaussian noise on every shoulder pixel coordinate. Same seed, same stream.
std::vector<pipeline::LandmarkFrame> GenerateScenario(const SyntheticScenario& scenario,
                                                      std::uint64_t seed,
                                                      const kinematics::FrameGeometry& geometry);

// The corpus the default tree is trained on. Crossing walkers (PerpRight,
// PerpLeft) are over-represented, as on real sidewalks, which makes the
// horizontal speed the most informative attribute.
std::vector<SyntheticScenario> TrainingCorpus(double noise_sigma_px = 3.0);
inline constexpr std::uint64_t kTrainingCorpusSeed = 20240611;

// Seven files, about 2300 frames in total at 15 fps, cycling through the
// classes starting at `first_class`.
std::vector<SyntheticScenario> EvaluationFiles(double noise_sigma_px, int first_class = 0);

// Per-scenario seeds are derived from a base seed and the file index.
std::uint64_t ScenarioSeed(std::uint64_t base_seed, std::size_t index);

struct MarginPoint {
  double margin_px = 0.0;
  double accuracy = 0.0;
};
using MarginCurve = std::vector<MarginPoint>;

// Euclidean pixel error between each predicted future midpoint and the
// midpoint observed `horizon_s` later in `truth`. Frames without a
// prediction or without a realized future are left out.
std::vector<double> PredictionErrors(std::span<const pipeline::FrameResult> results,
                                     const kinematics::Track& truth, double horizon_s);

double AccuracyAtMargin(std::span<const double> errors, double margin_px);

// Margins must be strictly increasing. Throws Error{kEmptyEvaluation} when
// no frame could be scored.
MarginCurve AccuracyVsMargin(std::span<const pipeline::FrameResult> results,
                             const kinematics::Track& truth, std::span<const double> margins,
                             double horizon_s);
MarginCurve CurveFromErrors(std::span<const double> errors, std::span<const double> margins);

struct AccuracyReport {
  std::vector<double> per_file;
  double mean = 0.0;
  // Population variance of per_file.
  double variance = 0.0;
};

AccuracyReport MakeAccuracyReport(std::span<const double> per_file_accuracy);

// Fraction of classified frames whose class equals `expected`.
double ClassificationAccuracy(std::span<const pipeline::FrameResult> results,
                              features::MovementClass expected);

struct LatencyStats {
  std::size_t samples = 0;
  double mean_us = 0.0;
  double p50_us = 0.0;
  double p95_us = 0.0;
  double max_us = 0.0;
};

LatencyStats SummarizeLatencies(std::vector<double> latencies_us);

// Runs the stream `iterations` times through fresh pipelines and summarizes
// per-frame compute time, dropping the first `warmup` measurements. Throws
// Error{kEmptyEvaluation} for an empty stream.
LatencyStats LatencyBench(std::span<const pipeline::LandmarkFrame> frames,
                          const pipeline::PipelineConfig& config,
                          std::shared_ptr<const id3::TreeNode> tree, std::size_t iterations,
                          std::size_t warmup = 20);

struct OpCount {
  std::size_t additions = 0;
  std::size_t subtractions = 0;
  std::size_t multiplications = 0;
  std::size_t comparisons = 0;
  // Internal nodes visited on the tree walk; each is one comparison.
  std::size_t tree_dispatches = 0;

  std::size_t Total() const { return additions + subtractions + multiplications + comparisons; }
  friend bool operator==(const OpCount&, const OpCount&) = default;
};

// Table 2 style figure the op counts are printed next to.
inline constexpr std::size_t kReferenceOpsPerPrediction = 23;

// Runs discretization, the tree walk and the future-position extrapolation
// on a counting scalar type and tallies every arithmetic and comparison.
OpCount CountOps(const features::FeatureVector& features, const id3::TreeNode& tree,
                 const pipeline::PipelineConfig& config,
                 kinematics::PixelPoint position = {216.0, 216.0});

}  // namespace pedintent::eval

#endif  // PEDINTENT_EVAL_H_
