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

#include "pedintent/eval.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "pedintent/error.h"

namespace pedintent::eval {

using features::MovementClass;
using kinematics::PixelPoint;
using pipeline::FrameResult;
using pipeline::LandmarkFrame;

void SyntheticScenario::Validate() const {
  if (!(duration_s > 0.0) || !(fps > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "scenario duration and fps must be positive");
  }
  if (!(noise_sigma_px >= 0.0) || !(speed_px_s >= 0.0) || !(shoulder_width_px > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "scenario speed, noise and shoulder width invalid");
  }
  if (!(phi_deg >= 0.0 && phi_deg < 180.0)) {
    throw Error(ErrorCode::kInvalidConfig, "scenario phi_deg must lie in [0, 180)");
  }
}

std::vector<LandmarkFrame> GenerateScenario(const SyntheticScenario& s, std::uint64_t seed,
                                            const kinematics::FrameGeometry& geometry) {
  s.Validate();
  geometry.Validate();
  const auto frame_count = static_cast<std::size_t>(std::llround(s.duration_s * s.fps));
  const double width = geometry.width_px;
  const double height = geometry.height_px;

  const kinematics::Velocity2D dir = features::DirectionOfClass(s.movement);
  const kinematics::Velocity2D v{dir.vx * s.speed_px_s, dir.vy * s.speed_px_s};
  const PixelPoint start{width / 2.0 - v.vx * s.duration_s / 2.0,
                         height / 2.0 - v.vy * s.duration_s / 2.0};

  // The shoulder axis is a yaw about the image vertical; the calibrated
  // facing angle is twice the yaw minus 180 degrees.
  const double yaw = (s.phi_deg + 180.0) / 2.0 * std::numbers::pi / 180.0;
  const double half = s.shoulder_width_px / 2.0;
  const double dx_px = half * std::cos(yaw);
  const double dz = -half * std::sin(yaw) / width;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, s.noise_sigma_px > 0.0 ? s.noise_sigma_px : 1.0);
  const auto jitter = [&]() { return s.noise_sigma_px > 0.0 ? noise(rng) : 0.0; };

  std::vector<LandmarkFrame> frames;
  frames.reserve(frame_count);
  for (std::size_t i = 0; i < frame_count; ++i) {
    const double t = static_cast<double>(i) / s.fps;
    const double mx = start.x + v.vx * t;
    const double my = start.y + v.vy * t;
    const double lx = mx + dx_px + jitter();
    const double ly = my + jitter();
    const double rx = mx - dx_px + jitter();
    const double ry = my + jitter();
    LandmarkFrame f;
    f.t = t;
    auto& lm = f.landmarks.emplace();
    lm[std::string(pipeline::kLeftShoulder)] = {lx / width, ly / height, dz};
    lm[std::string(pipeline::kRightShoulder)] = {rx / width, ry / height, -dz};
    f.confidence[std::string(pipeline::kLeftShoulder)] = 0.99;
    f.confidence[std::string(pipeline::kRightShoulder)] = 0.99;
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<SyntheticScenario> TrainingCorpus(double noise_sigma_px) {
  std::vector<SyntheticScenario> corpus;
  for (MovementClass c : features::kAllClasses) {
    const bool crossing = c == MovementClass::kPerpRight || c == MovementClass::kPerpLeft;
    const int repeats = crossing ? 2 : 1;
    for (int r = 0; r < repeats; ++r) {
      for (double phi : {30.0, 90.0, 150.0}) {
        SyntheticScenario s;
        s.movement = c;
        s.phi_deg = phi;
        s.duration_s = 10.0;
        s.noise_sigma_px = noise_sigma_px;
        corpus.push_back(s);
      }
    }
  }
  return corpus;
}

std::vector<SyntheticScenario> EvaluationFiles(double noise_sigma_px, int first_class) {
  constexpr double kPhis[] = {30.0, 90.0, 150.0};
  std::vector<SyntheticScenario> files;
  for (int k = 0; k < 7; ++k) {
    SyntheticScenario s;
    s.movement = features::kAllClasses[(first_class + k) % features::kNumClasses];
    s.phi_deg = kPhis[k % 3];
    s.duration_s = 22.2;
    s.noise_sigma_px = noise_sigma_px;
    files.push_back(s);
  }
  return files;
}

std::uint64_t ScenarioSeed(std::uint64_t base_seed, std::size_t index) {
  // splitmix64 finalizer
  std::uint64_t z = base_seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

std::optional<std::size_t> IndexAt(const kinematics::Track& track, double t) {
  std::size_t lo = 0;
  std::size_t hi = track.size();
  while (lo < hi) {
    const std::size_t m = (lo + hi) / 2;
    if (track[m].t < t) {
      lo = m + 1;
    } else {
      hi = m;
    }
  }
  if (lo < track.size() && std::abs(track[lo].t - t) <= 1e-9) return lo;
  return std::nullopt;
}

// Midpoint at time t, linearly interpolated between the bracketing entries.
std::optional<PixelPoint> MidAt(const kinematics::Track& track, std::size_t from, double t,
                                double max_gap_s) {
  const double slack = 1e-9 * std::max(1.0, std::abs(t));
  for (std::size_t j = from + 1; j < track.size(); ++j) {
    if (track[j].t < t - slack) continue;
    if (std::abs(track[j].t - t) <= slack) return track[j].mid;
    const auto& a = track[j - 1];
    const auto& b = track[j];
    if (b.t - a.t > max_gap_s) return std::nullopt;
    const double w = (t - a.t) / (b.t - a.t);
    return PixelPoint{a.mid.x + w * (b.mid.x - a.mid.x), a.mid.y + w * (b.mid.y - a.mid.y)};
  }
  return std::nullopt;
}

}  // namespace

std::vector<double> PredictionErrors(std::span<const FrameResult> results,
                                     const kinematics::Track& truth, double horizon_s) {
  constexpr double kMaxGapS = 1.0;
  std::vector<double> errors;
  for (const auto& r : results) {
    if (!r.predicted_future || !std::isfinite(r.t)) continue;
    const auto ref = IndexAt(truth, r.t);
    if (!ref) continue;
    const auto realized = MidAt(truth, *ref, r.t + horizon_s, kMaxGapS);
    if (!realized) continue;
    errors.push_back(
        std::hypot(r.predicted_future->x - realized->x, r.predicted_future->y - realized->y));
  }
  return errors;
}

double AccuracyAtMargin(std::span<const double> errors, double margin_px) {
  if (errors.empty()) throw Error(ErrorCode::kEmptyEvaluation, "no scored frames");
  const auto hits = std::count_if(errors.begin(), errors.end(),
                                  [&](double e) { return e <= margin_px; });
  return static_cast<double>(hits) / static_cast<double>(errors.size());
}

MarginCurve CurveFromErrors(std::span<const double> errors, std::span<const double> margins) {
  if (errors.empty()) throw Error(ErrorCode::kEmptyEvaluation, "no scored frames");
  for (std::size_t i = 1; i < margins.size(); ++i) {
    if (!(margins[i] > margins[i - 1])) {
      throw Error(ErrorCode::kInvalidConfig, "margins must be strictly increasing");
    }
  }
  MarginCurve curve;
  for (double m : margins) {
    const double acc = AccuracyAtMargin(errors, m);
    if (!curve.empty() && acc < curve.back().accuracy) {
      throw std::logic_error("margin curve decreased at " + std::to_string(m) + " px");
    }
    curve.push_back({m, acc});
  }
  return curve;
}

MarginCurve AccuracyVsMargin(std::span<const FrameResult> results, const kinematics::Track& truth,
                             std::span<const double> margins, double horizon_s) {
  return CurveFromErrors(PredictionErrors(results, truth, horizon_s), margins);
}

AccuracyReport MakeAccuracyReport(std::span<const double> per_file_accuracy) {
  if (per_file_accuracy.empty()) throw Error(ErrorCode::kEmptyEvaluation, "no files to report");
  AccuracyReport report;
  report.per_file.assign(per_file_accuracy.begin(), per_file_accuracy.end());
  const double n = static_cast<double>(report.per_file.size());
  report.mean = std::accumulate(report.per_file.begin(), report.per_file.end(), 0.0) / n;
  double ss = 0.0;
  for (double a : report.per_file) ss += (a - report.mean) * (a - report.mean);
  report.variance = ss / n;
  return report;
}

double ClassificationAccuracy(std::span<const FrameResult> results, MovementClass expected) {
  std::size_t classified = 0;
  std::size_t correct = 0;
  for (const auto& r : results) {
    if (!r.movement_class) continue;
    ++classified;
    if (*r.movement_class == expected) ++correct;
  }
  if (classified == 0) throw Error(ErrorCode::kEmptyEvaluation, "no classified frames");
  return static_cast<double>(correct) / static_cast<double>(classified);
}

LatencyStats SummarizeLatencies(std::vector<double> latencies_us) {
  if (latencies_us.empty()) throw Error(ErrorCode::kEmptyEvaluation, "no latency samples");
  std::sort(latencies_us.begin(), latencies_us.end());
  const std::size_t n = latencies_us.size();
  const auto rank = [&](double p) {
    const auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    return latencies_us[std::clamp<std::size_t>(idx, 1, n) - 1];
  };
  LatencyStats stats;
  stats.samples = n;
  stats.mean_us = std::accumulate(latencies_us.begin(), latencies_us.end(), 0.0) /
                  static_cast<double>(n);
  stats.p50_us = rank(0.50);
  stats.p95_us = rank(0.95);
  stats.max_us = latencies_us.back();
  return stats;
}

LatencyStats LatencyBench(std::span<const LandmarkFrame> frames,
                          const pipeline::PipelineConfig& config,
                          std::shared_ptr<const id3::TreeNode> tree, std::size_t iterations,
                          std::size_t warmup) {
  if (frames.empty()) throw Error(ErrorCode::kEmptyEvaluation, "benchmark stream is empty");
  std::vector<double> latencies;
  latencies.reserve(frames.size() * std::max<std::size_t>(iterations, 1));
  std::size_t seen = 0;
  for (std::size_t it = 0; it < std::max<std::size_t>(iterations, 1); ++it) {
    pipeline::Pipeline p(config, tree);
    for (const auto& frame : frames) {
      const FrameResult r = p.Process(frame);
      if (seen++ >= warmup) latencies.push_back(r.latency_us);
    }
  }
  return SummarizeLatencies(std::move(latencies));
}

namespace {

// Scalar that tallies every arithmetic operation and comparison it takes
// part in.
struct Counted {
  double v;
  OpCount* ops;
};

Counted operator+(const Counted& a, const Counted& b) {
  ++a.ops->additions;
  return {a.v + b.v, a.ops};
}
[[maybe_unused]] Counted operator-(const Counted& a, const Counted& b) {
  ++a.ops->subtractions;
  return {a.v - b.v, a.ops};
}
Counted operator-(const Counted& a) {
  ++a.ops->subtractions;
  return {-a.v, a.ops};
}
Counted operator*(const Counted& a, const Counted& b) {
  ++a.ops->multiplications;
  return {a.v * b.v, a.ops};
}
bool operator<(const Counted& a, const Counted& b) {
  ++a.ops->comparisons;
  return a.v < b.v;
}
bool operator>(const Counted& a, const Counted& b) {
  ++a.ops->comparisons;
  return a.v > b.v;
}

}  // namespace

OpCount CountOps(const features::FeatureVector& fv, const id3::TreeNode& tree,
                 const pipeline::PipelineConfig& config, PixelPoint position) {
  OpCount ops;
  const auto c = [&ops](double v) { return Counted{v, &ops}; };
  const auto& dc = config.discretization;

  features::DiscreteFeatures df;
  df.vx = features::SpeedBinGeneric(c(fv.vx), c(dc.speed_deadzone));
  df.vy = features::SpeedBinGeneric(c(fv.vy), c(dc.speed_deadzone));
  df.phi = features::PhiBinGeneric(c(fv.phi_deg), c(dc.phi_bin_edges[0]), c(dc.phi_bin_edges[1]));

  int dispatches = 0;
  id3::Classify(tree, df, &dispatches);
  ops.tree_dispatches = static_cast<std::size_t>(dispatches);
  ops.comparisons += ops.tree_dispatches;

  kinematics::ExtrapolateGeneric(c(position.x), c(position.y), c(fv.vx), c(fv.vy),
                                 c(config.horizon_s));
  return ops;
}

}  // namespace pedintent::eval
