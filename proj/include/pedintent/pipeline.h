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

// Per-frame loop: landmarks -> orientation, track update, velocities,
// discretization, tree classification, future position and collision flag.

#ifndef PEDINTENT_PIPELINE_H_
#define PEDINTENT_PIPELINE_H_

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pedintent/features.h"
#include "pedintent/geometry.h"
#include "pedintent/id3.h"
#include "pedintent/kinematics.h"

namespace pedintent::pipeline {

inline constexpr std::string_view kLeftShoulder = "left_shoulder";
inline constexpr std::string_view kRightShoulder = "right_shoulder";

// One frame of pose output. Coordinates are normalized image coordinates
// (x right, y down) plus the pose model's z. No value in `landmarks` means
// no pose was detected.
struct LandmarkFrame {
  double t = 0.0;
  std::optional<std::map<std::string, geometry::Vec3, std::less<>>> landmarks;
  std::map<std::string, double, std::less<>> confidence;
};

// Closed rectangle in pixels.
struct CollisionZone {
  double x0 = 180.0;
  double y0 = 300.0;
  double x1 = 252.0;
  double y1 = 432.0;

  void Validate() const;
};

struct PipelineConfig {
  kinematics::FrameGeometry geometry;
  double horizon_s = 1.0;
  double step_s = 0.25;
  features::DiscretizationConfig discretization;
  std::size_t velocity_window = 2;
  double min_confidence = 0.5;
  CollisionZone zone;
  features::GridSpec grid;
  // Track resets when consecutive poses are further apart than this.
  double staleness_s = 1.0;
  std::size_t track_capacity = 32;
  bool emit_path = false;
  std::string tree_path;

  // Throws Error{kInvalidConfig}.
  void Validate() const;
};

enum class SkipReason {
  kNoPose,
  kDegenerate,
  kNearPi,
  kInsufficientHistory,
  kNonMonotonic,
  kMalformedFrame,
};

std::string_view SkipReasonName(SkipReason r);

struct PathProjection {
  std::vector<kinematics::PixelPoint> points;
  double step_s = 0.0;
};

struct FrameResult {
  double t = 0.0;
  std::optional<SkipReason> skipped;
  std::optional<double> theta_rad;
  std::optional<double> phi_deg;
  bool phi_clamped = false;
  std::optional<kinematics::PixelPoint> mid;
  std::optional<kinematics::Velocity2D> v_mid;
  std::optional<kinematics::Velocity2D> v_left;
  std::optional<kinematics::Velocity2D> v_right;
  std::optional<features::DiscreteFeatures> discrete;
  std::optional<kinematics::PixelPoint> predicted_future;
  std::optional<features::GridCell> future_cell;
  std::optional<features::MovementClass> movement_class;
  bool collision_imminent = false;
  // Only when PipelineConfig::emit_path is set.
  std::optional<PathProjection> path;
  double latency_us = 0.0;
};

bool CheckCollision(kinematics::PixelPoint future, const CollisionZone& zone);

// Points at k * step for k = 0 .. ceil(horizon / step), starting at the
// latest midpoint. Throws Error{kInsufficientHistory}.
PathProjection ProjectPath(const kinematics::Track& track, std::size_t window, double horizon_s,
                           double step_s);

// Single pedestrian stream. The tree is shared read-only; without a tree the
// pipeline still produces features and predictions but no class.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config, std::shared_ptr<const id3::TreeNode> tree = nullptr);

  // Throws Error{kNonMonotonicTimestamp} for out-of-order frames; geometry
  // failures are reported through FrameResult::skipped.
  FrameResult Process(const LandmarkFrame& frame);

  const kinematics::Track& track() const { return track_; }
  const PipelineConfig& config() const { return config_; }
  void Reset() { track_.Clear(); }

 private:
  FrameResult Compute(const LandmarkFrame& frame);

  PipelineConfig config_;
  std::shared_ptr<const id3::TreeNode> tree_;
  kinematics::Track track_;
};

// Either a frame or a per-line parse error.
struct StreamItem {
  std::optional<LandmarkFrame> frame;
  std::string error;
};

using FrameSource = std::function<std::optional<StreamItem>()>;
using ResultSink = std::function<void(const FrameResult&)>;

// One result per source item, in order. Malformed or out-of-order frames
// produce skipped results and never stop the stream.
void RunStream(const FrameSource& source, Pipeline& pipeline, const ResultSink& sink);
std::vector<FrameResult> RunFrames(std::span<const LandmarkFrame> frames, Pipeline& pipeline);

// Training pairs for every frame with features and a realized future:
// discretized features at time t, label from the displacement over
// [t, t + horizon].
id3::Dataset LabeledSamples(std::span<const LandmarkFrame> frames, const PipelineConfig& config);

// Midpoints of the non-skipped observations in `results`, as a track that
// keeps all of them.
kinematics::Track TrackFromResults(std::span<const FrameResult> results);

}  // namespace pedintent::pipeline

#endif  // PEDINTENT_PIPELINE_H_
