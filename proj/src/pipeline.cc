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

#include "pedintent/pipeline.h"

#include <chrono>
#include <cmath>
#include <limits>

#include "pedintent/error.h"

namespace pedintent::pipeline {

using kinematics::PixelPoint;
using kinematics::TrackedPoint;

std::string_view SkipReasonName(SkipReason r) {
  switch (r) {
    case SkipReason::kNoPose: return "NoPose";
    case SkipReason::kDegenerate: return "Degenerate";
    case SkipReason::kNearPi: return "NearPi";
    case SkipReason::kInsufficientHistory: return "InsufficientHistory";
    case SkipReason::kNonMonotonic: return "NonMonotonic";
    case SkipReason::kMalformedFrame: return "MalformedFrame";
  }
  return "Unknown";
}

void CollisionZone::Validate() const {
  if (!(x0 < x1 && y0 < y1)) {
    throw Error(ErrorCode::kInvalidConfig, "collision zone needs x0 < x1 and y0 < y1");
  }
}

void PipelineConfig::Validate() const {
  geometry.Validate();
  discretization.Validate();
  zone.Validate();
  if (!(horizon_s > 0.0)) throw Error(ErrorCode::kInvalidConfig, "horizon_s must be positive");
  if (!(step_s > 0.0)) throw Error(ErrorCode::kInvalidConfig, "step_s must be positive");
  if (velocity_window == 0) {
    throw Error(ErrorCode::kInvalidConfig, "velocity_window must be at least 1");
  }
  if (track_capacity < velocity_window + 1) {
    throw Error(ErrorCode::kInvalidConfig, "track_capacity must exceed velocity_window");
  }
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "min_confidence must lie in [0, 1]");
  }
  if (grid.cols <= 0 || grid.rows <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "grid dimensions must be positive");
  }
  if (!(staleness_s > 0.0)) throw Error(ErrorCode::kInvalidConfig, "staleness_s must be positive");
}

bool CheckCollision(PixelPoint future, const CollisionZone& zone) {
  return future.x >= zone.x0 && future.x <= zone.x1 && future.y >= zone.y0 && future.y <= zone.y1;
}

PathProjection ProjectPath(const kinematics::Track& track, std::size_t window, double horizon_s,
                           double step_s) {
  const kinematics::Velocity2D v = kinematics::Velocity(track, window, TrackedPoint::kMid);
  const PixelPoint origin = track.back().mid;
  const auto steps = static_cast<std::size_t>(std::ceil(horizon_s / step_s - 1e-9));
  PathProjection path;
  path.step_s = step_s;
  path.points.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    path.points.push_back(kinematics::Extrapolate(origin, v, static_cast<double>(k) * step_s));
  }
  return path;
}

Pipeline::Pipeline(PipelineConfig config, std::shared_ptr<const id3::TreeNode> tree)
    : config_(std::move(config)), tree_(std::move(tree)), track_(config_.track_capacity) {
  config_.Validate();
}

FrameResult Pipeline::Process(const LandmarkFrame& frame) {
  const auto start = std::chrono::steady_clock::now();
  FrameResult result = Compute(frame);
  const auto stop = std::chrono::steady_clock::now();
  result.latency_us = std::chrono::duration<double, std::micro>(stop - start).count();
  return result;
}

FrameResult Pipeline::Compute(const LandmarkFrame& frame) {
  FrameResult result;
  result.t = frame.t;

  const geometry::Vec3* left = nullptr;
  const geometry::Vec3* right = nullptr;
  if (frame.landmarks) {
    const auto confident = [&](std::string_view name) -> const geometry::Vec3* {
      const auto it = frame.landmarks->find(name);
      if (it == frame.landmarks->end()) return nullptr;
      const auto c = frame.confidence.find(name);
      if (c != frame.confidence.end() && c->second < config_.min_confidence) return nullptr;
      return &it->second;
    };
    left = confident(kLeftShoulder);
    right = confident(kRightShoulder);
  }
  if (left == nullptr || right == nullptr) {
    result.skipped = SkipReason::kNoPose;
    return result;
  }

  std::optional<SkipReason> geometry_failure;
  try {
    const geometry::OrientationAngle angle = geometry::OrientationFromShoulders(*left, *right);
    result.theta_rad = angle.theta_rad;
    result.phi_deg = angle.phi_deg;
    result.phi_clamped = angle.clamped;
  } catch (const Error& e) {
    geometry_failure = e.code() == ErrorCode::kNearPiRotation ? SkipReason::kNearPi
                                                              : SkipReason::kDegenerate;
  }

  if (!track_.empty() && frame.t - track_.back().t > config_.staleness_s) track_.Clear();
  const auto& g = config_.geometry;
  const PixelPoint left_px{left->x * g.width_px, left->y * g.height_px};
  const PixelPoint right_px{right->x * g.width_px, right->y * g.height_px};
  track_.Push(frame.t, left_px, right_px);
  result.mid = track_.back().mid;

  if (track_.size() < config_.velocity_window + 1) {
    result.skipped = geometry_failure.value_or(SkipReason::kInsufficientHistory);
    return result;
  }
  const std::size_t w = config_.velocity_window;
  result.v_mid = kinematics::Velocity(track_, w, TrackedPoint::kMid);
  result.v_left = kinematics::Velocity(track_, w, TrackedPoint::kLeft);
  result.v_right = kinematics::Velocity(track_, w, TrackedPoint::kRight);
  result.predicted_future = kinematics::Extrapolate(*result.mid, *result.v_mid, config_.horizon_s);
  result.future_cell = features::CellOf(*result.predicted_future, config_.grid, g);
  result.collision_imminent = CheckCollision(*result.predicted_future, config_.zone);
  if (config_.emit_path) result.path = ProjectPath(track_, w, config_.horizon_s, config_.step_s);

  if (geometry_failure) {
    result.skipped = geometry_failure;
    return result;
  }
  result.discrete = features::Discretize({result.v_mid->vx, result.v_mid->vy, *result.phi_deg},
                                         config_.discretization);
  if (tree_) result.movement_class = id3::Classify(*tree_, *result.discrete);
  return result;
}

void RunStream(const FrameSource& source, Pipeline& pipeline, const ResultSink& sink) {
  while (auto item = source()) {
    if (!item->frame) {
      FrameResult bad;
      bad.t = std::numeric_limits<double>::quiet_NaN();
      bad.skipped = SkipReason::kMalformedFrame;
      sink(bad);
      continue;
    }
    try {
      sink(pipeline.Process(*item->frame));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNonMonotonicTimestamp) throw;
      FrameResult out_of_order;
      out_of_order.t = item->frame->t;
      out_of_order.skipped = SkipReason::kNonMonotonic;
      sink(out_of_order);
    }
  }
}

std::vector<FrameResult> RunFrames(std::span<const LandmarkFrame> frames, Pipeline& pipeline) {
  std::vector<FrameResult> results;
  results.reserve(frames.size());
  std::size_t next = 0;
  RunStream(
      [&]() -> std::optional<StreamItem> {
        if (next == frames.size()) return std::nullopt;
        return StreamItem{frames[next++], {}};
      },
      pipeline, [&](const FrameResult& r) { results.push_back(r); });
  return results;
}

kinematics::Track TrackFromResults(std::span<const FrameResult> results) {
  kinematics::Track track(std::max<std::size_t>(1, results.size()));
  for (const auto& r : results) {
    if (!r.mid) continue;
    track.Push(r.t, *r.mid, *r.mid);
  }
  return track;
}

id3::Dataset LabeledSamples(std::span<const LandmarkFrame> frames, const PipelineConfig& config) {
  Pipeline pipeline(config);
  const std::vector<FrameResult> results = RunFrames(frames, pipeline);
  const kinematics::Track truth = TrackFromResults(results);

  id3::Dataset samples;
  std::size_t track_index = 0;
  for (const auto& r : results) {
    if (!r.mid) continue;
    const std::size_t index = track_index++;
    if (!r.discrete) continue;
    if (!features::FindHorizonEntry(truth, index, config.horizon_s, config.staleness_s)) continue;
    samples.push_back({*r.discrete, features::LabelFromDisplacement(truth, index, config.horizon_s,
                                                                    config.discretization,
                                                                    config.staleness_s)});
  }
  return samples;
}

}  // namespace pedintent::pipeline
