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

#include "pedintent/kinematics.h"

#include <cmath>
#include <string>

#include "pedintent/error.h"

namespace pedintent::kinematics {

void FrameGeometry::Validate() const {
  if (width_px <= 0 || height_px <= 0 || !(cone_width_m > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "frame geometry dimensions must be positive");
  }
}

Track::Track(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw Error(ErrorCode::kInvalidConfig, "track capacity must be positive");
}

void Track::Push(double t, PixelPoint left, PixelPoint right) {
  if (!entries_.empty() && !(t > entries_.back().t)) {
    throw Error(ErrorCode::kNonMonotonicTimestamp,
                "timestamp " + std::to_string(t) + " does not follow " +
                    std::to_string(entries_.back().t));
  }
  if (entries_.size() == capacity_) entries_.pop_front();
  const PixelPoint mid{(left.x + right.x) / 2.0, (left.y + right.y) / 2.0};
  entries_.push_back({t, left, right, mid});
}

namespace {

PixelPoint Select(const TrackEntry& e, TrackedPoint point) {
  switch (point) {
    case TrackedPoint::kLeft: return e.left;
    case TrackedPoint::kRight: return e.right;
    case TrackedPoint::kMid: break;
  }
  return e.mid;
}

}  // namespace

Velocity2D Velocity(const Track& track, std::size_t window, TrackedPoint point) {
  if (window == 0 || track.size() < window + 1) {
    throw Error(ErrorCode::kInsufficientHistory,
                "velocity window " + std::to_string(window) + " needs " +
                    std::to_string(window + 1) + " entries, track has " +
                    std::to_string(track.size()));
  }
  const TrackEntry& last = track.back();
  const TrackEntry& first = track[track.size() - 1 - window];
  const double dt = last.t - first.t;
  const PixelPoint p1 = Select(last, point);
  const PixelPoint p0 = Select(first, point);
  return {(p1.x - p0.x) / dt, (p1.y - p0.y) / dt};
}

PixelPoint Extrapolate(PixelPoint p, Velocity2D v, double horizon_s) {
  const auto e = ExtrapolateGeneric(p.x, p.y, v.vx, v.vy, horizon_s);
  return {e.x, e.y};
}

double PixelsToMeters(double distance_px, const FrameGeometry& geometry) {
  return distance_px * geometry.cone_width_m / static_cast<double>(geometry.width_px);
}

}  // namespace pedintent::kinematics
