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

#ifndef PEDINTENT_KINEMATICS_H_
#define PEDINTENT_KINEMATICS_H_

#include <cstddef>
#include <deque>

namespace pedintent::kinematics {

// Pixel position; origin at the top-left of the frame, y grows downward.
struct PixelPoint {
  double x = 0.0;
  double y = 0.0;
  friend constexpr bool operator==(PixelPoint, PixelPoint) = default;
};

// Pixels per second.
struct Velocity2D {
  double vx = 0.0;
  double vy = 0.0;
  friend constexpr bool operator==(Velocity2D, Velocity2D) = default;
};

struct FrameGeometry {
  int width_px = 432;
  int height_px = 432;
  double cone_width_m = 10.0;

  // Throws Error{kInvalidConfig}.
  void Validate() const;
};

struct TrackEntry {
  double t = 0.0;
  PixelPoint left;
  PixelPoint right;
  PixelPoint mid;
};

enum class TrackedPoint { kMid, kLeft, kRight };

// Bounded history of one pedestrian's shoulder positions. Oldest entries are
// evicted once `capacity` is reached; timestamps are strictly increasing.
class Track {
 public:
  explicit Track(std::size_t capacity);

  // Throws Error{kNonMonotonicTimestamp} unless t is after the last entry.
  void Push(double t, PixelPoint left, PixelPoint right);
  void Clear() { entries_.clear(); }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  // 0 is the oldest retained entry.
  const TrackEntry& operator[](std::size_t i) const { return entries_[i]; }
  const TrackEntry& back() const { return entries_.back(); }

 private:
  std::size_t capacity_;
  std::deque<TrackEntry> entries_;
};

// Endpoint difference over the last `window` steps divided by the elapsed
// time. Throws Error{kInsufficientHistory} with fewer than window + 1 entries.
Velocity2D Velocity(const Track& track, std::size_t window,
                    TrackedPoint point = TrackedPoint::kMid);

// p + v * horizon, written once for any arithmetic type so the op-count
// instrumentation runs the same expression as production code.
template <typename Real>
struct ExtrapolationT {
  Real x;
  Real y;
};

template <typename Real>
ExtrapolationT<Real> ExtrapolateGeneric(const Real& px, const Real& py, const Real& vx,
                                        const Real& vy, const Real& horizon) {
  return {px + vx * horizon, py + vy * horizon};
}

// No clamping to the frame: extrapolated points may leave it.
PixelPoint Extrapolate(PixelPoint p, Velocity2D v, double horizon_s);

double PixelsToMeters(double distance_px, const FrameGeometry& geometry);

}  // namespace pedintent::kinematics

#endif  // PEDINTENT_KINEMATICS_H_
