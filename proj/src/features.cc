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

#include "pedintent/features.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pedintent/error.h"

namespace pedintent::features {
namespace {

constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "Stationary",         "ObliqueRightWith", "ObliqueLeftWith",
    "ObliqueRightAgainst", "ObliqueLeftAgainst", "PerpRight",
    "PerpLeft",           "TowardCamera",     "AwayFromCamera"};

constexpr std::array<std::string_view, 3> kSpeedBinNames = {"neg", "zero", "pos"};
constexpr std::array<std::string_view, 3> kPhiBinNames = {"right", "front", "left"};
constexpr std::array<std::string_view, 3> kAttributeNames = {"vx", "vy", "phi"};

// [dx][dy] with bins ordered Neg, Zero, Pos.
constexpr MovementClass kSignTable[3][3] = {
    {MovementClass::kObliqueLeftWith, MovementClass::kPerpLeft,
     MovementClass::kObliqueLeftAgainst},
    {MovementClass::kAwayFromCamera, MovementClass::kStationary, MovementClass::kTowardCamera},
    {MovementClass::kObliqueRightWith, MovementClass::kPerpRight,
     MovementClass::kObliqueRightAgainst},
};

}  // namespace

std::string_view ClassName(MovementClass c) { return kClassNames[static_cast<int>(c)]; }

std::optional<MovementClass> ClassFromName(std::string_view name) {
  for (int i = 0; i < kNumClasses; ++i) {
    if (kClassNames[i] == name) return static_cast<MovementClass>(i);
  }
  return std::nullopt;
}

std::string_view AttributeName(Attribute a) { return kAttributeNames[static_cast<int>(a)]; }

std::optional<Attribute> AttributeFromName(std::string_view name) {
  for (Attribute a : kAllAttributes) {
    if (AttributeName(a) == name) return a;
  }
  return std::nullopt;
}

std::string_view BinName(Attribute a, int value) {
  return a == Attribute::kPhi ? kPhiBinNames.at(value) : kSpeedBinNames.at(value);
}

std::optional<int> BinFromName(Attribute a, std::string_view name) {
  const auto& names = a == Attribute::kPhi ? kPhiBinNames : kSpeedBinNames;
  for (int i = 0; i < 3; ++i) {
    if (names[i] == name) return i;
  }
  return std::nullopt;
}

void DiscretizationConfig::Validate() const {
  if (!(speed_deadzone > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "speed_deadzone must be positive");
  }
  const auto [lo, hi] = phi_bin_edges;
  if (!(lo > 0.0 && lo < hi && hi < 180.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                "phi_bin_edges must be strictly increasing inside (0, 180)");
  }
}

int DiscreteFeatures::Value(Attribute a) const {
  switch (a) {
    case Attribute::kVx: return static_cast<int>(vx);
    case Attribute::kVy: return static_cast<int>(vy);
    case Attribute::kPhi: return static_cast<int>(phi);
  }
  return 0;
}

std::array<DiscreteFeatures, 27> AllDiscreteFeatures() {
  std::array<DiscreteFeatures, 27> all{};
  std::size_t i = 0;
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) {
      for (int p = 0; p < 3; ++p) {
        all[i++] = {static_cast<SpeedBin>(x), static_cast<SpeedBin>(y), static_cast<PhiBin>(p)};
      }
    }
  }
  return all;
}

DiscreteFeatures Discretize(const FeatureVector& fv, const DiscretizationConfig& cfg) {
  return {SpeedBinGeneric(fv.vx, cfg.speed_deadzone), SpeedBinGeneric(fv.vy, cfg.speed_deadzone),
          PhiBinGeneric(fv.phi_deg, cfg.phi_bin_edges[0], cfg.phi_bin_edges[1])};
}

MovementClass ClassFromSigns(SpeedBin dx, SpeedBin dy) {
  return kSignTable[static_cast<int>(dx)][static_cast<int>(dy)];
}

std::pair<SpeedBin, SpeedBin> SignsOfClass(MovementClass c) {
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) {
      if (kSignTable[x][y] == c) return {static_cast<SpeedBin>(x), static_cast<SpeedBin>(y)};
    }
  }
  return {SpeedBin::kZero, SpeedBin::kZero};
}

kinematics::Velocity2D DirectionOfClass(MovementClass c) {
  const auto [sx, sy] = SignsOfClass(c);
  double dx = static_cast<int>(sx) - 1;
  double dy = static_cast<int>(sy) - 1;
  if (dx != 0.0 && dy != 0.0) {
    dx *= std::numbers::sqrt2 / 2.0;
    dy *= std::numbers::sqrt2 / 2.0;
  }
  return {dx, dy};
}

std::optional<std::size_t> FindHorizonEntry(const kinematics::Track& track,
                                            std::size_t reference, double horizon_s,
                                            double max_overshoot_s) {
  if (reference >= track.size()) return std::nullopt;
  const double target = track[reference].t + horizon_s;
  // Tolerate float drift in timestamps like i / fps.
  const double slack = 1e-9 * std::max(1.0, std::abs(target));
  for (std::size_t j = reference + 1; j < track.size(); ++j) {
    if (track[j].t >= target - slack) {
      if (track[j].t - target > max_overshoot_s) return std::nullopt;
      return j;
    }
  }
  return std::nullopt;
}

MovementClass LabelFromDisplacement(const kinematics::Track& track, std::size_t reference,
                                    double horizon_s, const DiscretizationConfig& cfg,
                                    double max_overshoot_s) {
  const auto target = FindHorizonEntry(track, reference, horizon_s, max_overshoot_s);
  if (!target) {
    throw Error(ErrorCode::kInsufficientHorizon,
                "no observation " + std::to_string(horizon_s) + " s after entry " +
                    std::to_string(reference));
  }
  const auto& from = track[reference];
  const auto& to = track[*target];
  const double dt = to.t - from.t;
  const double vx = (to.mid.x - from.mid.x) / dt;
  const double vy = (to.mid.y - from.mid.y) / dt;
  return ClassFromSigns(SpeedBinGeneric(vx, cfg.speed_deadzone),
                        SpeedBinGeneric(vy, cfg.speed_deadzone));
}

GridCell CellOf(kinematics::PixelPoint p, const GridSpec& grid,
                const kinematics::FrameGeometry& geometry) {
  const double cell_w = static_cast<double>(geometry.width_px) / grid.cols;
  const double cell_h = static_cast<double>(geometry.height_px) / grid.rows;
  const auto index = [](double v, double size, int count) {
    const double raw = std::floor(v / size);
    return static_cast<int>(std::clamp(raw, 0.0, static_cast<double>(count - 1)));
  };
  return {index(p.x, cell_w, grid.cols), index(p.y, cell_h, grid.rows)};
}

GridCell FutureCoordinateLabel(const kinematics::Track& track, std::size_t reference,
                               double horizon_s, const GridSpec& grid,
                               const kinematics::FrameGeometry& geometry) {
  const auto target = FindHorizonEntry(track, reference, horizon_s);
  if (!target) {
    throw Error(ErrorCode::kInsufficientHorizon,
                "no observation " + std::to_string(horizon_s) + " s after entry " +
                    std::to_string(reference));
  }
  return CellOf(track[*target].mid, grid, geometry);
}

}  // namespace pedintent::features
