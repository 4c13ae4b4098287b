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

// Movement taxonomy and feature discretization.

#ifndef PEDINTENT_FEATURES_H_
#define PEDINTENT_FEATURES_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "pedintent/kinematics.h"

namespace pedintent::features {

enum class SpeedBin : std::uint8_t { kNeg = 0, kZero = 1, kPos = 2 };
enum class PhiBin : std::uint8_t { kRight = 0, kFront = 1, kLeft = 2 };

enum class Attribute : std::uint8_t { kVx = 0, kVy = 1, kPhi = 2 };
inline constexpr std::array<Attribute, 3> kAllAttributes = {Attribute::kVx, Attribute::kVy,
                                                            Attribute::kPhi};
inline constexpr int kBinsPerAttribute = 3;

// Case 0 is Stationary; cases 1-8 are the directional movements. "With"
// means along the camera's travel direction (receding, y decreasing) and
// "Against" means approaching (y increasing).
enum class MovementClass : std::uint8_t {
  kStationary = 0,
  kObliqueRightWith = 1,
  kObliqueLeftWith = 2,
  kObliqueRightAgainst = 3,
  kObliqueLeftAgainst = 4,
  kPerpRight = 5,
  kPerpLeft = 6,
  kTowardCamera = 7,
  kAwayFromCamera = 8,
};
inline constexpr int kNumClasses = 9;
inline constexpr std::array<MovementClass, kNumClasses> kAllClasses = {
    MovementClass::kStationary,          MovementClass::kObliqueRightWith,
    MovementClass::kObliqueLeftWith,     MovementClass::kObliqueRightAgainst,
    MovementClass::kObliqueLeftAgainst,  MovementClass::kPerpRight,
    MovementClass::kPerpLeft,            MovementClass::kTowardCamera,
    MovementClass::kAwayFromCamera};

std::string_view ClassName(MovementClass c);
std::optional<MovementClass> ClassFromName(std::string_view name);
std::string_view AttributeName(Attribute a);
std::optional<Attribute> AttributeFromName(std::string_view name);
// "neg"/"zero"/"pos" for speeds, "right"/"front"/"left" for phi.
std::string_view BinName(Attribute a, int value);
std::optional<int> BinFromName(Attribute a, std::string_view name);

struct FeatureVector {
  double vx = 0.0;
  double vy = 0.0;
  double phi_deg = 0.0;
};

struct DiscretizationConfig {
  double speed_deadzone = 5.0;
  std::array<double, 2> phi_bin_edges = {60.0, 120.0};

  // Throws Error{kInvalidConfig}.
  void Validate() const;
};

struct DiscreteFeatures {
  SpeedBin vx = SpeedBin::kZero;
  SpeedBin vy = SpeedBin::kZero;
  PhiBin phi = PhiBin::kRight;

  int Value(Attribute a) const;
  friend constexpr bool operator==(DiscreteFeatures, DiscreteFeatures) = default;
};

// All 27 combinations, vx-major.
std::array<DiscreteFeatures, 27> AllDiscreteFeatures();

// |v| <= deadzone is Zero.
template <typename Real>
SpeedBin SpeedBinGeneric(const Real& v, const Real& deadzone) {
  if (v > deadzone) return SpeedBin::kPos;
  if (v < -deadzone) return SpeedBin::kNeg;
  return SpeedBin::kZero;
}

// [0, e0) Right, [e0, e1) Front, [e1, 180] Left.
template <typename Real>
PhiBin PhiBinGeneric(const Real& phi, const Real& lower_edge, const Real& upper_edge) {
  if (phi < lower_edge) return PhiBin::kRight;
  if (phi < upper_edge) return PhiBin::kFront;
  return PhiBin::kLeft;
}

DiscreteFeatures Discretize(const FeatureVector& fv, const DiscretizationConfig& cfg);

MovementClass ClassFromSigns(SpeedBin dx, SpeedBin dy);
// Inverse of ClassFromSigns.
std::pair<SpeedBin, SpeedBin> SignsOfClass(MovementClass c);
// Unit image-plane direction of travel for a class; zero for Stationary.
kinematics::Velocity2D DirectionOfClass(MovementClass c);

// Index of the first entry at least `horizon_s` after `reference`, or
// nullopt. Entries more than `max_overshoot_s` past the horizon do not count.
std::optional<std::size_t> FindHorizonEntry(const kinematics::Track& track,
                                            std::size_t reference, double horizon_s,
                                            double max_overshoot_s = 1.0);

// Ground truth from realized displacement between `reference` and the
// horizon entry. The displacement is turned into an average speed before
// comparing against the deadzone. Throws Error{kInsufficientHorizon}.
MovementClass LabelFromDisplacement(const kinematics::Track& track, std::size_t reference,
                                    double horizon_s, const DiscretizationConfig& cfg,
                                    double max_overshoot_s = 1.0);

struct GridSpec {
  int cols = 4;
  int rows = 4;
};

struct GridCell {
  int col = 0;
  int row = 0;
  friend constexpr bool operator==(GridCell, GridCell) = default;
};

// Clamped to the grid so off-frame points land in the border cells.
GridCell CellOf(kinematics::PixelPoint p, const GridSpec& grid,
                const kinematics::FrameGeometry& geometry);

GridCell FutureCoordinateLabel(const kinematics::Track& track, std::size_t reference,
                               double horizon_s, const GridSpec& grid,
                               const kinematics::FrameGeometry& geometry);

}  // namespace pedintent::features

#endif  // PEDINTENT_FEATURES_H_
