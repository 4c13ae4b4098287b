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

// Body orientation from two shoulder landmarks.
//
// The chain is: look-at rotation matrix built from the shoulder axis, unit
// quaternion from that matrix, quaternion half-angle theta, and finally the
// linear calibration that maps theta onto the camera-horizon facing angle
// phi in degrees.

#ifndef PEDINTENT_GEOMETRY_H_
#define PEDINTENT_GEOMETRY_H_

#include <array>
#include <span>

namespace pedintent::geometry {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

double Dot(const Vec3& a, const Vec3& b);
Vec3 Cross(const Vec3& a, const Vec3& b);
double Norm(const Vec3& v);

// Row-major 3x3 rotation; r[row][col].
struct RotationMatrix {
  std::array<std::array<double, 3>, 3> r{};

  static RotationMatrix Identity();
  static RotationMatrix FromColumns(const Vec3& c0, const Vec3& c1, const Vec3& c2);

  Vec3 Column(int c) const { return {r[0][c], r[1][c], r[2][c]}; }
  double Trace() const { return r[0][0] + r[1][1] + r[2][2]; }
  double Determinant() const;
  // Largest absolute entry of R^T R - I.
  double OrthonormalityError() const;
};

// Scalar-first: a + bi + cj + dk.
struct Quaternion {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  double Norm() const;
};

struct OrientationAngle {
  double theta_rad = 0.0;
  double phi_deg = 0.0;
  // True when the raw calibrated value fell outside [0, 180] and was clamped.
  bool clamped = false;
};

struct CalibrationFit {
  double slope = 0.0;
  double intercept = 0.0;
};

struct CalibrationSample {
  double theta_deg = 0.0;
  double phi_deg = 0.0;
};

inline constexpr Vec3 kWorldUp{0.0, 1.0, 0.0};
inline constexpr double kCalibrationSlope = 4.0;
inline constexpr double kCalibrationIntercept = -180.0;
inline constexpr double kPhiMinDeg = 0.0;
inline constexpr double kPhiMaxDeg = 180.0;

// Columns are [x y z]: x is the normalized shoulder axis (left - right),
// z = normalize(x cross worldUp), y = z cross x.
// Throws Error{kDegenerateLandmarks} when the shoulders coincide or the
// shoulder axis is parallel to worldUp.
RotationMatrix LookAtRotation(const Vec3& left_shoulder, const Vec3& right_shoulder);

// Trace-branch conversion only:
//   a = sqrt(|1 + trace|) / 2, b = (r21 - r12) / 4a, c = (r02 - r20) / 4a,
//   d = (r10 - r01) / 4a.
// Throws Error{kNearPiRotation} when 1 + trace <= 4e-12.
Quaternion QuaternionFromMatrix(const RotationMatrix& rotation);

// arccos(a / |q|), in [0, pi]. Throws Error{kZeroQuaternion} for |q| <= 1e-12.
double ThetaFromQuaternion(const Quaternion& q);

// theta * 180/pi * slope + intercept, before clamping.
double RawPhiFromTheta(double theta_rad, const CalibrationFit& fit = {kCalibrationSlope,
                                                                     kCalibrationIntercept});
// Clamped to [0, 180]; `clamped` (optional) reports whether clamping applied.
double PhiFromTheta(double theta_rad, bool* clamped = nullptr);

// Ordinary least squares over (theta_deg, phi_deg) samples.
// Throws Error{kInsufficientSamples} for fewer than two distinct abscissae.
CalibrationFit FitCalibration(std::span<const CalibrationSample> samples);

OrientationAngle OrientationFromShoulders(const Vec3& left_shoulder, const Vec3& right_shoulder);

}  // namespace pedintent::geometry

#endif  // PEDINTENT_GEOMETRY_H_
