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

#include "pedintent/geometry.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pedintent/error.h"

namespace pedintent::geometry {
namespace {

constexpr double kDegenerateEps = 1e-9;
constexpr double kNearPiEps = 4e-12;
constexpr double kZeroNormEps = 1e-12;

}  // namespace

double Dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 Cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double Norm(const Vec3& v) { return std::sqrt(Dot(v, v)); }

RotationMatrix RotationMatrix::Identity() {
  RotationMatrix m;
  for (int i = 0; i < 3; ++i) m.r[i][i] = 1.0;
  return m;
}

RotationMatrix RotationMatrix::FromColumns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
  RotationMatrix m;
  const Vec3 cols[3] = {c0, c1, c2};
  for (int c = 0; c < 3; ++c) {
    m.r[0][c] = cols[c].x;
    m.r[1][c] = cols[c].y;
    m.r[2][c] = cols[c].z;
  }
  return m;
}

double RotationMatrix::Determinant() const {
  return r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) -
         r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
         r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
}

double RotationMatrix::OrthonormalityError() const {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) dot += r[k][i] * r[k][j];
      worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

double Quaternion::Norm() const { return std::sqrt(a * a + b * b + c * c + d * d); }

RotationMatrix LookAtRotation(const Vec3& left_shoulder, const Vec3& right_shoulder) {
  const Vec3 axis = left_shoulder - right_shoulder;
  const double axis_norm = Norm(axis);
  if (!(axis_norm > kDegenerateEps)) {
    throw Error(ErrorCode::kDegenerateLandmarks, "shoulder landmarks coincide");
  }
  const Vec3 x_hat = (1.0 / axis_norm) * axis;
  const Vec3 forward = Cross(x_hat, kWorldUp);
  const double forward_norm = Norm(forward);
  if (!(forward_norm > kDegenerateEps)) {
    throw Error(ErrorCode::kDegenerateLandmarks, "shoulder axis is parallel to the up vector");
  }
  const Vec3 z_hat = (1.0 / forward_norm) * forward;
  const Vec3 y_hat = Cross(z_hat, x_hat);
  return RotationMatrix::FromColumns(x_hat, y_hat, z_hat);
}

Quaternion QuaternionFromMatrix(const RotationMatrix& m) {
  const double one_plus_trace = 1.0 + m.Trace();
  if (!(one_plus_trace > kNearPiEps)) {
    throw Error(ErrorCode::kNearPiRotation,
                "1 + trace = " + std::to_string(one_plus_trace) + " is too close to zero");
  }
  const auto& r = m.r;
  Quaternion q;
  q.a = 0.5 * std::sqrt(std::abs(one_plus_trace));
  const double inv_4a = 1.0 / (4.0 * q.a);
  q.b = (r[2][1] - r[1][2]) * inv_4a;
  q.c = (r[0][2] - r[2][0]) * inv_4a;
  q.d = (r[1][0] - r[0][1]) * inv_4a;
  return q;
}

double ThetaFromQuaternion(const Quaternion& q) {
  const double norm = q.Norm();
  if (!(norm > kZeroNormEps)) {
    throw Error(ErrorCode::kZeroQuaternion, "quaternion norm is zero");
  }
  return std::acos(std::clamp(q.a / norm, -1.0, 1.0));
}

double RawPhiFromTheta(double theta_rad, const CalibrationFit& fit) {
  return theta_rad * (180.0 / std::numbers::pi) * fit.slope + fit.intercept;
}

double PhiFromTheta(double theta_rad, bool* clamped) {
  const double raw = RawPhiFromTheta(theta_rad);
  const double phi = std::clamp(raw, kPhiMinDeg, kPhiMaxDeg);
  if (clamped != nullptr) *clamped = phi != raw;
  return phi;
}

CalibrationFit FitCalibration(std::span<const CalibrationSample> samples) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::kInsufficientSamples, "need at least two calibration samples");
  }
  const double n = static_cast<double>(samples.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& s : samples) {
    mean_x += s.theta_deg;
    mean_y += s.phi_deg;
  }
  mean_x /= n;
  mean_y /= n;
  // Centered sums keep the fit well conditioned for abscissae far from zero.
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& s : samples) {
    const double dx = s.theta_deg - mean_x;
    sxx += dx * dx;
    sxy += dx * (s.phi_deg - mean_y);
  }
  if (!(sxx > 0.0)) {
    throw Error(ErrorCode::kInsufficientSamples, "calibration samples share a single theta value");
  }
  CalibrationFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  return fit;
}

OrientationAngle OrientationFromShoulders(const Vec3& left_shoulder, const Vec3& right_shoulder) {
  const RotationMatrix rotation = LookAtRotation(left_shoulder, right_shoulder);
  const Quaternion q = QuaternionFromMatrix(rotation);
  OrientationAngle angle;
  angle.theta_rad = ThetaFromQuaternion(q);
  angle.phi_deg = PhiFromTheta(angle.theta_rad, &angle.clamped);
  return angle;
}

}  // namespace pedintent::geometry
