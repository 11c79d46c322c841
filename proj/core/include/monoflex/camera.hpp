// Copyright (c) 2026, The monoflex-geom Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <numbers>

namespace monoflex {

struct Point2 {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

// Camera frame: x right, y down, z forward (KITTI rectified camera).
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
  friend Point3 operator+(const Point3& a, const Point3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Point3 operator-(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
};

/// Pinhole intrinsics taken from a KITTI P2 matrix:
///
///   P2 = [fx  0  cu  tx]
///        [ 0 fy  cv  ty]
///        [ 0  0   1   0]
///
/// With tx = ty = 0 and fx = fy = f this is the plain pinhole model used by
/// the center/depth decomposition.
struct CameraIntrinsics {
  double fx = 721.5377;
  double fy = 721.5377;
  double cu = 609.5593;
  double cv = 172.854;
  double tx = 0.0;
  double ty = 0.0;
  int image_w = 1280;
  int image_h = 384;

  // Throws PreconditionError unless fx, fy, image_w, image_h are positive.
  void validate() const;

  bool contains(const Point2& q) const {
    return q.u >= 0.0 && q.u < image_w && q.v >= 0.0 && q.v < image_h;
  }
};

// u = (fx x + tx) / z + cu, v = (fy y + ty) / z + cv. Throws DomainError for z <= 0.
Point2 project(const Point3& p, const CameraIntrinsics& K);

// Inverse of project() at a known depth. Throws DomainError for z <= 0.
Point3 backproject(const Point2& q, double z, const CameraIntrinsics& K);

// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

// Global yaw from local (viewing-relative) yaw: ry = wrap(alpha + atan(x / z)).
double alpha_to_ry(double alpha, double x, double z);
double ry_to_alpha(double ry, double x, double z);

inline constexpr double kPi = std::numbers::pi;

}  // namespace monoflex
