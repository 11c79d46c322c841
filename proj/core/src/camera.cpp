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

#include "monoflex/camera.hpp"

#include <cmath>
#include <string>

#include "monoflex/errors.hpp"

namespace monoflex {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw PreconditionError("camera focal lengths must be positive");
  }
  if (image_w <= 0 || image_h <= 0) {
    throw PreconditionError("camera image size must be positive");
  }
}

Point2 project(const Point3& p, const CameraIntrinsics& K) {
  if (!(p.z > 0.0)) {
    throw DomainError("project: point depth must be positive, got " + std::to_string(p.z));
  }
  return {(K.fx * p.x + K.tx) / p.z + K.cu, (K.fy * p.y + K.ty) / p.z + K.cv};
}

Point3 backproject(const Point2& q, double z, const CameraIntrinsics& K) {
  if (!(z > 0.0)) {
    throw DomainError("backproject: depth must be positive, got " + std::to_string(z));
  }
  return {((q.u - K.cu) * z - K.tx) / K.fx, ((q.v - K.cv) * z - K.ty) / K.fy, z};
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * kPi;
  if (a > -kPi && a <= kPi) return a;
  double r = std::fmod(a, two_pi);  // (-2pi, 2pi)
  if (r > kPi) r -= two_pi;
  if (r <= -kPi) r += two_pi;
  return r;
}

namespace {

void require_positive_depth(double z, const char* op) {
  if (!(z > 0.0)) {
    throw DomainError(std::string(op) + ": depth must be positive, got " + std::to_string(z));
  }
}

}  // namespace

double alpha_to_ry(double alpha, double x, double z) {
  require_positive_depth(z, "alpha_to_ry");
  return wrap_angle(alpha + std::atan(x / z));
}

double ry_to_alpha(double ry, double x, double z) {
  require_positive_depth(z, "ry_to_alpha");
  return wrap_angle(ry - std::atan(x / z));
}

}  // namespace monoflex
