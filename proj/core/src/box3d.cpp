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

#include "monoflex/box3d.hpp"

#include <cmath>

#include "monoflex/errors.hpp"

namespace monoflex {

std::array<Point3, kNumCorners> corners(const Box3D& b) {
  const double hl = 0.5 * b.l;
  const double hw = 0.5 * b.w;
  // Box-frame footprint, counterclockwise seen from -y.
  const std::array<double, 4> fx = {hl, -hl, -hl, hl};
  const std::array<double, 4> fz = {hw, hw, -hw, -hw};

  const double c = std::cos(b.ry);
  const double s = std::sin(b.ry);

  std::array<Point3, kNumCorners> out{};
  for (int i = 0; i < 4; ++i) {
    const double x = c * fx[i] + s * fz[i];
    const double z = -s * fx[i] + c * fz[i];
    out[i] = {b.location.x + x, b.location.y, b.location.z + z};
    out[i + 4] = {b.location.x + x, b.location.y - b.h, b.location.z + z};
  }
  return out;
}

Keypoints10 keypoints10(const Box3D& b, const CameraIntrinsics& K) {
  const auto verts = corners(b);
  for (const auto& v : verts) {
    if (!(v.z > 0.0)) {
      throw DomainError("keypoints10: box corner behind the camera (z = " + std::to_string(v.z) + ")");
    }
  }

  Keypoints10 kp;
  for (int i = 0; i < kNumCorners; ++i) kp.pts[i] = project(verts[i], K);
  kp.pts[kBottomCenter] = project(b.location, K);
  kp.pts[kTopCenter] = project({b.location.x, b.location.y - b.h, b.location.z}, K);
  for (int i = 0; i < kNumKeypoints; ++i) kp.inside[i] = K.contains(kp.pts[i]);
  return kp;
}

double corner_loss(const Box3D& pred, const Box3D& gt) {
  const auto a = corners(pred);
  const auto b = corners(gt);
  double sum = 0.0;
  for (int i = 0; i < kNumCorners; ++i) {
    sum += std::abs(a[i].x - b[i].x) + std::abs(a[i].y - b[i].y) + std::abs(a[i].z - b[i].z);
  }
  return sum;
}

}  // namespace monoflex
