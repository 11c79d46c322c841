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

// Independent reference implementations used as test oracles. They share
// no code with the library beyond the plain data types.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "monoflex/box2d.hpp"
#include "monoflex/box3d.hpp"
#include "monoflex/camera.hpp"
#include "monoflex/feature_map.hpp"

namespace monoflex::oracle {

inline constexpr double kPi = 3.14159265358979323846;

// Is p inside the yaw-rotated box? Works in the box frame.
inline bool box_contains(const Box3D& b, const Point3& p) {
  const double dx = p.x - b.location.x;
  const double dz = p.z - b.location.z;
  const double c = std::cos(b.ry), s = std::sin(b.ry);
  // Inverse of x' = c x + s z, z' = -s x + c z.
  const double bx = c * dx - s * dz;
  const double bz = s * dx + c * dz;
  return std::abs(bx) <= 0.5 * b.l && std::abs(bz) <= 0.5 * b.w && p.y <= b.location.y &&
         p.y >= b.location.y - b.h;
}

// Monte-Carlo 3D IoU over the joint axis-aligned bounding volume.
inline double mc_iou3d(const Box3D& a, const Box3D& b, int samples, std::mt19937_64& rng) {
  const double ra = 0.5 * std::hypot(a.l, a.w), rb = 0.5 * std::hypot(b.l, b.w);
  const double x0 = std::min(a.location.x - ra, b.location.x - rb), x1 = std::max(a.location.x + ra, b.location.x + rb);
  const double z0 = std::min(a.location.z - ra, b.location.z - rb), z1 = std::max(a.location.z + ra, b.location.z + rb);
  const double y0 = std::min(a.location.y - a.h, b.location.y - b.h), y1 = std::max(a.location.y, b.location.y);
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1), uz(z0, z1);
  long in_a = 0, in_b = 0, both = 0;
  for (int i = 0; i < samples; ++i) {
    const Point3 p{ux(rng), uy(rng), uz(rng)};
    const bool ia = box_contains(a, p), ib = box_contains(b, p);
    in_a += ia;
    in_b += ib;
    both += ia && ib;
  }
  const double uni = static_cast<double>(in_a + in_b - both);
  return uni > 0 ? both / uni : 0.0;
}

// Corners written out longhand from the box definition.
inline std::array<Point3, 8> naive_corners(const Box3D& b) {
  const double hl = b.l / 2, hw = b.w / 2;
  const double fx[4] = {hl, -hl, -hl, hl};
  const double fz[4] = {hw, hw, -hw, -hw};
  std::array<Point3, 8> out{};
  for (int i = 0; i < 8; ++i) {
    const int k = i % 4;
    const double x = std::cos(b.ry) * fx[k] + std::sin(b.ry) * fz[k];
    const double z = -std::sin(b.ry) * fx[k] + std::cos(b.ry) * fz[k];
    out[i] = {b.location.x + x, b.location.y - (i < 4 ? 0.0 : b.h), b.location.z + z};
  }
  return out;
}

inline double naive_wrap(double a) {
  while (a > kPi) a -= 2 * kPi;
  while (a <= -kPi) a += 2 * kPi;
  return a;
}

inline double naive_iou2d(const Box2D& a, const Box2D& b) {
  const double iw = std::max(0.0, std::min(a.u2, b.u2) - std::max(a.u1, b.u1));
  const double ih = std::max(0.0, std::min(a.v2, b.v2) - std::max(a.v1, b.v1));
  const double inter = iw * ih;
  const double uni = (a.u2 - a.u1) * (a.v2 - a.v1) + (b.u2 - b.u1) * (b.v2 - b.v1) - inter;
  return uni > 0 ? inter / uni : 0.0;
}

// Random yaw box in front of the camera.
inline Box3D random_box(std::mt19937_64& rng, double zlo = 5.0, double zhi = 60.0) {
  std::uniform_real_distribution<double> ux(-15, 15), uy(1.0, 2.0), uz(zlo, zhi), ud(0.4, 4.5), ua(-kPi, kPi);
  return {{ux(rng), uy(rng), uz(rng)}, ud(rng), ud(rng), ud(rng), ua(rng)};
}

inline double naive_focal(const FeatureMap& p, const FeatureMap& g, double a, double b) {
  double sum = 0;
  int n = 0;
  for (int r = 0; r < p.h(); ++r) {
    for (int c = 0; c < p.w(); ++c) {
      for (int k = 0; k < p.c(); ++k) {
        const double x = p.at(r, c, k), y = g.at(r, c, k);
        if (y == 1.0) {
          sum += std::pow(1 - x, a) * std::log(x);
          ++n;
        } else {
          sum += std::pow(1 - y, b) * std::pow(x, a) * std::log(1 - x);
        }
      }
    }
  }
  return -sum / (n > 0 ? n : 1);
}

// Angle-difference bin membership written without wrap_angle.
inline std::vector<int> naive_cover(double alpha, const std::vector<double>& centers, double margin) {
  std::vector<int> out;
  for (std::size_t b = 0; b < centers.size(); ++b) {
    double d = std::fmod(std::abs(alpha - centers[b]), 2 * kPi);
    d = std::min(d, 2 * kPi - d);
    if (d <= kPi / centers.size() + margin) out.push_back(static_cast<int>(b));
  }
  return out;
}

inline double naive_multibin(const std::vector<double>& logits, const std::vector<double>& res, double alpha,
                      const std::vector<double>& centers, double margin) {
  double z = 0;
  for (double l : logits) z += std::exp(l);
  const auto cover = naive_cover(alpha, centers, margin);
  double ce = 0, l1 = 0;
  for (int b : cover) {
    ce += -std::log(std::exp(logits[b]) / z);
    const double d = alpha - centers[b];
    l1 += std::abs(res[2 * b] - std::sin(d)) + std::abs(res[2 * b + 1] - std::cos(d));
  }
  return (ce + l1) / cover.size();
}

inline double naive_giou_loss(const Box2D& a, const Box2D& b) {
  const double iou = naive_iou2d(a, b);
  const double inter_w = std::max(0.0, std::min(a.u2, b.u2) - std::max(a.u1, b.u1));
  const double inter_h = std::max(0.0, std::min(a.v2, b.v2) - std::max(a.v1, b.v1));
  const double uni = (a.u2 - a.u1) * (a.v2 - a.v1) + (b.u2 - b.u1) * (b.v2 - b.v1) - inter_w * inter_h;
  const double cw = std::max(a.u2, b.u2) - std::min(a.u1, b.u1);
  const double ch = std::max(a.v2, b.v2) - std::min(a.v1, b.v1);
  return 1 - iou + (cw * ch - uni) / (cw * ch);
}

}  // namespace monoflex::oracle
