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

#include "monoflex/depthsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "monoflex/errors.hpp"

namespace monoflex {

std::string_view to_string(DepthSource s) {
  switch (s) {
    case DepthSource::Direct: return "direct";
    case DepthSource::Center: return "center";
    case DepthSource::Diag1: return "diag1";
    case DepthSource::Diag2: return "diag2";
  }
  return "unknown";
}

DepthSource depth_source_from_string(std::string_view name) {
  if (name == "direct") return DepthSource::Direct;
  if (name == "center") return DepthSource::Center;
  if (name == "diag1") return DepthSource::Diag1;
  if (name == "diag2") return DepthSource::Diag2;
  throw PreconditionError("unknown depth source '" + std::string(name) + "'");
}

double direct_depth(double raw) {
  // 1/sigmoid(x) - 1 == exp(-x); clamp so the result stays finite and positive.
  constexpr double kLimit = 700.0;
  return std::exp(-std::clamp(raw, -kLimit, kLimit));
}

double direct_depth_inverse(double z) {
  if (!(z > 0.0)) throw DomainError("direct_depth_inverse: depth must be positive");
  return -std::log(z);
}

double line_depth(double pixel_height, double object_height, double focal) {
  if (!(pixel_height > 0.0)) throw DomainError("line_depth: degenerate keypoints, pixel height <= 0");
  if (!(object_height > 0.0)) throw DomainError("line_depth: object height must be positive");
  if (!(focal > 0.0)) throw DomainError("line_depth: focal length must be positive");
  return focal * object_height / pixel_height;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Depth from the vertical line bottom -> top, NaN when degenerate.
double try_line_depth(const Keypoints10& kps, int bottom, int top, double H, double f) {
  const double h_l = kps.pts[bottom].v - kps.pts[top].v;
  if (!(h_l > 0.0) || !(H > 0.0) || !(f > 0.0)) return kNaN;
  return f * H / h_l;
}

DepthEstimate diagonal_group(const Keypoints10& kps, int a, int b, double H, double f, DepthSource src) {
  const double za = try_line_depth(kps, a, a + 4, H, f);
  const double zb = try_line_depth(kps, b, b + 4, H, f);
  DepthEstimate est;
  est.source = src;
  est.valid = kps.inside[a] && kps.inside[a + 4] && kps.inside[b] && kps.inside[b + 4];
  if (std::isfinite(za) && std::isfinite(zb)) {
    est.z = 0.5 * (za + zb);
  } else {
    est.valid = false;
    est.z = std::isfinite(za) ? za : zb;
  }
  return est;
}

std::vector<const DepthEstimate*> participants(std::span<const DepthEstimate> estimates) {
  if (estimates.empty()) throw PreconditionError("depth ensemble over an empty estimate list");
  for (const auto& e : estimates) {
    if (!(e.sigma > 0.0)) throw DomainError("depth ensemble: sigma must be positive");
  }
  std::vector<const DepthEstimate*> out;
  for (const auto& e : estimates) {
    if (e.valid && std::isfinite(e.z)) out.push_back(&e);
  }
  if (!out.empty()) return out;
  for (const auto& e : estimates) {
    if (e.source == DepthSource::Direct && std::isfinite(e.z)) out.push_back(&e);
  }
  if (!out.empty()) return out;
  for (const auto& e : estimates) {
    if (std::isfinite(e.z)) out.push_back(&e);
  }
  if (out.empty()) throw PreconditionError("depth ensemble: no finite estimate");
  return out;
}

}  // namespace

std::array<DepthEstimate, 3> keypoint_depths(const Keypoints10& kps, double object_height, double focal) {
  std::array<DepthEstimate, 3> out{};

  DepthEstimate& center = out[0];
  center.source = DepthSource::Center;
  center.z = try_line_depth(kps, kBottomCenter, kTopCenter, object_height, focal);
  center.valid = std::isfinite(center.z) && kps.inside[kBottomCenter] && kps.inside[kTopCenter];

  out[1] = diagonal_group(kps, 0, 2, object_height, focal, DepthSource::Diag1);
  out[2] = diagonal_group(kps, 1, 3, object_height, focal, DepthSource::Diag2);
  return out;
}

double soft_ensemble(std::span<const DepthEstimate> estimates) {
  double num = 0.0;
  double den = 0.0;
  for (const DepthEstimate* e : participants(estimates)) {
    num += e->z / e->sigma;
    den += 1.0 / e->sigma;
  }
  return num / den;
}

std::size_t hard_ensemble_index(std::span<const DepthEstimate> estimates) {
  const auto ps = participants(estimates);
  const DepthEstimate* best = ps.front();
  for (const DepthEstimate* e : ps) {
    if (e->sigma < best->sigma ||
        (e->sigma == best->sigma && static_cast<int>(e->source) < static_cast<int>(best->source))) {
      best = e;
    }
  }
  return static_cast<std::size_t>(best - estimates.data());
}

double hard_ensemble(std::span<const DepthEstimate> estimates) {
  return estimates[hard_ensemble_index(estimates)].z;
}

double oracle_select(std::span<const DepthEstimate> estimates, double z_true) {
  if (estimates.empty()) throw PreconditionError("oracle_select over an empty estimate list");
  double best_z = std::numeric_limits<double>::quiet_NaN();
  double best_err = std::numeric_limits<double>::infinity();
  for (const auto& e : estimates) {
    if (!std::isfinite(e.z)) continue;
    const double err = std::abs(e.z - z_true);
    if (err < best_err) {
      best_err = err;
      best_z = e.z;
    }
  }
  if (!std::isfinite(best_z)) throw PreconditionError("oracle_select: no finite estimate");
  return best_z;
}

}  // namespace monoflex
