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

#include "monoflex/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "monoflex/errors.hpp"

namespace monoflex {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double SplitMix64::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

std::size_t SplitMix64::index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 g(seed ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
  return g.next();
}

void SceneSpec::validate() const {
  if (n_objects < 0) throw PreconditionError("scene spec: n_objects must be >= 0");
  if (class_mix.empty()) throw PreconditionError("scene spec: empty class mix");
  for (const auto& c : class_mix) {
    if (!(c.weight > 0.0)) throw PreconditionError("scene spec: class weights must be positive");
    decode.loss.mean_dims(c.name);
  }
  if (!(depth_range[0] > 1.0 && depth_range[1] > depth_range[0])) {
    throw PreconditionError("scene spec: depth range must satisfy 1 < min < max");
  }
  if (!(height_range[1] >= height_range[0])) throw PreconditionError("scene spec: bad height range");
  if (!(dim_jitter >= 0.0 && dim_jitter < 1.0)) throw PreconditionError("scene spec: dim_jitter must be in [0, 1)");
  if (!(truncation_fraction >= 0.0 && truncation_fraction <= 1.0)) {
    throw PreconditionError("scene spec: truncation_fraction must be in [0, 1]");
  }
  if (stride < 1) throw PreconditionError("scene spec: stride must be >= 1");
  if (attempt_budget < 1) throw PreconditionError("scene spec: attempt_budget must be >= 1");
  camera.validate();
}

namespace {

double q2(double v) {
  const double r = std::round(v * 100.0) / 100.0;
  return r == 0.0 ? 0.0 : r;  // no negative zero
}

struct Placed {
  Cell cell;
  bool ring = false;
};

const std::string& pick_class(const std::vector<ClassShare>& mix, SplitMix64& rng) {
  double total = 0.0;
  for (const auto& c : mix) total += c.weight;
  double u = rng.uniform(0.0, total);
  for (const auto& c : mix) {
    if (u < c.weight) return c.name;
    u -= c.weight;
  }
  return mix.back().name;
}

// Clipped 2D box and truncation of a box whose corners are all in front.
bool image_box(const Box3D& box, const CameraIntrinsics& K, Box2D* clipped, double* truncation) {
  double u1 = std::numeric_limits<double>::infinity(), v1 = u1;
  double u2 = -u1, v2 = -u1;
  for (const Point3& c : corners(box)) {
    const Point2 p = project(c, K);
    u1 = std::min(u1, p.u);
    v1 = std::min(v1, p.v);
    u2 = std::max(u2, p.u);
    v2 = std::max(v2, p.v);
  }
  const Box2D full{u1, v1, u2, v2};
  *clipped = {std::max(0.0, u1), std::max(0.0, v1), std::min<double>(K.image_w, u2), std::min<double>(K.image_h, v2)};
  if (!clipped->well_formed() || full.area() <= 0.0) return false;
  *truncation = 1.0 - clipped->area() / full.area();
  return true;
}

std::optional<ObjectLabel> try_object(const SceneSpec& spec, bool outside, SplitMix64& rng) {
  const CameraIntrinsics& K = spec.camera;
  const std::string& cls = pick_class(spec.class_mix, rng);
  const Dims& mean = spec.decode.loss.mean_dims(cls);

  Box3D box;
  box.h = q2(mean.h * (1.0 + rng.uniform(-spec.dim_jitter, spec.dim_jitter)));
  box.w = q2(mean.w * (1.0 + rng.uniform(-spec.dim_jitter, spec.dim_jitter)));
  box.l = q2(mean.l * (1.0 + rng.uniform(-spec.dim_jitter, spec.dim_jitter)));
  if (box.h <= 0.0 || box.w <= 0.0 || box.l <= 0.0) return std::nullopt;
  box.ry = q2(wrap_angle(rng.uniform(-kPi, kPi)));
  if (box.ry <= -kPi) box.ry = q2(box.ry + 0.01);

  const double z = rng.uniform(spec.depth_range[0], spec.depth_range[1]);
  double u;
  if (!outside) {
    u = rng.uniform(0.0, K.image_w);
  } else {
    // Far enough out to leave the image, close enough to stay partly visible.
    const double reach = 0.5 * K.fx * std::max(box.l, box.w) / z;
    const double depth_out = rng.uniform(0.02, 0.9) * reach;
    u = rng.uniform() < 0.5 ? -depth_out : K.image_w + depth_out;
  }
  box.location.z = q2(z);
  box.location.x = q2(((u - K.cu) * box.location.z - K.tx) / K.fx);
  box.location.y = q2(rng.uniform(spec.height_range[0], spec.height_range[1]));

  for (const Point3& c : corners(box)) {
    if (!(c.z > 1.0)) return std::nullopt;
  }
  Box2D bbox;
  double truncation = 0.0;
  if (!image_box(box, K, &bbox, &truncation)) return std::nullopt;

  ObjectLabel label;
  label.class_name = cls;
  label.truncation = q2(std::clamp(truncation, 0.0, 1.0));
  label.occlusion = 0;
  label.alpha = q2(ry_to_alpha(box.ry, box.location.x, box.location.z));
  label.bbox = {q2(bbox.u1), q2(bbox.v1), q2(bbox.u2), q2(bbox.v2)};
  label.h = box.h;
  label.w = box.w;
  label.l = box.l;
  label.location = box.location;
  label.ry = box.ry;
  if (label.bbox.width() < 4.0 || label.bbox.height() < 4.0) return std::nullopt;
  return label;
}

}  // namespace

Scene gen_scene(const SceneSpec& spec) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  const CameraIntrinsics& K = spec.camera;
  const FeatureGrid grid = FeatureGrid::for_image(K, spec.stride);

  const int n_out = static_cast<int>(std::lround(spec.n_objects * spec.truncation_fraction));
  std::vector<bool> kinds(static_cast<std::size_t>(spec.n_objects), false);
  std::fill(kinds.begin(), kinds.begin() + n_out, true);
  for (std::size_t i = kinds.size(); i > 1; --i) {
    const std::size_t j = rng.index(i);
    const bool tmp = kinds[i - 1];
    kinds[i - 1] = kinds[j];
    kinds[j] = tmp;
  }

  Scene scene;
  scene.calib = K;
  std::vector<Placed> placed;
  for (int i = 0; i < spec.n_objects; ++i) {
    const bool want_outside = kinds[static_cast<std::size_t>(i)];
    bool ok = false;
    for (int attempt = 0; attempt < spec.attempt_budget && !ok; ++attempt) {
      auto label = try_object(spec, want_outside, rng);
      if (!label) continue;
      Representation rep;
      try {
        rep = classify_and_represent(label->box3d(), label->bbox, K, spec.stride, spec.decode.center);
      } catch (const std::exception&) {
        continue;
      }
      if ((rep.kind == RepresentKind::Outside) != want_outside) continue;
      const bool ring = grid.on_ring(rep.cell);
      const bool clash = std::any_of(placed.begin(), placed.end(), [&](const Placed& p) {
        const int cheb = std::max(std::abs(p.cell.row - rep.cell.row), std::abs(p.cell.col - rep.cell.col));
        return cheb == 0 || (p.ring == ring && cheb < 2);
      });
      if (clash) continue;
      placed.push_back({rep.cell, ring});
      scene.labels.push_back(std::move(*label));
      ok = true;
    }
    if (!ok) {
      throw PreconditionError("gen_scene: could not place object " + std::to_string(i) + " within " +
                              std::to_string(spec.attempt_budget) + " attempts");
    }
  }
  return scene;
}

HeadOutputs perturb(const HeadOutputs& ho, const NoiseSpec& noise, const CameraIntrinsics& K, const DecodeConfig& cfg) {
  HeadOutputs out = ho;
  const HeadLayout L = ho.layout();
  const double S = ho.stride;
  const double log_lo = std::log(std::max(noise.scale_lo, 1e-12));
  const double log_hi = std::log(std::max(noise.scale_hi, noise.scale_lo));
  const double sigma_floor = cfg.sigma_floor;

  // Keypoint indices of each depth group.
  static const std::array<std::vector<int>, 3> kGroups = {
      std::vector<int>{kBottomCenter, kTopCenter}, std::vector<int>{0, 2, 4, 6}, std::vector<int>{1, 3, 5, 7}};

  for (int r = 0; r < ho.rows(); ++r) {
    for (int c = 0; c < ho.cols(); ++c) {
      const auto src = ho.maps.cell(r, c);
      double heat = 0.0;
      for (int k = 0; k < L.num_classes; ++k) heat = std::max(heat, src[L.heatmap() + k]);
      if (heat < noise.min_heat) continue;

      SplitMix64 rng(mix_seed(noise.seed, static_cast<std::uint64_t>(r) * ho.cols() + c));
      auto v = out.maps.cell(r, c);
      const auto add = [&](int ch, double std) {
        if (std > 0.0) v[ch] += std * rng.normal();
      };
      std::array<double, 4> scale{};  // direct, center, diag1, diag2
      for (double& s : scale) s = std::exp(rng.uniform(log_lo, log_hi));

      for (int k = 0; k < 2; ++k) add(L.offset() + k, noise.offset_std);
      for (int k = 0; k < 4; ++k) add(L.box2d() + k, noise.box2d_std);
      for (int k = 0; k < 3; ++k) add(L.dims() + k, noise.dim_std);
      for (int k = 0; k < 2 * L.num_bins; ++k) add(L.orient_res() + k, noise.orient_std);
      for (int g = 0; g < 3; ++g) {
        for (int kp : kGroups[g]) {
          add(L.keypoints() + 2 * kp, noise.keypoint_std[g] * scale[g + 1]);
          add(L.keypoints() + 2 * kp + 1, noise.keypoint_std[g] * scale[g + 1]);
        }
      }
      add(L.depth(), noise.depth_std * scale[0]);

      if (!noise.honest_sigma) continue;
      // First-order depth spread, evaluated at the clean values of this cell.
      const double z = direct_depth(src[L.depth()]);
      int cls = 0;
      for (int k = 1; k < L.num_classes; ++k) {
        if (src[L.heatmap() + k] > src[L.heatmap() + cls]) cls = k;
      }
      const auto mean_it = cfg.loss.class_mean_dims.find(ho.class_names[static_cast<std::size_t>(cls)]);
      const double mean_h = mean_it != cfg.loss.class_mean_dims.end() ? mean_it->second.h : 1.0;
      const double H = mean_h * std::exp(src[L.dims()]);
      const double pixel_gain = z * z / (K.fy * H);  // dz per pixel of line height

      const auto set_sigma = [&](int ch, double sigma) {
        if (sigma > 0.0) v[ch] = std::log(std::max(sigma, sigma_floor));
      };
      set_sigma(L.depth_logsigma(), z * noise.depth_std * scale[0]);
      set_sigma(L.kp_logsigma(), pixel_gain * std::sqrt(2.0) * S * noise.keypoint_std[0] * scale[1]);
      set_sigma(L.kp_logsigma() + 1, pixel_gain * S * noise.keypoint_std[1] * scale[2]);
      set_sigma(L.kp_logsigma() + 2, pixel_gain * S * noise.keypoint_std[2] * scale[3]);
    }
  }
  return out;
}

}  // namespace monoflex
