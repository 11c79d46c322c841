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

#include "monoflex/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "monoflex/errors.hpp"

namespace monoflex {

std::map<std::string, Dims> default_class_mean_dims() {
  return {
      {"Car", {1.5261, 1.6286, 3.8840}},
      {"Pedestrian", {1.7607, 0.6602, 0.8423}},
      {"Cyclist", {1.7372, 0.5968, 1.7635}},
  };
}

const Dims& LossConfig::mean_dims(const std::string& cls) const {
  auto it = class_mean_dims.find(cls);
  if (it == class_mean_dims.end()) throw PreconditionError("no mean dimensions for class '" + cls + "'");
  return it->second;
}

double focal_heatmap_loss(const FeatureMap& pred, const FeatureMap& gt, const LossConfig& cfg) {
  if (pred.h() != gt.h() || pred.w() != gt.w() || pred.c() != gt.c()) {
    throw PreconditionError("focal_heatmap_loss: shape mismatch");
  }
  double pos = 0.0;
  double neg = 0.0;
  int num_pos = 0;
  const auto& p = pred.data();
  const auto& g = gt.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0 && p[i] < 1.0)) throw DomainError("focal_heatmap_loss: predictions must lie in (0, 1)");
    if (g[i] == 1.0) {
      pos += std::pow(1.0 - p[i], cfg.focal_alpha) * std::log(p[i]);
      ++num_pos;
    } else {
      neg += std::pow(1.0 - g[i], cfg.focal_beta) * std::pow(p[i], cfg.focal_alpha) * std::log(1.0 - p[i]);
    }
  }
  return -(pos + neg) / std::max(1, num_pos);
}

double offset_loss(std::span<const double> pred, std::span<const double> gt, RepresentKind kind) {
  if (pred.size() != gt.size()) throw PreconditionError("offset_loss: size mismatch");
  if (pred.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = std::abs(pred[i] - gt[i]);
    sum += kind == RepresentKind::Inside ? d : std::log1p(d);
  }
  return sum / static_cast<double>(pred.size());
}

double offset_loss_total(std::span<const OffsetSample> samples) {
  double in_sum = 0.0;
  double out_sum = 0.0;
  int n_in = 0;
  int n_out = 0;
  for (const auto& s : samples) {
    const double v = offset_loss(s.pred, s.gt, s.kind);
    if (s.kind == RepresentKind::Inside) {
      in_sum += v;
      ++n_in;
    } else {
      out_sum += v;
      ++n_out;
    }
  }
  return (n_in ? in_sum / n_in : 0.0) + (n_out ? out_sum / n_out : 0.0);
}

double dim_loss(const std::array<double, 3>& log_deltas, const Dims& gt, const std::string& cls,
                const LossConfig& cfg) {
  const Dims& mean = cfg.mean_dims(cls);
  return std::abs(mean.h * std::exp(log_deltas[0]) - gt.h) + std::abs(mean.w * std::exp(log_deltas[1]) - gt.w) +
         std::abs(mean.l * std::exp(log_deltas[2]) - gt.l);
}

namespace {

void check_bins(std::span<const double> logits, std::span<const double> residuals, const LossConfig& cfg) {
  const auto n = static_cast<std::size_t>(cfg.num_bins());
  if (n == 0) throw PreconditionError("multibin: no bins configured");
  if (logits.size() != n || residuals.size() != 2 * n) {
    throw PreconditionError("multibin: expected " + std::to_string(n) + " logits and " + std::to_string(2 * n) +
                            " residual values");
  }
}

}  // namespace

std::vector<int> covering_bins(double alpha, const LossConfig& cfg) {
  const double half_width = kPi / cfg.num_bins() + cfg.bin_overlap_margin;
  std::vector<int> out;
  for (int b = 0; b < cfg.num_bins(); ++b) {
    if (std::abs(wrap_angle(alpha - cfg.bin_centers[b])) <= half_width) out.push_back(b);
  }
  return out;
}

MultiBinLoss multibin_loss(std::span<const double> bin_logits, std::span<const double> residual_sincos,
                           double gt_alpha, const LossConfig& cfg) {
  check_bins(bin_logits, residual_sincos, cfg);
  const auto cover = covering_bins(gt_alpha, cfg);

  const double max_logit = *std::max_element(bin_logits.begin(), bin_logits.end());
  double denom = 0.0;
  for (double x : bin_logits) denom += std::exp(x - max_logit);
  const double log_denom = max_logit + std::log(denom);

  MultiBinLoss loss;
  for (int b : cover) {
    const double delta = wrap_angle(gt_alpha - cfg.bin_centers[b]);
    loss.classification += log_denom - bin_logits[b];
    loss.residual += std::abs(residual_sincos[2 * b] - std::sin(delta)) +
                     std::abs(residual_sincos[2 * b + 1] - std::cos(delta));
  }
  const double n = static_cast<double>(cover.size());
  loss.classification /= n;
  loss.residual /= n;
  return loss;
}

double decode_orientation(std::span<const double> bin_logits, std::span<const double> residual_sincos,
                          const LossConfig& cfg) {
  check_bins(bin_logits, residual_sincos, cfg);
  const auto best = static_cast<std::size_t>(
      std::distance(bin_logits.begin(), std::max_element(bin_logits.begin(), bin_logits.end())));
  return wrap_angle(cfg.bin_centers[best] + std::atan2(residual_sincos[2 * best], residual_sincos[2 * best + 1]));
}

void encode_orientation(double alpha, std::span<double> bin_logits, std::span<double> residual_sincos,
                        const LossConfig& cfg) {
  check_bins(bin_logits, residual_sincos, cfg);
  int nearest = 0;
  double nearest_dist = std::numeric_limits<double>::infinity();
  for (int b = 0; b < cfg.num_bins(); ++b) {
    const double delta = wrap_angle(alpha - cfg.bin_centers[b]);
    residual_sincos[2 * b] = std::sin(delta);
    residual_sincos[2 * b + 1] = std::cos(delta);
    if (std::abs(delta) < nearest_dist) {
      nearest_dist = std::abs(delta);
      nearest = b;
    }
  }
  for (int b = 0; b < cfg.num_bins(); ++b) bin_logits[b] = b == nearest ? 1.0 : 0.0;
}

KeypointLoss keypoint_loss(std::span<const double> pred_offsets, std::span<const double> gt_offsets,
                           std::span<const bool> inside) {
  if (pred_offsets.size() != gt_offsets.size() || pred_offsets.size() != 2 * inside.size()) {
    throw PreconditionError("keypoint_loss: expected 2 offsets per keypoint");
  }
  KeypointLoss out;
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < inside.size(); ++i) {
    if (!inside[i]) continue;
    sum += std::abs(pred_offsets[2 * i] - gt_offsets[2 * i]) + std::abs(pred_offsets[2 * i + 1] - gt_offsets[2 * i + 1]);
    ++count;
  }
  out.has_inside = count > 0;
  out.value = count > 0 ? sum / count : 0.0;
  return out;
}

double depth_unc_loss(double z_pred, double z_gt, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("depth_unc_loss: sigma must be positive");
  return std::abs(z_pred - z_gt) / sigma + std::log(sigma);
}

double keypoint_depth_loss(std::span<const DepthEstimate> estimates, double z_gt) {
  double sum = 0.0;
  for (const auto& e : estimates) {
    if (!(e.sigma > 0.0)) throw DomainError("keypoint_depth_loss: sigma must be positive");
    sum += std::abs(e.z - z_gt) / e.sigma;
    if (e.valid) sum += std::log(e.sigma);
  }
  return sum;
}

double giou_loss(const Box2D& a, const Box2D& b) {
  if (!a.well_formed() || !b.well_formed()) throw PreconditionError("giou_loss: degenerate box");
  const double iw = std::max(0.0, std::min(a.u2, b.u2) - std::max(a.u1, b.u1));
  const double ih = std::max(0.0, std::min(a.v2, b.v2) - std::max(a.v1, b.v1));
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  const double enclose = (std::max(a.u2, b.u2) - std::min(a.u1, b.u1)) * (std::max(a.v2, b.v2) - std::min(a.v1, b.v1));
  const double giou = inter / uni - (enclose - uni) / enclose;
  return 1.0 - giou;
}

}  // namespace monoflex
