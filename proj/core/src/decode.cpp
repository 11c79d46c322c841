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

#include "monoflex/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "monoflex/errors.hpp"

namespace monoflex {

namespace {

bool lex_less(Cell a, Cell b) { return a.row < b.row || (a.row == b.row && a.col < b.col); }

// `value` at `self` beats the neighbour value under the tie rule.
bool dominates(double value, Cell self, double neighbour, Cell other) {
  return value > neighbour || (value == neighbour && lex_less(self, other));
}

}  // namespace

EncodeResult encode_targets(std::span<const ObjectLabel> labels, const CameraIntrinsics& K, const DecodeConfig& cfg) {
  const int S = cfg.represent.stride;
  const FeatureGrid grid = FeatureGrid::for_image(K, S);

  EncodeResult res;
  res.heads = HeadOutputs(cfg.class_names, grid.rows, grid.cols, S, cfg.loss.num_bins());
  const HeadLayout L = res.heads.layout();
  FeatureMap& maps = res.heads.maps;
  std::vector<bool> occupied(static_cast<std::size_t>(grid.rows) * grid.cols, false);
  const double log_floor = std::log(cfg.sigma_floor);

  for (const ObjectLabel& label : labels) {
    const int cls = res.heads.class_index(label.class_name);
    if (label.is_dont_care() || cls < 0 || !cfg.loss.class_mean_dims.contains(label.class_name)) {
      ++res.skipped_other;
      continue;
    }
    const Box3D box = label.box3d();
    Keypoints10 kps;
    Representation rep;
    try {
      kps = keypoints10(box, K);
      rep = classify_and_represent(box, label.bbox, K, S, cfg.center);
    } catch (const DomainError&) {
      ++res.skipped_behind_camera;
      continue;
    } catch (const PreconditionError&) {
      ++res.skipped_other;
      continue;
    }
    if (!label.bbox.well_formed()) {
      ++res.skipped_other;
      continue;
    }

    if (rep.kind == RepresentKind::Inside) {
      splat_gaussian_2d(maps, L.heatmap() + cls, rep.cell, gaussian_sigma_2d(label.bbox, cfg.represent), true);
    } else {
      splat_gaussian_edge(maps, L.heatmap() + cls, rep.cell, gaussian_sigma_edge(label.bbox, rep.xr, K, cfg.represent));
    }

    const std::size_t slot = static_cast<std::size_t>(rep.cell.row) * grid.cols + rep.cell.col;
    if (occupied[slot]) {
      ++res.collisions;
      continue;
    }
    occupied[slot] = true;

    auto v = maps.cell(rep.cell.row, rep.cell.col);
    v[L.offset()] = rep.offset.u;
    v[L.offset() + 1] = rep.offset.v;

    const BoxDistances d = fcos_distances(rep.xr, label.bbox);
    v[L.box2d()] = d.left;
    v[L.box2d() + 1] = d.top;
    v[L.box2d() + 2] = d.right;
    v[L.box2d() + 3] = d.bottom;

    const Dims& mean = cfg.loss.mean_dims(label.class_name);
    v[L.dims()] = std::log(box.h / mean.h);
    v[L.dims() + 1] = std::log(box.w / mean.w);
    v[L.dims() + 2] = std::log(box.l / mean.l);

    const double alpha = ry_to_alpha(box.ry, box.location.x, box.location.z);
    encode_orientation(alpha, v.subspan(L.orient_logits(), L.num_bins), v.subspan(L.orient_res(), 2 * L.num_bins),
                       cfg.loss);

    for (int i = 0; i < kNumKeypoints; ++i) {
      v[L.keypoints() + 2 * i] = (kps.pts[i].u - rep.xr.u) / S;
      v[L.keypoints() + 2 * i + 1] = (kps.pts[i].v - rep.xr.v) / S;
    }

    v[L.depth()] = direct_depth_inverse(box.location.z);
    v[L.depth_logsigma()] = log_floor;
    for (int g = 0; g < 3; ++g) v[L.kp_logsigma() + g] = log_floor;

    res.representations.push_back(rep);
    ++res.encoded;
  }
  return res;
}

std::vector<Peak> topk_peaks(const FeatureMap& heatmap, int num_classes, int k, double threshold,
                             const CellReadHook& hook) {
  if (k < 1) throw PreconditionError("topk_peaks: k must be >= 1");
  if (num_classes < 0 || num_classes > heatmap.c()) throw PreconditionError("topk_peaks: bad class count");
  const int H = heatmap.h();
  const int W = heatmap.w();
  std::vector<Peak> peaks;
  if (H < 1 || W < 1) return peaks;

  const auto read = [&](GridRegion region, Cell c, int ch) {
    if (hook) hook(region, c);
    return heatmap.at(c.row, c.col, ch);
  };

  for (int ch = 0; ch < num_classes; ++ch) {
    // Interior: 3x3 neighbourhood restricted to interior cells.
    for (int r = 1; r + 1 < H; ++r) {
      for (int c = 1; c + 1 < W; ++c) {
        const Cell self{r, c};
        const double value = read(GridRegion::Interior, self, ch);
        if (!(value >= threshold)) continue;
        bool is_peak = true;
        for (int dr = -1; dr <= 1 && is_peak; ++dr) {
          for (int dc = -1; dc <= 1 && is_peak; ++dc) {
            const Cell n{r + dr, c + dc};
            if ((dr == 0 && dc == 0) || heatmap.on_ring(n.row, n.col)) continue;
            is_peak = dominates(value, self, read(GridRegion::Interior, n, ch), n);
          }
        }
        if (is_peak) peaks.push_back({self, ch, value, false});
      }
    }

    if (H < 2 || W < 2) continue;
    const RingPath ring(H, W);
    const int n = ring.size();
    for (int i = 0; i < n; ++i) {
      const Cell self = ring[i];
      const double value = read(GridRegion::Ring, self, ch);
      if (!(value >= threshold)) continue;
      const Cell prev = ring[(i + n - 1) % n];
      const Cell next = ring[(i + 1) % n];
      if (dominates(value, self, read(GridRegion::Ring, prev, ch), prev) &&
          dominates(value, self, read(GridRegion::Ring, next, ch), next)) {
        peaks.push_back({self, ch, value, true});
      }
    }
  }

  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.class_index != b.class_index) return a.class_index < b.class_index;
    return lex_less(a.cell, b.cell);
  });
  if (static_cast<int>(peaks.size()) > k) peaks.resize(static_cast<std::size_t>(k));
  return peaks;
}

namespace {

enum class Side { Left, Right, Top, Bottom };

// Recovers the border point of an outside object: it lies on the image
// border, on the side(s) touched by its ring cell, and on the line through
// xc along d = xb - xr.
std::optional<Point2> border_point_on_line(const Point2& xc, const Point2& d, Cell cell, const FeatureGrid& grid,
                                           const CameraIntrinsics& K) {
  const double W = K.image_w;
  const double H = K.image_h;
  constexpr double kTol = 1e-6;

  std::vector<Side> sides;
  if (cell.col == 0) sides.push_back(Side::Left);
  if (cell.col == grid.cols - 1) sides.push_back(Side::Right);
  if (cell.row == 0) sides.push_back(Side::Top);
  if (cell.row == grid.rows - 1) sides.push_back(Side::Bottom);

  for (Side s : sides) {
    Point2 q;
    if (s == Side::Left || s == Side::Right) {
      if (std::abs(d.u) < 1e-12) continue;
      q.u = s == Side::Left ? 0.0 : W;
      q.v = xc.v + (q.u - xc.u) / d.u * d.v;
      if (q.v < -kTol || q.v > H + kTol) continue;
    } else {
      if (std::abs(d.v) < 1e-12) continue;
      q.v = s == Side::Top ? 0.0 : H;
      q.u = xc.u + (q.v - xc.v) / d.v * d.u;
      if (q.u < -kTol || q.u > W + kTol) continue;
    }
    return clamp_to_image(q, K.image_w, K.image_h);
  }
  return std::nullopt;
}

// Cell-resolution fallback: the cell center snapped onto its border side.
Point2 border_point_of_cell(Cell cell, const FeatureGrid& grid, const CameraIntrinsics& K) {
  Point2 q{grid.stride * (cell.col + 0.5), grid.stride * (cell.row + 0.5)};
  if (cell.col == 0) q.u = 0.0;
  else if (cell.col == grid.cols - 1) q.u = K.image_w;
  else if (cell.row == 0) q.v = 0.0;
  else q.v = K.image_h;
  return clamp_to_image(q, K.image_w, K.image_h);
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

Box3D box_at_depth(const Detection& det, double z, const CameraIntrinsics& K, CenterConvention convention) {
  Box3D box = det.box3d;
  const Point3 anchor = backproject(det.xc, z, K);
  box.location = convention == CenterConvention::Volumetric ? Point3{anchor.x, anchor.y + 0.5 * box.h, anchor.z}
                                                            : anchor;
  box.ry = alpha_to_ry(det.alpha, box.location.x, box.location.z);
  return box;
}

DecodeResult decode_detections(const HeadOutputs& ho, const CameraIntrinsics& K, const DecodeConfig& cfg,
                               const CellReadHook& hook) {
  const HeadLayout L = ho.layout();
  const int S = ho.stride;
  const FeatureGrid grid = FeatureGrid::for_image(K, S);
  if (grid.rows != ho.rows() || grid.cols != ho.cols()) {
    throw PreconditionError("decode_detections: head grid " + std::to_string(ho.rows()) + "x" +
                            std::to_string(ho.cols()) + " does not match image at stride " + std::to_string(S));
  }
  if (L.num_bins != cfg.loss.num_bins()) throw PreconditionError("decode_detections: orientation bin count mismatch");

  DecodeResult out;
  const auto peaks = topk_peaks(ho.maps, L.num_classes, cfg.max_detections, cfg.score_threshold, hook);

  for (const Peak& p : peaks) {
    const GridRegion region = p.on_ring ? GridRegion::Ring : GridRegion::Interior;
    if (hook) hook(region, p.cell);
    const auto v = ho.maps.cell(p.cell.row, p.cell.col);
    const std::string& cls = ho.class_names[static_cast<std::size_t>(p.class_index)];
    if (!all_finite(v) || !cfg.loss.class_mean_dims.contains(cls)) {
      ++out.dropped_nonfinite;
      continue;
    }

    Detection det;
    det.class_name = cls;
    det.score = p.score;
    det.cell = p.cell;
    det.xc = {S * (p.cell.col + v[L.offset()]), S * (p.cell.row + v[L.offset() + 1])};
    const BoxDistances dist{v[L.box2d()], v[L.box2d() + 1], v[L.box2d() + 2], v[L.box2d() + 3]};

    if (!p.on_ring) {
      det.kind = RepresentKind::Inside;
      det.xr = det.xc;
    } else {
      det.kind = RepresentKind::Outside;
      const Point2 d{0.5 * (dist.right - dist.left), 0.5 * (dist.bottom - dist.top)};
      std::optional<Point2> xr;
      if (!K.contains(det.xc)) xr = border_point_on_line(det.xc, d, p.cell, grid, K);
      det.xr = xr ? *xr : border_point_of_cell(p.cell, grid, K);
    }
    det.box2d = box_from_distances(det.xr, dist);

    const Dims& mean = cfg.loss.mean_dims(cls);
    det.box3d.h = mean.h * std::exp(v[L.dims()]);
    det.box3d.w = mean.w * std::exp(v[L.dims() + 1]);
    det.box3d.l = mean.l * std::exp(v[L.dims() + 2]);
    det.alpha = decode_orientation(v.subspan(L.orient_logits(), L.num_bins), v.subspan(L.orient_res(), 2 * L.num_bins),
                                   cfg.loss);

    Keypoints10 kps;
    for (int i = 0; i < kNumKeypoints; ++i) {
      kps.pts[i] = {det.xr.u + S * v[L.keypoints() + 2 * i], det.xr.v + S * v[L.keypoints() + 2 * i + 1]};
      kps.inside[i] = K.contains(kps.pts[i]);
    }
    const auto kd = keypoint_depths(kps, det.box3d.h, K.fy);

    det.depths[0] = {direct_depth(v[L.depth()]), std::exp(v[L.depth_logsigma()]), true, DepthSource::Direct};
    for (int g = 0; g < 3; ++g) {
      det.depths[g + 1] = kd[g];
      det.depths[g + 1].sigma = std::exp(v[L.kp_logsigma() + g]);
    }
    if (!std::all_of(det.depths.begin(), det.depths.end(), [](const DepthEstimate& e) { return e.sigma > 0.0; })) {
      ++out.dropped_nonfinite;
      continue;
    }

    det.z_soft = soft_ensemble(det.depths);
    switch (cfg.ensemble) {
      case EnsembleMode::Soft: det.z = det.z_soft; break;
      case EnsembleMode::Hard: det.z = hard_ensemble(det.depths); break;
      case EnsembleMode::Single: {
        const double z = det.depths[static_cast<std::size_t>(cfg.single_source)].z;
        det.z = std::isfinite(z) && z > 0.0 ? z : det.depths[0].z;
        break;
      }
    }
    if (!std::isfinite(det.z) || !(det.z > 0.0)) {
      ++out.dropped_nonfinite;
      continue;
    }
    det.box3d = box_at_depth(det, det.z, K, cfg.center);
    out.detections.push_back(std::move(det));
  }
  return out;
}

ObjectLabel to_label(const Detection& det) {
  ObjectLabel l;
  l.class_name = det.class_name;
  l.truncation = -1.0;
  l.occlusion = -1;
  l.alpha = det.alpha;
  l.bbox = det.box2d;
  l.h = det.box3d.h;
  l.w = det.box3d.w;
  l.l = det.box3d.l;
  l.location = det.box3d.location;
  l.ry = det.box3d.ry;
  l.score = det.score;
  return l;
}

}  // namespace monoflex
