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

#include "monoflex/represent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "monoflex/errors.hpp"

namespace monoflex {

FeatureMap::FeatureMap(int h, int w, int c, double fill) : h_(h), w_(w), c_(c) {
  if (h < 0 || w < 0 || c < 0) throw PreconditionError("FeatureMap: negative dimension");
  data_.assign(static_cast<std::size_t>(h) * w * c, fill);
}

RingPath::RingPath(int h, int w) : h_(h), w_(w) {
  if (h < 2 || w < 2) throw PreconditionError("RingPath: grid must be at least 2x2");
  cells_.reserve(2 * (h + w) - 4);
  for (int c = 0; c < w; ++c) cells_.push_back({0, c});
  for (int r = 1; r < h; ++r) cells_.push_back({r, w - 1});
  for (int c = w - 2; c >= 0; --c) cells_.push_back({h - 1, c});
  for (int r = h - 2; r >= 1; --r) cells_.push_back({r, 0});
}

int RingPath::index_of(Cell c) const {
  if (c.row < 0 || c.row >= h_ || c.col < 0 || c.col >= w_) return -1;
  if (c.row == 0) return c.col;
  if (c.col == w_ - 1) return (w_ - 1) + c.row;
  if (c.row == h_ - 1) return (w_ - 1) + (h_ - 1) + (w_ - 1 - c.col);
  if (c.col == 0) return 2 * (w_ - 1) + (h_ - 1) + (h_ - 1 - c.row);
  return -1;
}

int RingPath::distance(int i, int j) const {
  const int n = size();
  const int d = std::abs(i - j) % n;
  return std::min(d, n - d);
}

FeatureGrid FeatureGrid::for_image(const CameraIntrinsics& K, int stride) {
  if (stride < 1) throw PreconditionError("stride must be >= 1");
  K.validate();
  FeatureGrid g;
  g.stride = stride;
  g.cols = (K.image_w + stride - 1) / stride;
  g.rows = (K.image_h + stride - 1) / stride;
  return g;
}

Cell FeatureGrid::cell_of(const Point2& q) const {
  const int col = static_cast<int>(std::floor(q.u / stride));
  const int row = static_cast<int>(std::floor(q.v / stride));
  return {std::clamp(row, 0, rows - 1), std::clamp(col, 0, cols - 1)};
}

Point2 edge_intersection(const Point2& xb, const Point2& xc, int image_w, int image_h) {
  const double W = image_w;
  const double H = image_h;
  if (!(xb.u > 0.0 && xb.u < W && xb.v > 0.0 && xb.v < H)) {
    throw PreconditionError("edge_intersection: 2D box center must lie strictly inside the image");
  }
  if (xc.u >= 0.0 && xc.u < W && xc.v >= 0.0 && xc.v < H) {
    throw PreconditionError("edge_intersection: projected center is inside the image");
  }

  const double du = xc.u - xb.u;
  const double dv = xc.v - xb.v;

  // Parametric clipping; each violated bound gives an exit parameter.
  double t = 1.0;
  enum class Side { None, Left, Right, Top, Bottom } side = Side::None;
  auto consider = [&](double tt, Side s) {
    if (tt < t) {
      t = tt;
      side = s;
    }
  };
  if (xc.u < 0.0) consider((0.0 - xb.u) / du, Side::Left);
  if (xc.u > W) consider((W - xb.u) / du, Side::Right);
  if (xc.v < 0.0) consider((0.0 - xb.v) / dv, Side::Top);
  if (xc.v > H) consider((H - xb.v) / dv, Side::Bottom);

  Point2 q{xb.u + t * du, xb.v + t * dv};
  switch (side) {
    case Side::Left: q.u = 0.0; break;
    case Side::Right: q.u = W; break;
    case Side::Top: q.v = 0.0; break;
    case Side::Bottom: q.v = H; break;
    case Side::None: q = xc; break;  // xc on the closed right/bottom border
  }
  q.u = std::clamp(q.u, 0.0, W);
  q.v = std::clamp(q.v, 0.0, H);
  return q;
}

Point2 clamp_to_image(const Point2& q, int image_w, int image_h) {
  const double W = image_w;
  const double H = image_h;
  Point2 r{std::clamp(q.u, 0.0, W), std::clamp(q.v, 0.0, H)};
  if (r.u >= W) r.u = std::nextafter(W, 0.0);
  if (r.v >= H) r.v = std::nextafter(H, 0.0);
  return r;
}

Point3 anchor_point(const Box3D& box, CenterConvention convention) {
  return convention == CenterConvention::Volumetric ? box.center() : box.location;
}

Representation classify_and_represent(const Box3D& box, const Box2D& box2d, const CameraIntrinsics& K,
                                      int stride, CenterConvention convention) {
  const FeatureGrid grid = FeatureGrid::for_image(K, stride);
  if (grid.rows < 3 || grid.cols < 3) {
    throw PreconditionError("classify_and_represent: output grid must be at least 3x3");
  }
  const double S = stride;

  Representation rep;
  rep.xc = project(anchor_point(box, convention), K);
  rep.xb = box2d.center();

  if (K.contains(rep.xc)) {
    rep.kind = RepresentKind::Inside;
    rep.xr = rep.xc;
    Cell c = grid.cell_of(rep.xc);
    c.row = std::clamp(c.row, 1, grid.rows - 2);
    c.col = std::clamp(c.col, 1, grid.cols - 2);
    rep.cell = c;
  } else {
    if (rep.xb == rep.xc) throw PreconditionError("classify_and_represent: degenerate outside object (xb == xc)");
    rep.kind = RepresentKind::Outside;
    rep.xr = clamp_to_image(edge_intersection(rep.xb, rep.xc, K.image_w, K.image_h), K.image_w, K.image_h);
    rep.cell = grid.cell_of(rep.xr);
  }
  rep.offset = {rep.xc.u / S - rep.cell.col, rep.xc.v / S - rep.cell.row};
  return rep;
}

double gaussian_weight(double distance, double sigma) {
  return std::exp(-(distance * distance) / (2.0 * sigma * sigma));
}

namespace {

void check_splat(const FeatureMap& fm, int ch, Cell center, double sigma) {
  if (!(sigma > 0.0)) throw PreconditionError("splat: sigma must be positive");
  if (ch < 0 || ch >= fm.c()) throw PreconditionError("splat: channel out of range");
  if (!fm.contains(center.row, center.col)) throw PreconditionError("splat: center outside the grid");
}

}  // namespace

void splat_gaussian_2d(FeatureMap& fm, int ch, Cell center, double sigma, bool interior_only) {
  check_splat(fm, ch, center, sigma);
  if (interior_only && fm.on_ring(center.row, center.col)) {
    throw PreconditionError("splat_gaussian_2d: interior splat centered on the ring");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const int r0 = std::max(0, center.row - radius);
  const int r1 = std::min(fm.h() - 1, center.row + radius);
  const int c0 = std::max(0, center.col - radius);
  const int c1 = std::min(fm.w() - 1, center.col + radius);
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (interior_only && fm.on_ring(r, c)) continue;
      const double dr = r - center.row;
      const double dc = c - center.col;
      const double g = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
      double& cell = fm.at(r, c, ch);
      cell = std::max(cell, g);
    }
  }
}

void splat_gaussian_edge(FeatureMap& fm, int ch, Cell center, double sigma) {
  check_splat(fm, ch, center, sigma);
  const RingPath ring(fm.h(), fm.w());
  const int i0 = ring.index_of(center);
  if (i0 < 0) throw PreconditionError("splat_gaussian_edge: center is not on the boundary ring");
  const int radius = std::min(static_cast<int>(std::ceil(3.0 * sigma)), ring.size() / 2);
  for (int k = -radius; k <= radius; ++k) {
    const int i = ((i0 + k) % ring.size() + ring.size()) % ring.size();
    const Cell c = ring[i];
    const double g = gaussian_weight(ring.distance(i0, i), sigma);
    double& cell = fm.at(c.row, c.col, ch);
    cell = std::max(cell, g);
  }
}

double gaussian_sigma_2d(const Box2D& box2d, const RepresentConfig& cfg) {
  const double extent = std::min(box2d.width(), box2d.height());
  return std::max(cfg.min_sigma, cfg.gaussian_ratio * extent / cfg.stride);
}

double gaussian_sigma_edge(const Box2D& box2d, const Point2& xr, const CameraIntrinsics& K,
                           const RepresentConfig& cfg) {
  // On the left/right border the kernel runs vertically, so the relevant
  // extent is the box height; on the top/bottom border, its width.
  const bool vertical_side = xr.u <= 0.0 || xr.u >= std::nextafter(static_cast<double>(K.image_w), 0.0);
  const double extent = vertical_side ? box2d.height() : box2d.width();
  return std::max(cfg.min_sigma, cfg.gaussian_ratio * extent / cfg.stride);
}

BoxDistances fcos_distances(const Point2& xr, const Box2D& box2d) {
  return {xr.u - box2d.u1, xr.v - box2d.v1, box2d.u2 - xr.u, box2d.v2 - xr.v};
}

Box2D box_from_distances(const Point2& xr, const BoxDistances& d) {
  return {xr.u - d.left, xr.v - d.top, xr.u + d.right, xr.v + d.bottom};
}

EdgeVector extract_edge_vector(const FeatureMap& fm) {
  const RingPath ring(fm.h(), fm.w());
  EdgeVector vec;
  vec.length = ring.size();
  vec.channels = fm.c();
  vec.data.reserve(static_cast<std::size_t>(vec.length) * vec.channels);
  for (const Cell& c : ring.cells()) {
    const auto values = fm.cell(c.row, c.col);
    vec.data.insert(vec.data.end(), values.begin(), values.end());
  }
  return vec;
}

void scatter_edge_vector(FeatureMap& fm, const EdgeVector& vec) {
  const RingPath ring(fm.h(), fm.w());
  if (vec.length != ring.size() || vec.channels != fm.c() ||
      vec.data.size() != static_cast<std::size_t>(vec.length) * vec.channels) {
    throw PreconditionError("scatter_edge_vector: vector of length " + std::to_string(vec.length) + "x" +
                            std::to_string(vec.channels) + " does not match a " + std::to_string(fm.h()) + "x" +
                            std::to_string(fm.w()) + "x" + std::to_string(fm.c()) + " map");
  }
  for (int i = 0; i < ring.size(); ++i) {
    auto values = fm.cell(ring[i].row, ring[i].col);
    for (int ch = 0; ch < fm.c(); ++ch) values[ch] += vec.at(i, ch);
  }
}

void edge_fusion(FeatureMap& fm, const EdgeTransform& transform) {
  EdgeVector vec = extract_edge_vector(fm);
  if (transform) vec = transform(vec);
  scatter_edge_vector(fm, vec);
}

}  // namespace monoflex
