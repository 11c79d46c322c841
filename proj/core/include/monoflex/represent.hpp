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

#include <functional>
#include <vector>

#include "monoflex/box2d.hpp"
#include "monoflex/box3d.hpp"
#include "monoflex/camera.hpp"
#include "monoflex/feature_map.hpp"

namespace monoflex {

struct RepresentConfig {
  int stride = 4;                      // backbone downsampling ratio S
  double gaussian_ratio = 1.0 / 6.0;   // sigma / box extent
  double min_sigma = 1.0;              // cells
};

// Output-grid geometry for an image of size W x H at stride S. The grid has
// ceil(W/S) columns and ceil(H/S) rows.
struct FeatureGrid {
  int rows = 0;
  int cols = 0;
  int stride = 1;

  static FeatureGrid for_image(const CameraIntrinsics& K, int stride);

  bool on_ring(Cell c) const { return c.row == 0 || c.col == 0 || c.row == rows - 1 || c.col == cols - 1; }
  bool contains(Cell c) const { return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols; }
  // floor(q / S), clamped into the grid.
  Cell cell_of(const Point2& q) const;
};

enum class RepresentKind { Inside, Outside };

// Which 3D point is projected to obtain xc: the volumetric center of the
// box (default) or its bottom-face center.
enum class CenterConvention { Volumetric, Bottom };

Point3 anchor_point(const Box3D& box, CenterConvention convention);

/// Where an object lives on the output grid.
///
/// Inside objects (projected center xc within the image) are represented by
/// xc itself and sit on an interior cell. Outside objects are represented by
/// the point xr where the segment from the 2D-box center xb to xc leaves the
/// image, and sit on the boundary ring. In both cases
///
///   xc = S * (cell + offset)
///
/// For inside objects offset is the discretization error xc/S - floor(xc/S)
/// except in the one-cell band along the image border, where the cell is
/// pulled onto the nearest interior cell so the ring stays reserved for
/// outside objects.
struct Representation {
  RepresentKind kind = RepresentKind::Inside;
  Point2 xc;      // projected volumetric center, pixels
  Point2 xb;      // 2D box center, pixels
  Point2 xr;      // representative point, pixels
  Cell cell;      // grid cell holding the object
  Point2 offset;  // (du, dv) in cells
};

// Projects the anchor point (volumetric center by default) of `box`, classifies the object and computes
// its representative point, cell and center offset.
// Throws DomainError when the center is behind the camera and
// PreconditionError when an outside object's 2D box center is not strictly
// inside the image.
Representation classify_and_represent(const Box3D& box, const Box2D& box2d, const CameraIntrinsics& K,
                                      int stride, CenterConvention convention = CenterConvention::Volumetric);

// Point where the segment xb -> xc first meets the border of [0, W] x [0, H].
// Requires xb strictly inside the image and xc outside [0, W) x [0, H).
Point2 edge_intersection(const Point2& xb, const Point2& xc, int image_w, int image_h);

// Moves a point lying on the closed image border onto the half-open image
// [0, W) x [0, H): coordinates equal to W (or H) become the next smaller double.
Point2 clamp_to_image(const Point2& q, int image_w, int image_h);

double gaussian_weight(double distance, double sigma);

// Writes max(existing, exp(-d^2 / (2 sigma^2))) around `center` into channel
// `ch`, d measured in cells. With interior_only the ring is left untouched.
// Throws PreconditionError for sigma <= 0 or a center off the grid.
void splat_gaussian_2d(FeatureMap& fm, int ch, Cell center, double sigma, bool interior_only = false);

// 1D variant along the boundary ring; distance is the cyclic walk distance
// of RingPath. Cells off the ring are never written.
void splat_gaussian_edge(FeatureMap& fm, int ch, Cell center, double sigma);

// Kernel widths for an object's heatmap splat, in cells.
double gaussian_sigma_2d(const Box2D& box2d, const RepresentConfig& cfg);
double gaussian_sigma_edge(const Box2D& box2d, const Point2& xr, const CameraIntrinsics& K, const RepresentConfig& cfg);

// FCOS-style distances from the representative point to the four box sides.
// Negative values occur when xr lies outside the box.
struct BoxDistances {
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;
};

BoxDistances fcos_distances(const Point2& xr, const Box2D& box2d);
Box2D box_from_distances(const Point2& xr, const BoxDistances& d);

// Boundary features of a map in RingPath order; `data` is size() x channels.
struct EdgeVector {
  int length = 0;
  int channels = 0;
  std::vector<double> data;

  double& at(int i, int ch) { return data[static_cast<std::size_t>(i) * channels + ch]; }
  double at(int i, int ch) const { return data[static_cast<std::size_t>(i) * channels + ch]; }
};

EdgeVector extract_edge_vector(const FeatureMap& fm);
// Adds vec back onto the boundary cells it was extracted from.
void scatter_edge_vector(FeatureMap& fm, const EdgeVector& vec);

using EdgeTransform = std::function<EdgeVector(const EdgeVector&)>;

// extract -> transform -> scatter. A null transform behaves as identity.
void edge_fusion(FeatureMap& fm, const EdgeTransform& transform = {});

}  // namespace monoflex
