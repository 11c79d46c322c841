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

#include <gtest/gtest.h>

#include <cmath>

#include "monoflex/decode.hpp"
#include "monoflex/errors.hpp"
#include "monoflex/synthgen.hpp"

using namespace monoflex;

namespace {

const Detection* nearest(const std::vector<Detection>& dets, const ObjectLabel& l) {
  const Detection* best = nullptr;
  double bd = 1e18;
  for (const auto& d : dets) {
    const double dist = std::hypot(d.box3d.location.x - l.location.x, d.box3d.location.z - l.location.z);
    if (d.class_name == l.class_name && dist < bd) {
      bd = dist;
      best = &d;
    }
  }
  return best;
}

Scene scene(std::uint64_t seed, int n, double trunc) {
  SceneSpec spec;
  spec.seed = seed;
  spec.n_objects = n;
  spec.truncation_fraction = trunc;
  return gen_scene(spec);
}

}  // namespace

TEST(Decode, ThreeObjectRoundTrip) {
  const Scene s = scene(21, 3, 1.0 / 3.0);
  const EncodeResult enc = encode_targets(s.labels, s.calib);
  ASSERT_EQ(enc.encoded, 3);
  EXPECT_EQ(enc.collisions, 0);
  const auto dets = decode_detections(enc.heads, s.calib).detections;
  ASSERT_EQ(dets.size(), 3u);
  for (const auto& l : s.labels) {
    const Detection* d = nearest(dets, l);
    ASSERT_NE(d, nullptr);
    EXPECT_NEAR(d->box3d.location.x, l.location.x, 1e-3);
    EXPECT_NEAR(d->box3d.location.y, l.location.y, 1e-3);
    EXPECT_NEAR(d->box3d.location.z, l.location.z, 1e-3);
    EXPECT_NEAR(d->box3d.h, l.h, 1e-6);
    EXPECT_NEAR(d->box3d.w, l.w, 1e-6);
    EXPECT_NEAR(d->box3d.l, l.l, 1e-6);
    EXPECT_NEAR(std::abs(wrap_angle(d->box3d.ry - l.ry)), 0.0, 1e-6);
    EXPECT_NEAR(d->box2d.u1, l.bbox.u1, 1e-6);
    EXPECT_NEAR(d->box2d.v2, l.bbox.v2, 1e-6);
  }
}

TEST(Decode, ManyScenesRoundTrip) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Scene s = scene(seed, 10, 0.3);
    const auto dets = decode_detections(encode_targets(s.labels, s.calib).heads, s.calib).detections;
    ASSERT_EQ(dets.size(), s.labels.size());
    for (const auto& l : s.labels) {
      const Detection* d = nearest(dets, l);
      ASSERT_NE(d, nullptr);
      EXPECT_NEAR(d->box3d.location.z, l.location.z, 1e-3);
      EXPECT_NEAR(d->box3d.location.x, l.location.x, 1e-3);
    }
  }
}

TEST(Encode, OutsideObjectLivesOnRing) {
  const Scene s = scene(22, 1, 1.0);
  const EncodeResult enc = encode_targets(s.labels, s.calib);
  ASSERT_EQ(enc.representations.size(), 1u);
  EXPECT_EQ(enc.representations[0].kind, RepresentKind::Outside);
  const int cls = enc.heads.class_index(s.labels[0].class_name);
  const FeatureMap& m = enc.heads.maps;
  double ring_max = 0;
  for (int r = 0; r < m.h(); ++r) {
    for (int c = 0; c < m.w(); ++c) {
      for (int k = 0; k < 3; ++k) {
        if (!m.on_ring(r, c)) {
          ASSERT_EQ(m.at(r, c, k), 0.0);
        } else if (k == cls) {
          ring_max = std::max(ring_max, m.at(r, c, k));
        }
      }
    }
  }
  const Cell cell = enc.representations[0].cell;
  EXPECT_DOUBLE_EQ(m.at(cell.row, cell.col, cls), 1.0);
  EXPECT_DOUBLE_EQ(ring_max, 1.0);
  const auto dets = decode_detections(enc.heads, s.calib).detections;
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_EQ(dets[0].kind, RepresentKind::Outside);
  EXPECT_NEAR(dets[0].xr.u, enc.representations[0].xr.u, 1e-6);
  EXPECT_NEAR(dets[0].xr.v, enc.representations[0].xr.v, 1e-6);
}

TEST(Encode, InsideObjectLeavesRingEmpty) {
  const Scene s = scene(23, 6, 0.0);
  const FeatureMap& m = encode_targets(s.labels, s.calib).heads.maps;
  for (int r = 0; r < m.h(); ++r) {
    for (int c = 0; c < m.w(); ++c) {
      if (m.on_ring(r, c)) {
        for (int k = 0; k < 3; ++k) ASSERT_EQ(m.at(r, c, k), 0.0);
      }
    }
  }
}

TEST(Encode, EmptyAndSkipped) {
  const CameraIntrinsics K;
  const EncodeResult enc = encode_targets({}, K);
  for (double x : enc.heads.maps.data()) ASSERT_EQ(x, 0.0);
  EXPECT_EQ(enc.heads.rows(), 96);
  EXPECT_EQ(enc.heads.cols(), 320);
  EXPECT_TRUE(decode_detections(enc.heads, K).detections.empty());

  ObjectLabel dc;
  dc.class_name = "DontCare";
  ObjectLabel behind;
  behind.class_name = "Car";
  behind.h = 1.5;
  behind.w = 1.6;
  behind.l = 3.9;
  behind.location = {0, 1.6, -5};
  behind.bbox = {10, 10, 20, 20};
  const std::vector<ObjectLabel> labels{dc, behind};
  const EncodeResult e2 = encode_targets(labels, K);
  EXPECT_EQ(e2.encoded, 0);
  EXPECT_EQ(e2.skipped_other, 1);
  EXPECT_EQ(e2.skipped_behind_camera, 1);
}

TEST(Decode, GridMismatchThrows) {
  CameraIntrinsics K;
  const HeadOutputs ho({"Car", "Pedestrian", "Cyclist"}, 10, 10, 4);
  EXPECT_THROW(decode_detections(ho, K), PreconditionError);
}

TEST(TopK, SingleSplat) {
  FeatureMap hm(20, 30, 1);
  splat_gaussian_2d(hm, 0, {10, 20}, 2.0, true);
  const auto p = topk_peaks(hm, 1, 10, 0.1);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].cell, (Cell{10, 20}));
  EXPECT_DOUBLE_EQ(p[0].score, 1.0);
  EXPECT_FALSE(p[0].on_ring);
}

TEST(TopK, TwoSplatsOrderedByScore) {
  FeatureMap hm(20, 30, 2);
  splat_gaussian_2d(hm, 1, {5, 5}, 1.5, true);
  splat_gaussian_2d(hm, 0, {14, 22}, 1.5, true);
  for (double& x : hm.data()) x *= 0.5;
  hm.at(5, 5, 1) = 0.9;
  const auto p = topk_peaks(hm, 2, 10, 0.1);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].cell, (Cell{5, 5}));
  EXPECT_EQ(p[0].class_index, 1);
  EXPECT_EQ(p[1].cell, (Cell{14, 22}));
  EXPECT_EQ(topk_peaks(hm, 2, 1, 0.1).size(), 1u);
}

TEST(TopK, PlateauTieGoesToLowestCell) {
  FeatureMap hm(10, 10, 1);
  hm.at(5, 5, 0) = 0.8;
  hm.at(5, 6, 0) = 0.8;
  hm.at(6, 5, 0) = 0.8;
  auto p = topk_peaks(hm, 1, 10, 0.1);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].cell, (Cell{5, 5}));

  FeatureMap ring(10, 10, 1);
  ring.at(0, 3, 0) = 0.7;
  ring.at(0, 4, 0) = 0.7;
  p = topk_peaks(ring, 1, 10, 0.1);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].cell, (Cell{0, 3}));
  EXPECT_TRUE(p[0].on_ring);
}

TEST(TopK, RingAndInteriorDoNotSuppressEachOther) {
  FeatureMap hm(10, 10, 1);
  hm.at(0, 4, 0) = 0.9;
  hm.at(1, 4, 0) = 0.5;
  const auto p = topk_peaks(hm, 1, 10, 0.1);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[1].cell, (Cell{1, 4}));
  EXPECT_THROW(topk_peaks(hm, 1, 0, 0.1), PreconditionError);
}

TEST(Decode, InteriorPeaksNeverReadRing) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Scene s = scene(40 + seed, 10, 0.4);
    const HeadOutputs ho = encode_targets(s.labels, s.calib).heads;
    int reads = 0;
    const CellReadHook hook = [&](GridRegion region, Cell c) {
      ++reads;
      const bool ring = ho.maps.on_ring(c.row, c.col);
      if (region == GridRegion::Interior) {
        ASSERT_FALSE(ring);
      } else {
        ASSERT_TRUE(ring);
      }
    };
    const auto dets = decode_detections(ho, s.calib, {}, hook).detections;
    EXPECT_EQ(dets.size(), 10u);
    EXPECT_GT(reads, ho.rows() * ho.cols());
  }
}

TEST(Decode, DirectChannelShiftBoundedByWeight) {
  const Scene s = scene(24, 5, 0.0);
  const EncodeResult enc = encode_targets(s.labels, s.calib);
  const auto base = decode_detections(enc.heads, s.calib).detections;
  const HeadLayout L = enc.heads.layout();
  for (double delta : {-0.5, -0.1, 0.05, 0.3}) {
    HeadOutputs ho = enc.heads;
    for (const auto& rep : enc.representations) ho.maps.at(rep.cell.row, rep.cell.col, L.depth()) += delta;
    const auto moved = decode_detections(ho, s.calib).detections;
    ASSERT_EQ(moved.size(), base.size());
    for (std::size_t i = 0; i < moved.size(); ++i) {
      ASSERT_EQ(moved[i].cell, base[i].cell);
      const double dz_direct = moved[i].depths[0].z - base[i].depths[0].z;
      int valid = 0;
      for (const auto& e : base[i].depths) valid += e.valid && std::isfinite(e.z);
      // Equal sigmas: the direct estimate carries 1/valid of the weight.
      EXPECT_NEAR(moved[i].z_soft - base[i].z_soft, dz_direct / valid, 1e-9);
      EXPECT_LE(std::abs(moved[i].z_soft - base[i].z_soft), std::abs(dz_direct) + 1e-12);
    }
  }
}

TEST(Decode, EnsembleModes) {
  const Scene s = scene(25, 4, 0.25);
  HeadOutputs ho = encode_targets(s.labels, s.calib).heads;
  const HeadLayout L = ho.layout();
  const auto reps = encode_targets(s.labels, s.calib).representations;
  for (const auto& rep : reps) {
    ho.maps.at(rep.cell.row, rep.cell.col, L.depth()) += 0.2;
    ho.maps.at(rep.cell.row, rep.cell.col, L.depth_logsigma()) = std::log(0.001);
  }
  DecodeConfig hard;
  hard.ensemble = EnsembleMode::Hard;
  DecodeConfig single;
  single.ensemble = EnsembleMode::Single;
  single.single_source = DepthSource::Center;
  const auto dh = decode_detections(ho, s.calib, hard).detections;
  const auto ds = decode_detections(ho, s.calib, single).detections;
  ASSERT_EQ(dh.size(), 4u);
  for (std::size_t i = 0; i < dh.size(); ++i) {
    EXPECT_DOUBLE_EQ(dh[i].z, dh[i].depths[0].z);
    const double zc = ds[i].depths[1].z;
    EXPECT_DOUBLE_EQ(ds[i].z, std::isfinite(zc) && zc > 0 ? zc : ds[i].depths[0].z);
  }
}

TEST(Decode, ToLabelAndBoxAtDepth) {
  const Scene s = scene(26, 2, 0.0);
  const auto dets = decode_detections(encode_targets(s.labels, s.calib).heads, s.calib).detections;
  ASSERT_FALSE(dets.empty());
  const Detection& d = dets[0];
  const ObjectLabel l = to_label(d);
  EXPECT_EQ(l.occlusion, -1);
  EXPECT_EQ(l.truncation, -1.0);
  EXPECT_EQ(*l.score, d.score);
  const Box3D far = box_at_depth(d, 2 * d.z, s.calib);
  EXPECT_NEAR(far.location.z, 2 * d.z, 1e-9);
  EXPECT_NEAR(ry_to_alpha(far.ry, far.location.x, far.location.z), wrap_angle(d.alpha), 1e-9);
}
