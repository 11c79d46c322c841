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
#include <cstdio>
#include <random>
#include <string>

#include "monoflex/box3d.hpp"
#include "monoflex/errors.hpp"
#include "monoflex/kitti.hpp"
#include "oracles.hpp"

using namespace monoflex;

namespace {

const char* kCalib =
    "P0: 7.215377e+02 0.000000e+00 6.095593e+02 0.000000e+00 0.000000e+00 7.215377e+02 1.728540e+02 "
    "0.000000e+00 0.000000e+00 0.000000e+00 1.000000e+00 0.000000e+00\n"
    "P2: 7.215377e+02 0.000000e+00 6.095593e+02 4.485728e+01 0.000000e+00 7.215377e+02 1.728540e+02 "
    "2.163791e-01 0.000000e+00 0.000000e+00 1.000000e+00 2.745884e-03\n"
    "R0_rect: 9.999239e-01 9.837760e-03 -7.445048e-03 -9.869795e-03 9.999421e-01 -4.278459e-03 7.402527e-03 "
    "4.351614e-03 9.999631e-01\n";

ObjectLabel label_with(double height, int occ, double trunc) {
  ObjectLabel l;
  l.class_name = "Car";
  l.bbox = {100, 100, 150, 100 + height};
  l.occlusion = occ;
  l.truncation = trunc;
  return l;
}

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Random row text with values already at format precision.
std::string random_row(std::mt19937_64& rng, bool with_score) {
  std::uniform_int_distribution<int> cents(-200000, 200000), occ(-1, 3), cls(0, 3);
  const char* names[] = {"Car", "Pedestrian", "Cyclist", "DontCare"};
  std::string s = names[cls(rng)];
  s += " " + fmt2(std::abs(cents(rng)) % 101 / 100.0) + " " + std::to_string(occ(rng));
  for (int i = 0; i < 12; ++i) s += " " + fmt2(cents(rng) / 100.0);
  if (with_score) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), " %.4f", std::abs(cents(rng)) / 200000.0);
    s += buf;
  }
  return s + "\n";
}

}  // namespace

TEST(LabelParse, EmptyFileIsEmpty) {
  EXPECT_TRUE(parse_label_file("").empty());
  EXPECT_TRUE(parse_label_file("\n  \n").empty());
}

TEST(LabelParse, StandardRow) {
  const auto v = parse_label_file(
      "Pedestrian 0.00 0 -0.20 712.40 143.00 810.73 307.92 1.89 0.48 1.20 1.84 1.47 8.41 0.01\n");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].class_name, "Pedestrian");
  EXPECT_DOUBLE_EQ(v[0].bbox.u2, 810.73);
  EXPECT_DOUBLE_EQ(v[0].h, 1.89);
  EXPECT_DOUBLE_EQ(v[0].location.z, 8.41);
  EXPECT_FALSE(v[0].score.has_value());
}

TEST(LabelParse, ScoreColumnAndCrLf) {
  const auto v = parse_label_file("Car -1 -1 1.5 0 0 10 10 1.5 1.6 3.9 1 2 30 1.5 0.8765\r\n");
  ASSERT_EQ(v.size(), 1u);
  ASSERT_TRUE(v[0].score.has_value());
  EXPECT_DOUBLE_EQ(*v[0].score, 0.8765);
  EXPECT_EQ(v[0].occlusion, -1);
}

TEST(LabelParse, ProjectedBoxRoundTripAtFormatPrecision) {
  const CameraIntrinsics K;
  const Box3D b{{-2.37, 1.63, 21.48}, 1.52, 1.66, 4.01, -1.21};
  const auto kp = keypoints10(b, K);
  double u1 = 1e9, v1 = 1e9, u2 = -1e9, v2 = -1e9;
  for (int i = 0; i < 8; ++i) {
    u1 = std::min(u1, kp.pts[i].u);
    v1 = std::min(v1, kp.pts[i].v);
    u2 = std::max(u2, kp.pts[i].u);
    v2 = std::max(v2, kp.pts[i].v);
  }
  ObjectLabel l;
  l.class_name = "Car";
  l.alpha = ry_to_alpha(b.ry, b.location.x, b.location.z);
  l.bbox = {u1, v1, u2, v2};
  l.h = b.h;
  l.w = b.w;
  l.l = b.l;
  l.location = b.location;
  l.ry = b.ry;
  const std::array<ObjectLabel, 1> one{l};
  const auto back = parse_label_file(serialize_labels(one));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_NEAR(back[0].alpha, l.alpha, 5e-3);
  EXPECT_NEAR(back[0].bbox.u1, u1, 5e-3);
  EXPECT_NEAR(back[0].bbox.v2, v2, 5e-3);
  EXPECT_NEAR(back[0].location.x, b.location.x, 1e-9);
  EXPECT_NEAR(back[0].ry, b.ry, 1e-9);
}

TEST(LabelParse, FieldCountErrorNamesLine) {
  try {
    parse_label_file("Car 0 0 0 0 0 1 1 1 1 1 0 0 10 0\nCar 0 0 0 0 0 1 1 1 1 1 0 0 10\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("14"), std::string::npos);
  }
  EXPECT_THROW(parse_label_file("Car 0 0 0 0 0 1 1 1 1 1 0 0 10 0 1 2\n"), ParseError);
}

TEST(LabelParse, NonNumericErrorNamesLine) {
  try {
    parse_label_file("\nCar 0 0 0 0 0 1 1 1 1 1 0 abc 10 0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("abc"), std::string::npos);
  }
  EXPECT_THROW(parse_label_file("Car 0 0.5 0 0 0 1 1 1 1 1 0 0 10 0\n"), ParseError);  // occlusion
  EXPECT_THROW(parse_label_file("Car 0 0 0 0 0 1 1 1 1 1 0 0 10 nan\n"), ParseError);
  EXPECT_THROW(parse_label_file("Car 0 0 0 0 0 1 1 1 1 1 0 0 1e999 0\n"), ParseError);
  EXPECT_THROW(parse_label_file("Car 0 0 0 0 0 1 1 1 1 1 0 0 10 0.5x\n"), ParseError);
}

TEST(LabelSerialize, FixedPrecision) {
  ObjectLabel l;
  l.class_name = "Cyclist";
  l.truncation = 0.123;
  l.occlusion = 2;
  l.location = {1.005, -0.004, 12.3456};
  l.score = 0.123456;
  const std::array<ObjectLabel, 1> one{l};
  const std::string s = serialize_labels(one);
  EXPECT_EQ(s.substr(0, 15), "Cyclist 0.12 2 ");
  EXPECT_NE(s.find("12.35"), std::string::npos);
  EXPECT_NE(s.find(" 0.1235\n"), std::string::npos);
}

TEST(LabelProperty, SerializeParseIdempotent) {
  std::mt19937_64 rng(50);
  std::string text;
  for (int i = 0; i < 10000; ++i) text += random_row(rng, i % 3 == 0);
  const auto first = parse_label_file(text);
  ASSERT_EQ(first.size(), 10000u);
  const std::string once = serialize_labels(first);
  EXPECT_EQ(once, text);
  EXPECT_EQ(serialize_labels(parse_label_file(once)), once);
}

TEST(Calib, ParsesP2) {
  const CameraIntrinsics K = parse_calib(kCalib);
  EXPECT_DOUBLE_EQ(K.fx, 721.5377);
  EXPECT_DOUBLE_EQ(K.fy, 721.5377);
  EXPECT_DOUBLE_EQ(K.cu, 609.5593);
  EXPECT_DOUBLE_EQ(K.cv, 172.854);
  EXPECT_DOUBLE_EQ(K.tx, 44.85728);
  EXPECT_DOUBLE_EQ(K.ty, 0.2163791);
  EXPECT_EQ(K.image_w, 1280);
  EXPECT_EQ(K.image_h, 384);
}

TEST(Calib, IdentityLikeMatrix) {
  const CameraIntrinsics K = parse_calib("P2: 1 0 0 0 0 1 0 0 0 0 1 0\n", 10, 20);
  EXPECT_EQ(K.fx, 1.0);
  EXPECT_EQ(K.fy, 1.0);
  EXPECT_EQ(K.cu, 0.0);
  EXPECT_EQ(K.cv, 0.0);
  EXPECT_EQ(K.image_w, 10);
}

TEST(Calib, ErrorPaths) {
  EXPECT_THROW(parse_calib("P0: 1 0 0 0 0 1 0 0 0 0 1 0\n"), ParseError);
  EXPECT_THROW(parse_calib("P2: 1 0 0 0 0 1 0 0 0 0 1\n"), ParseError);
  EXPECT_THROW(parse_calib("P2: 1 0 0 0 0 1 0 x 0 0 1 0\n"), ParseError);
  EXPECT_THROW(parse_calib("P2: 0 0 0 0 0 1 0 0 0 0 1 0\n"), ParseError);
}

TEST(CalibProperty, SerializeParseRoundTrip) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> uf(300, 2000), uc(100, 900), ut(-400, 400);
  for (int i = 0; i < 500; ++i) {
    CameraIntrinsics K;
    K.fx = uf(rng);
    K.fy = uf(rng);
    K.cu = uc(rng);
    K.cv = uc(rng);
    K.tx = ut(rng);
    K.ty = ut(rng) / 100;
    const std::string s = serialize_calib(K);
    const CameraIntrinsics back = parse_calib(s);
    EXPECT_NEAR(back.fx, K.fx, 1e-9 * K.fx);
    EXPECT_NEAR(back.cu, K.cu, 1e-9 * K.cu);
    EXPECT_NEAR(back.tx, K.tx, 1e-9 * std::abs(K.tx) + 1e-15);
    EXPECT_EQ(serialize_calib(back), s);
  }
}

TEST(Difficulty, RuleApplication) {
  EXPECT_EQ(difficulty(label_with(50, 0, 0.1)), Difficulty::Easy);
  EXPECT_EQ(difficulty(label_with(30, 1, 0.2)), Difficulty::Moderate);
  EXPECT_EQ(difficulty(label_with(30, 2, 0.45)), Difficulty::Hard);
  EXPECT_EQ(difficulty(label_with(20, 0, 0.0)), Difficulty::Ignored);
  EXPECT_EQ(difficulty(label_with(50, 3, 0.0)), Difficulty::Ignored);
  EXPECT_EQ(difficulty(label_with(50, 0, 0.6)), Difficulty::Ignored);
}

TEST(Difficulty, LevelsNest) {
  const auto l = label_with(50, 0, 0.1);
  EXPECT_TRUE(meets_difficulty(l, Difficulty::Easy));
  EXPECT_TRUE(meets_difficulty(l, Difficulty::Moderate));
  EXPECT_TRUE(meets_difficulty(l, Difficulty::Hard));
  const auto m = label_with(30, 1, 0.2);
  EXPECT_FALSE(meets_difficulty(m, Difficulty::Easy));
  EXPECT_TRUE(meets_difficulty(m, Difficulty::Hard));
  EXPECT_EQ(to_string(Difficulty::Moderate), "moderate");
}
