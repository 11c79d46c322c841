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

#include "monoflex/kitti.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "monoflex/errors.hpp"

namespace monoflex {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_real(std::string_view tok, int line, const char* field) {
  double value = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError("non-numeric " + std::string(field) + " field '" + std::string(tok) + "'", line);
  }
  return value;
}

int parse_int(std::string_view tok, int line, const char* field) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("non-integer " + std::string(field) + " field '" + std::string(tok) + "'", line);
  }
  return value;
}

void append_fixed(std::string& out, double v, const char* fmt) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof(buf), fmt, v);
  out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

std::vector<ObjectLabel> parse_label_file(std::string_view text) {
  std::vector<ObjectLabel> labels;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 15 && tok.size() != 16) {
      throw ParseError("expected 15 or 16 fields, found " + std::to_string(tok.size()), line_no);
    }

    ObjectLabel l;
    l.class_name = std::string(tok[0]);
    l.truncation = parse_real(tok[1], line_no, "truncation");
    l.occlusion = parse_int(tok[2], line_no, "occlusion");
    l.alpha = parse_real(tok[3], line_no, "alpha");
    l.bbox = {parse_real(tok[4], line_no, "bbox"), parse_real(tok[5], line_no, "bbox"),
              parse_real(tok[6], line_no, "bbox"), parse_real(tok[7], line_no, "bbox")};
    l.h = parse_real(tok[8], line_no, "height");
    l.w = parse_real(tok[9], line_no, "width");
    l.l = parse_real(tok[10], line_no, "length");
    l.location = {parse_real(tok[11], line_no, "x"), parse_real(tok[12], line_no, "y"),
                  parse_real(tok[13], line_no, "z")};
    l.ry = parse_real(tok[14], line_no, "rotation_y");
    if (tok.size() == 16) l.score = parse_real(tok[15], line_no, "score");
    labels.push_back(std::move(l));
  }
  return labels;
}

std::string serialize_labels(std::span<const ObjectLabel> labels) {
  std::string out;
  for (const auto& l : labels) {
    out += l.class_name;
    const auto put = [&](double v) {
      out += ' ';
      append_fixed(out, v, "%.2f");
    };
    put(l.truncation);
    out += ' ';
    out += std::to_string(l.occlusion);
    put(l.alpha);
    put(l.bbox.u1);
    put(l.bbox.v1);
    put(l.bbox.u2);
    put(l.bbox.v2);
    put(l.h);
    put(l.w);
    put(l.l);
    put(l.location.x);
    put(l.location.y);
    put(l.location.z);
    put(l.ry);
    if (l.score) {
      out += ' ';
      append_fixed(out, *l.score, "%.4f");
    }
    out += '\n';
  }
  return out;
}

CameraIntrinsics parse_calib(std::string_view text, int image_w, int image_h) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

    const auto tok = split_ws(line);
    if (tok.empty() || tok[0] != "P2:") continue;
    if (tok.size() != 13) {
      throw ParseError("P2 row needs 12 values, found " + std::to_string(tok.size() - 1), line_no);
    }
    std::array<double, 12> p{};
    for (int i = 0; i < 12; ++i) p[i] = parse_real(tok[i + 1], line_no, "P2");

    CameraIntrinsics K;
    K.fx = p[0];
    K.cu = p[2];
    K.tx = p[3];
    K.fy = p[5];
    K.cv = p[6];
    K.ty = p[7];
    K.image_w = image_w;
    K.image_h = image_h;
    try {
      K.validate();
    } catch (const PreconditionError& e) {
      throw ParseError(e.what(), line_no);
    }
    return K;
  }
  throw ParseError("calibration has no P2 row", 0);
}

std::string serialize_calib(const CameraIntrinsics& K) {
  const std::array<double, 12> p = {K.fx, 0.0, K.cu, K.tx, 0.0, K.fy, K.cv, K.ty, 0.0, 0.0, 1.0, 0.0};
  std::string out;
  const auto row = [&](const char* name, std::span<const double> values) {
    out += name;
    for (double v : values) {
      out += ' ';
      append_fixed(out, v, "%.12e");
    }
    out += '\n';
  };
  for (const char* name : {"P0:", "P1:", "P2:", "P3:"}) row(name, p);
  const std::array<double, 9> r0 = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  row("R0_rect:", r0);
  const std::array<double, 12> zero{};
  row("Tr_velo_to_cam:", zero);
  row("Tr_imu_to_velo:", zero);
  return out;
}

std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Moderate: return "moderate";
    case Difficulty::Hard: return "hard";
    case Difficulty::Ignored: return "ignored";
  }
  return "unknown";
}

bool meets_difficulty(const ObjectLabel& label, Difficulty level, const DifficultyThresholds& t) {
  if (level == Difficulty::Ignored) return true;
  const auto i = static_cast<std::size_t>(level);
  return label.bbox.height() >= t.min_height[i] && label.occlusion <= t.max_occlusion[i] &&
         label.truncation <= t.max_truncation[i];
}

Difficulty difficulty(const ObjectLabel& label, const DifficultyThresholds& t) {
  for (Difficulty d : {Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard}) {
    if (meets_difficulty(label, d, t)) return d;
  }
  return Difficulty::Ignored;
}

}  // namespace monoflex
