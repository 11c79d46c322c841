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

#include "monoflex/eval3d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "monoflex/errors.hpp"

namespace monoflex {

namespace {

constexpr double kClipEps = 1e-9;
constexpr double kMinArea = 1e-12;

double cross(const Vec2& o, const Vec2& a, const Vec2& b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

}  // namespace

double signed_area(const Polygon& poly) {
  double s = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

Polygon convex_clip(const Polygon& subject, const Polygon& clip) {
  Polygon out = subject;
  for (std::size_t i = 0, n = clip.size(); i < n && !out.empty(); ++i) {
    const Vec2& a = clip[i];
    const Vec2& b = clip[(i + 1) % n];
    const Polygon in = std::move(out);
    out.clear();
    for (std::size_t j = 0, m = in.size(); j < m; ++j) {
      const Vec2& p = in[j];
      const Vec2& q = in[(j + 1) % m];
      // Signed distance (scaled) to the clip edge; >= 0 is inside for CCW clip.
      const double dp = cross(a, b, p);
      const double dq = cross(a, b, q);
      const bool p_in = dp >= -kClipEps;
      const bool q_in = dq >= -kClipEps;
      if (p_in) out.push_back(p);
      if (p_in != q_in) {
        const double t = dp / (dp - dq);
        out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
  }
  if (out.size() < 3 || std::abs(signed_area(out)) < kMinArea) return {};
  return out;
}

Polygon bev_polygon(const Box3D& b) {
  const auto v = corners(b);
  Polygon poly;
  for (int i = 0; i < 4; ++i) poly.push_back({v[i].x, v[i].z});
  if (signed_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
  return poly;
}

namespace {

double bev_intersection(const Box3D& a, const Box3D& b) {
  const Polygon inter = convex_clip(bev_polygon(a), bev_polygon(b));
  return inter.empty() ? 0.0 : std::abs(signed_area(inter));
}

}  // namespace

double iou_bev(const Box3D& a, const Box3D& b) {
  const double inter = bev_intersection(a, b);
  const double uni = a.w * a.l + b.w * b.l - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double iou3d(const Box3D& a, const Box3D& b) {
  const double top = std::max(a.location.y - a.h, b.location.y - b.h);
  const double bottom = std::min(a.location.y, b.location.y);
  const double overlap_h = std::max(0.0, bottom - top);
  if (overlap_h <= 0.0) return 0.0;
  const double inter = bev_intersection(a, b) * overlap_h;
  const double uni = a.h * a.w * a.l + b.h * b.w * b.l - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double iou2d(const Box2D& a, const Box2D& b) {
  const double iw = std::min(a.u2, b.u2) - std::max(a.u1, b.u1);
  const double ih = std::min(a.v2, b.v2) - std::max(a.v1, b.v1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

const LevelResult& EvalResult::at(const std::string& cls, Difficulty d) const {
  for (const auto& c : classes) {
    if (c.class_name != cls) continue;
    for (const auto& l : c.levels) {
      if (l.difficulty == d) return l;
    }
  }
  throw PreconditionError("no evaluation result for " + cls + "/" + std::string(to_string(d)));
}

std::vector<MatchedDetection> match_image(const std::vector<ObjectLabel>& gt, const std::vector<ObjectLabel>& det,
                                          const std::string& cls, Difficulty level, double iou_threshold,
                                          const EvalConfig& cfg, int* num_counted_gt) {
  std::vector<std::size_t> counted;
  std::vector<std::size_t> excluded;
  std::vector<std::size_t> dont_care;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i].is_dont_care()) {
      dont_care.push_back(i);
    } else if (gt[i].class_name == cls) {
      (meets_difficulty(gt[i], level, cfg.thresholds) ? counted : excluded).push_back(i);
    }
  }
  if (num_counted_gt) *num_counted_gt = static_cast<int>(counted.size());

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < det.size(); ++i) {
    if (det[i].class_name == cls) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return det[a].score.value_or(0.0) > det[b].score.value_or(0.0); });

  std::vector<bool> taken(gt.size(), false);
  const auto best_match = [&](const std::vector<std::size_t>& pool, const Box3D& box) -> std::ptrdiff_t {
    std::ptrdiff_t best = -1;
    double best_iou = -1.0;
    for (std::size_t g : pool) {
      if (taken[g]) continue;
      const double iou = iou3d(box, gt[g].box3d());
      if (iou >= iou_threshold && iou > best_iou) {
        best_iou = iou;
        best = static_cast<std::ptrdiff_t>(g);
      }
    }
    return best;
  };

  std::vector<MatchedDetection> out;
  for (std::size_t d : order) {
    const Box3D box = det[d].box3d();
    const double score = det[d].score.value_or(0.0);
    if (const auto g = best_match(counted, box); g >= 0) {
      taken[static_cast<std::size_t>(g)] = true;
      out.push_back({score, true});
      continue;
    }
    if (const auto g = best_match(excluded, box); g >= 0) {
      taken[static_cast<std::size_t>(g)] = true;
      continue;
    }
    const bool in_dont_care = std::any_of(dont_care.begin(), dont_care.end(), [&](std::size_t g) {
      return iou2d(det[d].bbox, gt[g].bbox) > cfg.dont_care_iou;
    });
    if (!in_dont_care) out.push_back({score, false});
  }
  return out;
}

PRCurve pr_curve(std::vector<MatchedDetection> matches, int num_gt) {
  std::stable_sort(matches.begin(), matches.end(),
                   [](const MatchedDetection& a, const MatchedDetection& b) { return a.score > b.score; });
  PRCurve curve;
  curve.reserve(matches.size());
  int tp = 0;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    if (matches[i].true_positive) ++tp;
    const double recall = num_gt > 0 ? static_cast<double>(tp) / num_gt : 0.0;
    curve.push_back({matches[i].score, recall, static_cast<double>(tp) / static_cast<double>(i + 1)});
  }
  return curve;
}

double average_precision(const PRCurve& curve, ApMode mode) {
  const int n = mode == ApMode::R11 ? 11 : 40;
  // Interpolated precision: max precision at recall >= r, via a suffix max.
  std::vector<double> suffix_max(curve.size() + 1, 0.0);
  for (std::size_t i = curve.size(); i-- > 0;) suffix_max[i] = std::max(suffix_max[i + 1], curve[i].precision);

  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double r = mode == ApMode::R11 ? k / 10.0 : (k + 1) / 40.0;
    // Recall is non-decreasing along the curve.
    const auto it = std::lower_bound(curve.begin(), curve.end(), r - 1e-12,
                                     [](const PRPoint& p, double value) { return p.recall < value; });
    sum += suffix_max[static_cast<std::size_t>(it - curve.begin())];
  }
  return sum / n;
}

EvalResult evaluate(const std::vector<std::vector<ObjectLabel>>& gt, const std::vector<std::vector<ObjectLabel>>& det,
                    const EvalConfig& cfg) {
  if (gt.size() != det.size()) {
    throw PreconditionError("evaluate: " + std::to_string(gt.size()) + " ground-truth images but " +
                            std::to_string(det.size()) + " detection images");
  }
  EvalResult result;
  for (const auto& cls : cfg.classes) {
    const auto thr = cfg.iou_threshold.find(cls);
    if (thr == cfg.iou_threshold.end()) throw PreconditionError("evaluate: no IoU threshold for class '" + cls + "'");

    ClassResult cr;
    cr.class_name = cls;
    for (Difficulty level : cfg.difficulties) {
      std::vector<MatchedDetection> pooled;
      int num_gt = 0;
      for (std::size_t img = 0; img < gt.size(); ++img) {
        int counted = 0;
        auto m = match_image(gt[img], det[img], cls, level, thr->second, cfg, &counted);
        num_gt += counted;
        pooled.insert(pooled.end(), m.begin(), m.end());
      }
      LevelResult lr;
      lr.difficulty = level;
      lr.num_gt = num_gt;
      lr.populated = num_gt > 0;
      lr.num_tp = static_cast<int>(std::count_if(pooled.begin(), pooled.end(), [](auto& m) { return m.true_positive; }));
      lr.num_fp = static_cast<int>(pooled.size()) - lr.num_tp;
      lr.curve = pr_curve(std::move(pooled), num_gt);
      if (lr.populated) {
        lr.ap_r11 = average_precision(lr.curve, ApMode::R11);
        lr.ap_r40 = average_precision(lr.curve, ApMode::R40);
      }
      cr.levels.push_back(std::move(lr));
    }
    result.classes.push_back(std::move(cr));
  }
  return result;
}

std::string format_report_text(const EvalResult& result) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-12s %-9s %6s %6s %6s %9s %9s\n", "class", "level", "gt", "tp", "fp", "AP3D@R11",
                "AP3D@R40");
  out += buf;
  for (const auto& c : result.classes) {
    for (const auto& l : c.levels) {
      if (l.populated) {
        std::snprintf(buf, sizeof(buf), "%-12s %-9s %6d %6d %6d %9.4f %9.4f\n", c.class_name.c_str(),
                      std::string(to_string(l.difficulty)).c_str(), l.num_gt, l.num_tp, l.num_fp, l.ap_r11, l.ap_r40);
      } else {
        std::snprintf(buf, sizeof(buf), "%-12s %-9s %6d %6d %6d %9s %9s\n", c.class_name.c_str(),
                      std::string(to_string(l.difficulty)).c_str(), l.num_gt, l.num_tp, l.num_fp, "-", "-");
      }
      out += buf;
    }
  }
  return out;
}

std::string format_report_json(const EvalResult& result, bool include_curves) {
  nlohmann::ordered_json doc;
  doc["metric"] = "AP3D";
  auto& classes = doc["classes"] = nlohmann::ordered_json::object();
  for (const auto& c : result.classes) {
    auto& jc = classes[c.class_name] = nlohmann::ordered_json::object();
    for (const auto& l : c.levels) {
      nlohmann::ordered_json jl;
      jl["num_gt"] = l.num_gt;
      jl["num_tp"] = l.num_tp;
      jl["num_fp"] = l.num_fp;
      jl["ap_r11"] = l.populated ? nlohmann::ordered_json(l.ap_r11) : nlohmann::ordered_json(nullptr);
      jl["ap_r40"] = l.populated ? nlohmann::ordered_json(l.ap_r40) : nlohmann::ordered_json(nullptr);
      if (include_curves) {
        auto& jcurve = jl["pr_curve"] = nlohmann::ordered_json::array();
        for (const auto& p : l.curve) jcurve.push_back({p.score, p.recall, p.precision});
      }
      jc[std::string(to_string(l.difficulty))] = std::move(jl);
    }
  }
  return doc.dump(2) + "\n";
}

}  // namespace monoflex
