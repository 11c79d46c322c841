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

#include <algorithm>

#include "monoflex/camera.hpp"

namespace monoflex {

// Axis-aligned image box, left-top (u1, v1) to right-bottom (u2, v2), pixels.
struct Box2D {
  double u1 = 0.0;
  double v1 = 0.0;
  double u2 = 0.0;
  double v2 = 0.0;

  double width() const { return u2 - u1; }
  double height() const { return v2 - v1; }
  double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }
  Point2 center() const { return {0.5 * (u1 + u2), 0.5 * (v1 + v2)}; }
  bool well_formed() const { return u1 < u2 && v1 < v2; }

  friend bool operator==(const Box2D&, const Box2D&) = default;
};

}  // namespace monoflex
