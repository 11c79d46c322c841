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

#include <cstddef>
#include <span>
#include <vector>

namespace monoflex {

struct Cell {
  int row = 0;
  int col = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

// Dense h x w x c grid of reals, row-major with channels innermost.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int h, int w, int c, double fill = 0.0);

  int h() const { return h_; }
  int w() const { return w_; }
  int c() const { return c_; }
  std::size_t size() const { return data_.size(); }

  double& at(int row, int col, int ch) { return data_[index(row, col, ch)]; }
  double at(int row, int col, int ch) const { return data_[index(row, col, ch)]; }

  // The c channel values of one cell.
  std::span<double> cell(int row, int col) { return {data_.data() + index(row, col, 0), static_cast<std::size_t>(c_)}; }
  std::span<const double> cell(int row, int col) const {
    return {data_.data() + index(row, col, 0), static_cast<std::size_t>(c_)};
  }

  bool contains(int row, int col) const { return row >= 0 && row < h_ && col >= 0 && col < w_; }
  bool on_ring(int row, int col) const { return row == 0 || col == 0 || row == h_ - 1 || col == w_ - 1; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  std::size_t index(int row, int col, int ch) const {
    return (static_cast<std::size_t>(row) * w_ + col) * c_ + ch;
  }

  int h_ = 0;
  int w_ = 0;
  int c_ = 0;
  std::vector<double> data_;
};

/// Clockwise walk over the boundary ring of an h x w grid: top row left to
/// right, right column downward, bottom row right to left, left column
/// upward. Every boundary cell appears exactly once, 2(h + w) - 4 in total.
class RingPath {
 public:
  RingPath(int h, int w);

  int size() const { return static_cast<int>(cells_.size()); }
  Cell operator[](int i) const { return cells_[i]; }
  // Position of a boundary cell along the walk, -1 for interior cells.
  int index_of(Cell c) const;
  // Shortest cyclic distance between two walk positions.
  int distance(int i, int j) const;

  const std::vector<Cell>& cells() const { return cells_; }

 private:
  int h_;
  int w_;
  std::vector<Cell> cells_;
};

}  // namespace monoflex
