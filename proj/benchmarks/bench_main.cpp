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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "monoflex/decode.hpp"
#include "monoflex/eval3d.hpp"
#include "monoflex/synthgen.hpp"

using namespace monoflex;

namespace {

std::vector<Box3D> random_boxes(int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Box3D> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({{rng.uniform(-2, 2), rng.uniform(1, 2), rng.uniform(10, 14)}, rng.uniform(1.4, 1.8),
                   rng.uniform(1.5, 1.9), rng.uniform(3.5, 4.5), rng.uniform(-3.14, 3.14)});
  }
  return out;
}

Scene bench_scene(int n_objects) {
  SceneSpec spec;
  spec.seed = 17;
  spec.n_objects = n_objects;
  return gen_scene(spec);
}

}  // namespace

static void BM_Iou3d(benchmark::State& state) {
  const auto boxes = random_boxes(256, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(iou3d(boxes[i % 256], boxes[(i + 1) % 256]));
    ++i;
  }
}
BENCHMARK(BM_Iou3d);

static void BM_EncodeTargets(benchmark::State& state) {
  const Scene s = bench_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(encode_targets(s.labels, s.calib));
}
BENCHMARK(BM_EncodeTargets)->Arg(8)->Arg(32);

static void BM_DecodeDetections(benchmark::State& state) {
  const Scene s = bench_scene(static_cast<int>(state.range(0)));
  const HeadOutputs ho = encode_targets(s.labels, s.calib).heads;
  for (auto _ : state) benchmark::DoNotOptimize(decode_detections(ho, s.calib));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DecodeDetections)->Arg(8)->Arg(32);

static void BM_Evaluate(benchmark::State& state) {
  const int images = static_cast<int>(state.range(0));
  std::vector<std::vector<ObjectLabel>> gt, det;
  for (int i = 0; i < images; ++i) {
    SceneSpec spec;
    spec.seed = static_cast<std::uint64_t>(i);
    const Scene s = gen_scene(spec);
    gt.push_back(s.labels);
    std::vector<ObjectLabel> d;
    for (const auto& x : decode_detections(encode_targets(s.labels, s.calib).heads, s.calib).detections) {
      d.push_back(to_label(x));
    }
    det.push_back(std::move(d));
  }
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(gt, det));
  state.SetItemsProcessed(state.iterations() * images);
}
BENCHMARK(BM_Evaluate)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
