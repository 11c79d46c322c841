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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "monoflex/synthgen.hpp"

namespace monoflex::tools {

// Bad flags, config values or missing input paths. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
  std::string labels_dir;
  std::string calib_dir;
  std::string heads_dir;
  std::string pred_dir;
  std::string out_dir;
  std::string spec_file;   // synth: SceneSpec JSON
  std::string noise_file;  // encode: NoiseSpec JSON
  int stride = 4;
  double score_threshold = 0.1;
  int max_detections = 50;
  std::string ensemble = "soft";  // soft | hard | oracle | single:<direct|center|diag1|diag2>
  std::string eval_mode = "R40";
  std::vector<std::string> classes{"Car", "Pedestrian", "Cyclist"};
  int image_w = 1280;
  int image_h = 384;
  std::optional<std::uint64_t> seed;
  int scenes = 1;
  int jobs = 1;
  std::string head_format = "bin";  // bin | json

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

// Overlays the keys present in a JSON object onto `base`. Unknown keys and
// mistyped values throw ConfigError naming the key.
RunConfig merge_run_config(RunConfig base, std::string_view json_text);

SceneSpec scene_spec_from_json(std::string_view json_text);
NoiseSpec noise_spec_from_json(std::string_view json_text);

// Scene and calibration ids (file stems) in a directory, sorted.
std::vector<std::string> list_ids(const std::string& dir, std::string_view extension);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Entry point shared by the executable and the integration tests. args[0]
// is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace monoflex::tools
