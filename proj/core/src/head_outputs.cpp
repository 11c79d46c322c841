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

#include "monoflex/head_outputs.hpp"

#include <bit>
#include <cstdint>
#include <cstring>

#include <json.hpp>

#include "monoflex/errors.hpp"

namespace monoflex {

std::vector<std::string> HeadLayout::channel_names(const std::vector<std::string>& class_names) const {
  std::vector<std::string> n;
  for (const auto& c : class_names) n.push_back("heatmap/" + c);
  n.insert(n.end(), {"offset/du", "offset/dv"});
  n.insert(n.end(), {"box2d/left", "box2d/top", "box2d/right", "box2d/bottom"});
  n.insert(n.end(), {"dims/h", "dims/w", "dims/l"});
  for (int b = 0; b < num_bins; ++b) n.push_back("orient/logit" + std::to_string(b));
  for (int b = 0; b < num_bins; ++b) {
    n.push_back("orient/sin" + std::to_string(b));
    n.push_back("orient/cos" + std::to_string(b));
  }
  for (int k = 1; k <= 10; ++k) {
    n.push_back("keypoint" + std::to_string(k) + "/du");
    n.push_back("keypoint" + std::to_string(k) + "/dv");
  }
  n.insert(n.end(), {"depth/raw", "depth/log_sigma", "kp_depth/log_sigma_center", "kp_depth/log_sigma_diag1",
                     "kp_depth/log_sigma_diag2"});
  return n;
}

HeadOutputs::HeadOutputs(std::vector<std::string> classes, int rows, int cols, int stride_, int bins)
    : class_names(std::move(classes)), stride(stride_), num_bins(bins) {
  maps = FeatureMap(rows, cols, layout().total());
}

int HeadOutputs::class_index(std::string_view name) const {
  for (std::size_t i = 0; i < class_names.size(); ++i) {
    if (class_names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

using json = nlohmann::ordered_json;

json header(const HeadOutputs& ho) {
  json h;
  h["format"] = "monoflex-head-outputs";
  h["version"] = 1;
  h["dtype"] = "float32le";
  h["layout"] = "CHW";
  h["channels"] = ho.maps.c();
  h["Hf"] = ho.rows();
  h["Wf"] = ho.cols();
  h["S"] = ho.stride;
  h["num_bins"] = ho.num_bins;
  h["class_names"] = ho.class_names;
  h["channel_names"] = ho.layout().channel_names(ho.class_names);
  return h;
}

HeadOutputs from_header(const json& h) {
  try {
    if (h.at("format").get<std::string>() != "monoflex-head-outputs") throw ParseError("unknown head format", 0);
    if (h.at("version").get<int>() != 1) throw ParseError("unsupported head format version", 0);
    const int rows = h.at("Hf").get<int>();
    const int cols = h.at("Wf").get<int>();
    const int stride = h.at("S").get<int>();
    const int bins = h.at("num_bins").get<int>();
    const int channels = h.at("channels").get<int>();
    auto classes = h.at("class_names").get<std::vector<std::string>>();
    if (rows < 1 || cols < 1 || stride < 1 || bins < 1) throw ParseError("head header: non-positive size", 0);
    HeadOutputs ho(std::move(classes), rows, cols, stride, bins);
    if (ho.layout().total() != channels) {
      throw ParseError("head header: channel count " + std::to_string(channels) + " does not match layout (" +
                           std::to_string(ho.layout().total()) + ")",
                       0);
    }
    return ho;
  } catch (const json::exception& e) {
    throw ParseError(std::string("head header: ") + e.what(), 0);
  }
}

std::size_t chw_index(const FeatureMap& m, int ch, int r, int c) {
  return (static_cast<std::size_t>(ch) * m.h() + r) * m.w() + c;
}

}  // namespace

std::string head_header_json(const HeadOutputs& ho) { return header(ho).dump(2) + "\n"; }

std::string head_to_binary(const HeadOutputs& ho) {
  const FeatureMap& m = ho.maps;
  std::string out(m.size() * sizeof(float), '\0');
  for (int ch = 0; ch < m.c(); ++ch) {
    for (int r = 0; r < m.h(); ++r) {
      for (int c = 0; c < m.w(); ++c) {
        auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(m.at(r, c, ch)));
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
        std::memcpy(out.data() + 4 * chw_index(m, ch, r, c), &bits, 4);
      }
    }
  }
  return out;
}

HeadOutputs head_from_binary(std::string_view header_json, std::string_view payload) {
  json h;
  try {
    h = json::parse(header_json);
  } catch (const json::exception& e) {
    throw ParseError(std::string("head header: ") + e.what(), 0);
  }
  HeadOutputs ho = from_header(h);
  FeatureMap& m = ho.maps;
  if (payload.size() != m.size() * sizeof(float)) {
    throw ParseError("head payload has " + std::to_string(payload.size()) + " bytes, expected " +
                         std::to_string(m.size() * sizeof(float)),
                     0);
  }
  for (int ch = 0; ch < m.c(); ++ch) {
    for (int r = 0; r < m.h(); ++r) {
      for (int c = 0; c < m.w(); ++c) {
        std::uint32_t bits = 0;
        std::memcpy(&bits, payload.data() + 4 * chw_index(m, ch, r, c), 4);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
        m.at(r, c, ch) = std::bit_cast<float>(bits);
      }
    }
  }
  return ho;
}

std::string head_to_json(const HeadOutputs& ho) {
  json doc = header(ho);
  doc["dtype"] = "float64";
  const FeatureMap& m = ho.maps;
  std::vector<double> data(m.size());
  for (int ch = 0; ch < m.c(); ++ch) {
    for (int r = 0; r < m.h(); ++r) {
      for (int c = 0; c < m.w(); ++c) data[chw_index(m, ch, r, c)] = m.at(r, c, ch);
    }
  }
  doc["data"] = std::move(data);
  return doc.dump() + "\n";
}

HeadOutputs head_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("head json: ") + e.what(), 0);
  }
  HeadOutputs ho = from_header(doc);
  FeatureMap& m = ho.maps;
  std::vector<double> data;
  try {
    data = doc.at("data").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("head json: ") + e.what(), 0);
  }
  if (data.size() != m.size()) {
    throw ParseError("head json: data has " + std::to_string(data.size()) + " values, expected " +
                         std::to_string(m.size()),
                     0);
  }
  for (int ch = 0; ch < m.c(); ++ch) {
    for (int r = 0; r < m.h(); ++r) {
      for (int c = 0; c < m.w(); ++c) m.at(r, c, ch) = data[chw_index(m, ch, r, c)];
    }
  }
  return ho;
}

}  // namespace monoflex
