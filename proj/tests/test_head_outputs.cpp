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
#include <random>

#include <json.hpp>

#include "monoflex/errors.hpp"
#include "monoflex/head_outputs.hpp"

using namespace monoflex;

namespace {

HeadOutputs random_heads(std::uint64_t seed) {
  HeadOutputs ho({"Car", "Pedestrian", "Cyclist"}, 5, 7, 4);
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> nd(0.0F, 3.0F);
  for (double& x : ho.maps.data()) x = static_cast<double>(nd(rng));
  return ho;
}

}  // namespace

TEST(HeadLayout, ChannelCount) {
  for (int c = 1; c <= 5; ++c) {
    const HeadLayout L{c, 4};
    EXPECT_EQ(L.total(), c + 46);
    EXPECT_EQ(L.channel_names(std::vector<std::string>(c, "x")).size(), static_cast<std::size_t>(c + 46));
  }
  const HeadLayout L{3, 4};
  EXPECT_EQ(L.offset(), 3);
  EXPECT_EQ(L.keypoints(), 24);
  EXPECT_EQ(L.depth(), 44);
  EXPECT_EQ(L.kp_logsigma(), 46);
}

TEST(HeadOutputs, ShapeAndClassIndex) {
  const HeadOutputs ho({"Car", "Cyclist"}, 3, 4, 8);
  EXPECT_EQ(ho.rows(), 3);
  EXPECT_EQ(ho.cols(), 4);
  EXPECT_EQ(ho.maps.c(), 48);
  EXPECT_EQ(ho.class_index("Cyclist"), 1);
  EXPECT_EQ(ho.class_index("Van"), -1);
}

TEST(HeadOutputs, BinaryRoundTrip) {
  const HeadOutputs ho = random_heads(1);
  const std::string payload = head_to_binary(ho);
  EXPECT_EQ(payload.size(), 4u * 49 * 5 * 7);
  const HeadOutputs back = head_from_binary(head_header_json(ho), payload);
  EXPECT_EQ(back.class_names, ho.class_names);
  EXPECT_EQ(back.stride, 4);
  EXPECT_EQ(back.maps, ho.maps);
}

TEST(HeadOutputs, BinaryIsChannelMajorLittleEndian) {
  HeadOutputs ho({"Car"}, 2, 3, 4);
  ho.maps.at(1, 2, 5) = 1.0;
  const std::string payload = head_to_binary(ho);
  const std::size_t offset = 4 * ((5 * 2 + 1) * 3 + 2);
  const unsigned char expected[4] = {0x00, 0x00, 0x80, 0x3f};
  for (int i = 0; i < 4; ++i) EXPECT_EQ(static_cast<unsigned char>(payload[offset + i]), expected[i]);
}

TEST(HeadOutputs, HeaderFields) {
  const auto h = nlohmann::json::parse(head_header_json(random_heads(2)));
  EXPECT_EQ(h["format"], "monoflex-head-outputs");
  EXPECT_EQ(h["layout"], "CHW");
  EXPECT_EQ(h["channels"], 49);
  EXPECT_EQ(h["Hf"], 5);
  EXPECT_EQ(h["Wf"], 7);
  EXPECT_EQ(h["channel_names"].size(), 49u);
}

TEST(HeadOutputs, JsonRoundTrip) {
  const HeadOutputs ho = random_heads(3);
  const HeadOutputs back = head_from_json(head_to_json(ho));
  EXPECT_EQ(back.maps, ho.maps);
  EXPECT_EQ(back.class_names, ho.class_names);
}

TEST(HeadOutputs, MalformedInputs) {
  const HeadOutputs ho = random_heads(4);
  const std::string header = head_header_json(ho);
  const std::string payload = head_to_binary(ho);
  EXPECT_THROW(head_from_binary("{not json", payload), ParseError);
  EXPECT_THROW(head_from_binary(header, payload.substr(4)), ParseError);

  auto h = nlohmann::json::parse(header);
  h["format"] = "other";
  EXPECT_THROW(head_from_binary(h.dump(), payload), ParseError);
  h = nlohmann::json::parse(header);
  h["channels"] = 48;
  EXPECT_THROW(head_from_binary(h.dump(), payload), ParseError);
  h = nlohmann::json::parse(header);
  h.erase("Hf");
  EXPECT_THROW(head_from_binary(h.dump(), payload), ParseError);

  auto j = nlohmann::json::parse(head_to_json(ho));
  j["data"].erase(0);
  EXPECT_THROW(head_from_json(j.dump()), ParseError);
}
