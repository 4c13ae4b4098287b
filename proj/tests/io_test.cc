/*
 * Copyright 2026 The pedintent Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pedintent/io.h"

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>

#include "doctest.h"
#include "pedintent/error.h"

using namespace pedintent;
using namespace pedintent::io;
using nlohmann::json;
using pipeline::FrameResult;
using pipeline::LandmarkFrame;

namespace {

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidConfig;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

FrameResult FullResult() {
  FrameResult r;
  r.t = 1.5;
  r.theta_rad = 0.9;
  r.phi_deg = 77.0;
  r.mid = {{200.0, 310.0}};
  r.v_mid = {{12.0, -3.0}};
  r.v_left = {{11.0, -2.0}};
  r.v_right = {{13.0, -4.0}};
  r.discrete = features::DiscreteFeatures{features::SpeedBin::kPos, features::SpeedBin::kZero,
                                          features::PhiBin::kFront};
  r.movement_class = features::MovementClass::kPerpRight;
  r.predicted_future = {{212.0, 307.0}};
  r.future_cell = {{1, 2}};
  r.collision_imminent = true;
  r.path = pipeline::PathProjection{{{200.0, 310.0}, {212.0, 307.0}}, 1.0};
  r.latency_us = 4.25;
  return r;
}

}  // namespace

TEST_CASE("landmark lines parse") {
  const LandmarkFrame f = ParseLandmarkLine(
      R"({"t":0.5,"landmarks":{"left_shoulder":[0.6,0.4,0.1],"right_shoulder":[0.4,0.4,-0.1]},)"
      R"("confidence":{"left_shoulder":0.9,"right_shoulder":0.8}})");
  CHECK(f.t == 0.5);
  REQUIRE(f.landmarks.has_value());
  CHECK(f.landmarks->at("left_shoulder").x == 0.6);
  CHECK(f.landmarks->at("right_shoulder").z == -0.1);
  CHECK(f.confidence.at("right_shoulder") == 0.8);

  const LandmarkFrame none = ParseLandmarkLine(R"({"t":1.0,"landmarks":null})");
  CHECK_FALSE(none.landmarks.has_value());
  CHECK_FALSE(ParseLandmarkLine(R"({"t":1.0})").landmarks.has_value());
}

TEST_CASE("landmark lines round trip") {
  LandmarkFrame f;
  f.t = 0.0666666666666667;
  f.landmarks.emplace();
  (*f.landmarks)["left_shoulder"] = {0.123456789012345, 0.5, -0.25};
  (*f.landmarks)["right_shoulder"] = {0.1, 0.5, 0.25};
  f.confidence["left_shoulder"] = 0.99;
  const LandmarkFrame back = ParseLandmarkLine(FormatLandmarkLine(f));
  CHECK(back.t == f.t);
  CHECK(back.landmarks->at("left_shoulder").x == f.landmarks->at("left_shoulder").x);
  CHECK(back.confidence == f.confidence);
}

TEST_CASE("malformed landmark lines") {
  const auto code = [](std::string_view s) { return CodeOf([&] { ParseLandmarkLine(s); }); };
  CHECK(code("{") == ErrorCode::kMalformedInput);
  CHECK(code("[1,2]") == ErrorCode::kMalformedInput);
  CHECK(code(R"({"landmarks":null})") == ErrorCode::kMalformedInput);
  CHECK(code(R"({"t":"x"})") == ErrorCode::kMalformedInput);
  CHECK(code(R"({"t":0,"landmarks":{"left_shoulder":[1,2]}})") == ErrorCode::kMalformedInput);
  CHECK(code(R"({"t":0,"landmarks":[]})") == ErrorCode::kMalformedInput);
  CHECK(code(R"({"t":0,"confidence":{"left_shoulder":1.5}})") == ErrorCode::kMalformedInput);
}

TEST_CASE("jsonl source reports bad lines and skips blanks") {
  std::istringstream in("{\"t\":0}\n\nnot json\n{\"t\":1}\n");
  const auto source = JsonlSource(in);
  auto a = source();
  REQUIRE(a.has_value());
  CHECK(a->frame.has_value());
  auto b = source();
  REQUIRE(b.has_value());
  CHECK_FALSE(b->frame.has_value());
  CHECK_FALSE(b->error.empty());
  auto c = source();
  REQUIRE(c.has_value());
  CHECK(c->frame->t == 1.0);
  CHECK_FALSE(source().has_value());
}

TEST_CASE("stream validator") {
  std::istringstream good(
      "{\"t\":0,\"landmarks\":{\"left_shoulder\":[0,0,0],\"right_shoulder\":[1,0,0]}}\n"
      "{\"t\":0.1,\"landmarks\":null}\n");
  const ValidationReport ok = ValidateStream(good);
  CHECK(ok.ok());
  CHECK(ok.lines == 2);
  CHECK(ok.frames_with_pose == 1);

  std::istringstream bad(
      "{\"t\":0.2}\n"
      "{\"t\":0.1}\n"
      "oops\n"
      "{\"t\":0.3,\"landmarks\":{\"left_shoulder\":[0,0,0]}}\n");
  const ValidationReport r = ValidateStream(bad);
  CHECK_FALSE(r.ok());
  REQUIRE(r.errors.size() == 3);
  CHECK(r.errors[0].rfind("line 2", 0) == 0);
  CHECK(r.errors[1].rfind("line 3", 0) == 0);
  CHECK(r.errors[2].find("right_shoulder") != std::string::npos);
}

TEST_CASE("landmark files") {
  const auto path = std::filesystem::temp_directory_path() / "pedintent_io_test.jsonl";
  std::vector<LandmarkFrame> frames(3);
  for (int i = 0; i < 3; ++i) frames[i].t = i * 0.1;
  WriteLandmarkFile(path.string(), frames);
  const auto back = ReadLandmarkFile(path.string());
  REQUIRE(back.size() == 3);
  CHECK(back[2].t == frames[2].t);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(ReadLandmarkFile(path.string()), Error);
}

TEST_CASE("config json round trip and strictness") {
  pipeline::PipelineConfig c;
  c.horizon_s = 2.0;
  c.zone = {10, 20, 30, 40};
  c.grid = {6, 3};
  c.tree_path = "t.json";
  const pipeline::PipelineConfig back = ConfigFromJson(ConfigToJson(c));
  CHECK(ConfigToJson(back) == ConfigToJson(c));
  CHECK(back.grid.cols == 6);
  CHECK(back.zone.y1 == 40);

  CHECK(ConfigFromJson(json::object()).velocity_window == 2);
  CHECK(CodeOf([] { ConfigFromJson(json{{"horizon", 1.0}}); }) == ErrorCode::kInvalidConfig);
  CHECK(CodeOf([] { ConfigFromJson(json{{"horizon_s", "soon"}}); }) == ErrorCode::kInvalidConfig);
  CHECK(CodeOf([] { ConfigFromJson(json{{"horizon_s", -1.0}}); }) == ErrorCode::kInvalidConfig);
  CHECK(CodeOf([] { ConfigFromJson(json::array()); }) == ErrorCode::kInvalidConfig);
  CHECK(CodeOf([] { LoadConfig("/nonexistent/config.json"); }) == ErrorCode::kInvalidConfig);
}

TEST_CASE("output columns per variant") {
  const auto cols = [](Variant v, bool latency) {
    return ResultColumns({v, OutputFormat::kCsv, latency});
  };
  CHECK(cols(Variant::kDirection, false).size() == 17);
  CHECK(cols(Variant::kDirection, true).back() == "latency_us");
  const auto c1 = cols(Variant::kCollision, false);
  CHECK(c1.size() == 22);
  CHECK(c1.back() == "collision_imminent");
  const auto c2 = cols(Variant::kPath, false);
  CHECK(c2.back() == "path");
  CHECK(c2.front() == "t");
}

TEST_CASE("csv rows") {
  std::ostringstream out;
  ResultWriter w(out, {Variant::kCollision, OutputFormat::kCsv, true});
  w.WriteHeader();
  w.Write(FullResult());
  FrameResult skipped;
  skipped.t = std::numeric_limits<double>::quiet_NaN();
  skipped.skipped = pipeline::SkipReason::kMalformedFrame;
  w.Write(skipped);

  std::istringstream in(out.str());
  std::string header, row, row2;
  std::getline(in, header);
  std::getline(in, row);
  std::getline(in, row2);
  const auto h = SplitCsv(header);
  const auto cells = SplitCsv(row);
  REQUIRE(cells.size() == h.size());
  const auto at = [&](std::string_view name) {
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (h[i] == name) return cells[i];
    }
    return std::string("?");
  };
  CHECK(at("t") == "1.500000");
  CHECK(at("status") == "ok");
  CHECK(at("vx_bin") == "pos");
  CHECK(at("phi_bin") == "front");
  CHECK(at("movement_class") == "PerpRight");
  CHECK(at("future_col") == "1");
  CHECK(at("collision_imminent") == "1");
  CHECK(at("latency_us") == "4.250");
  const auto skip_cells = SplitCsv(row2);
  CHECK(skip_cells.size() == h.size());
  CHECK(skip_cells[0].empty());
  CHECK(skip_cells[1] == "MalformedFrame");
}

TEST_CASE("jsonl rows keep column order") {
  std::ostringstream out;
  ResultWriter w(out, {Variant::kPath, OutputFormat::kJsonl, false});
  w.WriteHeader();
  w.Write(FullResult());
  const std::string line = out.str();
  const json j = json::parse(line);
  CHECK(j["movement_class"] == "PerpRight");
  CHECK(j["path"].size() == 2);
  CHECK(j["path"][1][0] == 212.0);
  CHECK_FALSE(j.contains("latency_us"));
  CHECK_FALSE(j.contains("collision_imminent"));
  CHECK(line.find("\"t\"") < line.find("\"status\""));
  CHECK(line.find("\"future_y\"") < line.find("\"path\""));
}

TEST_CASE("path cell in csv") {
  std::ostringstream out;
  ResultWriter w(out, {Variant::kPath, OutputFormat::kCsv, false});
  w.Write(FullResult());
  CHECK(out.str().find("200.000:310.000;212.000:307.000") != std::string::npos);
}
