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

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include "pedintent/error.h"

namespace pedintent::io {

using json = nlohmann::json;
using pipeline::FrameResult;
using pipeline::LandmarkFrame;

namespace {

[[noreturn]] void BadLine(const std::string& what) {
  throw Error(ErrorCode::kMalformedInput, what);
}

double FiniteNumber(const json& j, const std::string& what) {
  if (!j.is_number()) BadLine(what + " is not a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) BadLine(what + " is not finite");
  return v;
}

bool IsBlank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace

LandmarkFrame ParseLandmarkLine(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    BadLine("invalid JSON at byte " + std::to_string(e.byte));
  }
  if (!doc.is_object()) BadLine("frame is not a JSON object");
  LandmarkFrame frame;
  const auto t = doc.find("t");
  if (t == doc.end()) BadLine("missing \"t\"");
  frame.t = FiniteNumber(*t, "\"t\"");

  if (const auto lm = doc.find("landmarks"); lm != doc.end() && !lm->is_null()) {
    if (!lm->is_object()) BadLine("\"landmarks\" is not an object");
    auto& landmarks = frame.landmarks.emplace();
    for (const auto& [name, xyz] : lm->items()) {
      if (!xyz.is_array() || xyz.size() != 3) BadLine("landmark \"" + name + "\" needs [x, y, z]");
      landmarks[name] = {FiniteNumber(xyz[0], name + ".x"), FiniteNumber(xyz[1], name + ".y"),
                         FiniteNumber(xyz[2], name + ".z")};
    }
  }
  if (const auto conf = doc.find("confidence"); conf != doc.end() && !conf->is_null()) {
    if (!conf->is_object()) BadLine("\"confidence\" is not an object");
    for (const auto& [name, c] : conf->items()) {
      const double v = FiniteNumber(c, "confidence of \"" + name + "\"");
      if (v < 0.0 || v > 1.0) BadLine("confidence of \"" + name + "\" outside [0, 1]");
      frame.confidence[name] = v;
    }
  }
  return frame;
}

std::string FormatLandmarkLine(const LandmarkFrame& frame) {
  json doc;
  doc["t"] = frame.t;
  if (frame.landmarks) {
    json lm = json::object();
    for (const auto& [name, v] : *frame.landmarks) lm[name] = {v.x, v.y, v.z};
    doc["landmarks"] = std::move(lm);
  }
  if (!frame.confidence.empty()) {
    json conf = json::object();
    for (const auto& [name, c] : frame.confidence) conf[name] = c;
    doc["confidence"] = std::move(conf);
  }
  return doc.dump();
}

pipeline::FrameSource JsonlSource(std::istream& in) {
  return [&in]() -> std::optional<pipeline::StreamItem> {
    std::string line;
    while (std::getline(in, line)) {
      if (IsBlank(line)) continue;
      try {
        return pipeline::StreamItem{ParseLandmarkLine(line), {}};
      } catch (const Error& e) {
        return pipeline::StreamItem{std::nullopt, e.detail()};
      }
    }
    return std::nullopt;
  };
}

std::vector<LandmarkFrame> ReadLandmarkFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMalformedInput, "cannot open " + path);
  std::vector<LandmarkFrame> frames;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsBlank(line)) continue;
    try {
      frames.push_back(ParseLandmarkLine(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformedInput,
                  path + ":" + std::to_string(line_no) + ": " + e.detail());
    }
  }
  return frames;
}

void WriteLandmarkFile(const std::string& path, const std::vector<LandmarkFrame>& frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidConfig, "cannot write " + path);
  for (const auto& f : frames) out << FormatLandmarkLine(f) << '\n';
}

ValidationReport ValidateStream(std::istream& in) {
  ValidationReport report;
  std::string line;
  std::size_t line_no = 0;
  std::optional<double> last_t;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsBlank(line)) continue;
    ++report.lines;
    const auto fail = [&](const std::string& what) {
      report.errors.push_back("line " + std::to_string(line_no) + ": " + what);
    };
    LandmarkFrame frame;
    try {
      frame = ParseLandmarkLine(line);
    } catch (const Error& e) {
      fail(e.detail());
      continue;
    }
    if (last_t && !(frame.t > *last_t)) fail("timestamp does not increase");
    last_t = frame.t;
    if (!frame.landmarks) continue;
    ++report.frames_with_pose;
    for (std::string_view name : {pipeline::kLeftShoulder, pipeline::kRightShoulder}) {
      if (!frame.landmarks->contains(name)) fail("pose lacks \"" + std::string(name) + "\"");
    }
  }
  return report;
}

namespace {

template <typename T>
void Read(const json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kInvalidConfig, std::string("config key '") + key + "' has wrong type");
  }
}

const std::set<std::string, std::less<>> kConfigKeys = {
    "frame_width_px", "frame_height_px", "cone_width_m",    "horizon_s",      "step_s",
    "speed_deadzone", "phi_bin_edges",   "velocity_window", "min_confidence", "zone",
    "tree_path",      "grid",            "staleness_s",     "track_capacity"};

}  // namespace

pipeline::PipelineConfig ConfigFromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kConfigKeys.contains(key)) {
      throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + key + "'");
    }
  }
  pipeline::PipelineConfig c;
  Read(j, "frame_width_px", c.geometry.width_px);
  Read(j, "frame_height_px", c.geometry.height_px);
  Read(j, "cone_width_m", c.geometry.cone_width_m);
  Read(j, "horizon_s", c.horizon_s);
  Read(j, "step_s", c.step_s);
  Read(j, "speed_deadzone", c.discretization.speed_deadzone);
  Read(j, "phi_bin_edges", c.discretization.phi_bin_edges);
  Read(j, "velocity_window", c.velocity_window);
  Read(j, "min_confidence", c.min_confidence);
  Read(j, "tree_path", c.tree_path);
  Read(j, "staleness_s", c.staleness_s);
  Read(j, "track_capacity", c.track_capacity);
  if (const auto zone = j.find("zone"); zone != j.end()) {
    if (!zone->is_object()) throw Error(ErrorCode::kInvalidConfig, "'zone' must be an object");
    Read(*zone, "x0", c.zone.x0);
    Read(*zone, "y0", c.zone.y0);
    Read(*zone, "x1", c.zone.x1);
    Read(*zone, "y1", c.zone.y1);
  }
  if (const auto grid = j.find("grid"); grid != j.end()) {
    std::array<int, 2> cells{};
    Read(j, "grid", cells);
    c.grid = {cells[0], cells[1]};
  }
  c.Validate();
  return c;
}

json ConfigToJson(const pipeline::PipelineConfig& c) {
  return json{
      {"frame_width_px", c.geometry.width_px},
      {"frame_height_px", c.geometry.height_px},
      {"cone_width_m", c.geometry.cone_width_m},
      {"horizon_s", c.horizon_s},
      {"step_s", c.step_s},
      {"speed_deadzone", c.discretization.speed_deadzone},
      {"phi_bin_edges", c.discretization.phi_bin_edges},
      {"velocity_window", c.velocity_window},
      {"min_confidence", c.min_confidence},
      {"zone", {{"x0", c.zone.x0}, {"y0", c.zone.y0}, {"x1", c.zone.x1}, {"y1", c.zone.y1}}},
      {"tree_path", c.tree_path},
      {"grid", {c.grid.cols, c.grid.rows}},
      {"staleness_s", c.staleness_s},
      {"track_capacity", c.track_capacity},
  };
}

pipeline::PipelineConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidConfig,
                path + ": syntax error at byte " + std::to_string(e.byte));
  }
  return ConfigFromJson(j);
}

std::vector<std::string> ResultColumns(const OutputOptions& options) {
  std::vector<std::string> cols = {"t",   "status", "theta_rad", "phi_deg", "phi_clamped",
                                   "mid_x", "mid_y", "vx",       "vy",      "vlx",
                                   "vly", "vrx",    "vry",       "vx_bin",  "vy_bin",
                                   "phi_bin", "movement_class"};
  switch (options.variant) {
    case Variant::kCollision:
      cols.insert(cols.end(),
                  {"future_x", "future_y", "future_col", "future_row", "collision_imminent"});
      break;
    case Variant::kPath:
      cols.insert(cols.end(), {"future_x", "future_y", "path"});
      break;
    case Variant::kDirection:
      break;
  }
  if (options.include_latency) cols.emplace_back("latency_us");
  return cols;
}

ResultWriter::ResultWriter(std::ostream& out, OutputOptions options)
    : out_(out), options_(options), columns_(ResultColumns(options)) {}

void ResultWriter::WriteHeader() {
  if (options_.format != OutputFormat::kCsv) return;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    out_ << (i ? "," : "") << columns_[i];
  }
  out_ << '\n';
}

namespace {

// Every column as a JSON value; null where absent.
json ResultFields(const FrameResult& r) {
  const auto num = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json f;
  f["t"] = std::isfinite(r.t) ? json(r.t) : json(nullptr);
  f["status"] = r.skipped ? std::string(pipeline::SkipReasonName(*r.skipped)) : "ok";
  f["theta_rad"] = num(r.theta_rad);
  f["phi_deg"] = num(r.phi_deg);
  f["phi_clamped"] = r.phi_clamped;
  f["mid_x"] = r.mid ? json(r.mid->x) : json(nullptr);
  f["mid_y"] = r.mid ? json(r.mid->y) : json(nullptr);
  const auto vel = [&](const char* kx, const char* ky,
                       const std::optional<kinematics::Velocity2D>& v) {
    f[kx] = v ? json(v->vx) : json(nullptr);
    f[ky] = v ? json(v->vy) : json(nullptr);
  };
  vel("vx", "vy", r.v_mid);
  vel("vlx", "vly", r.v_left);
  vel("vrx", "vry", r.v_right);
  using features::Attribute;
  f["vx_bin"] = r.discrete ? json(features::BinName(Attribute::kVx, r.discrete->Value(Attribute::kVx)))
                           : json(nullptr);
  f["vy_bin"] = r.discrete ? json(features::BinName(Attribute::kVy, r.discrete->Value(Attribute::kVy)))
                           : json(nullptr);
  f["phi_bin"] = r.discrete
                     ? json(features::BinName(Attribute::kPhi, r.discrete->Value(Attribute::kPhi)))
                     : json(nullptr);
  f["movement_class"] =
      r.movement_class ? json(features::ClassName(*r.movement_class)) : json(nullptr);
  f["future_x"] = r.predicted_future ? json(r.predicted_future->x) : json(nullptr);
  f["future_y"] = r.predicted_future ? json(r.predicted_future->y) : json(nullptr);
  f["future_col"] = r.future_cell ? json(r.future_cell->col) : json(nullptr);
  f["future_row"] = r.future_cell ? json(r.future_cell->row) : json(nullptr);
  f["collision_imminent"] = r.collision_imminent;
  if (r.path) {
    json points = json::array();
    for (const auto& p : r.path->points) points.push_back({p.x, p.y});
    f["path"] = std::move(points);
  } else {
    f["path"] = nullptr;
  }
  f["latency_us"] = r.latency_us;
  return f;
}

std::string CsvCell(const std::string& column, const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    const double d = v.get<double>();
    return column == "latency_us" ? fmt::format("{:.3f}", d) : fmt::format("{:.6f}", d);
  }
  if (v.is_array()) {
    std::string out;
    for (const auto& p : v) {
      if (!out.empty()) out += ';';
      out += fmt::format("{:.3f}:{:.3f}", p[0].get<double>(), p[1].get<double>());
    }
    return out;
  }
  return v.get<std::string>();
}

}  // namespace

void ResultWriter::Write(const FrameResult& result) {
  const json fields = ResultFields(result);
  if (options_.format == OutputFormat::kJsonl) {
    // Keys in column order.
    out_ << '{';
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      out_ << (i ? "," : "") << json(columns_[i]).dump() << ':' << fields[columns_[i]].dump();
    }
    out_ << "}\n";
    return;
  }
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    out_ << (i ? "," : "") << CsvCell(columns_[i], fields[columns_[i]]);
  }
  out_ << '\n';
}

}  // namespace pedintent::io
