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

// File formats: JSON-lines landmark streams, the pipeline config file and
// per-frame result output (CSV or JSON lines).

#ifndef PEDINTENT_IO_H_
#define PEDINTENT_IO_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pedintent/pipeline.h"

namespace pedintent::io {

// Throws Error{kMalformedInput}.
pipeline::LandmarkFrame ParseLandmarkLine(std::string_view line);
std::string FormatLandmarkLine(const pipeline::LandmarkFrame& frame);

// Blank lines are skipped; malformed lines become items with an error.
pipeline::FrameSource JsonlSource(std::istream& in);

// Throws Error{kMalformedInput} naming file and line.
std::vector<pipeline::LandmarkFrame> ReadLandmarkFile(const std::string& path);
void WriteLandmarkFile(const std::string& path, const std::vector<pipeline::LandmarkFrame>& frames);

struct ValidationReport {
  std::size_t lines = 0;
  std::size_t frames_with_pose = 0;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
};

// Schema check used for externally produced streams: every line parses,
// poses carry both shoulders with three finite coordinates, confidences lie
// in [0, 1] and timestamps strictly increase.
ValidationReport ValidateStream(std::istream& in);

// Unknown keys are rejected. Throws Error{kInvalidConfig}.
pipeline::PipelineConfig ConfigFromJson(const nlohmann::json& j);
nlohmann::json ConfigToJson(const pipeline::PipelineConfig& config);
pipeline::PipelineConfig LoadConfig(const std::string& path);

enum class Variant { kCollision = 1, kPath = 2, kDirection = 3 };
enum class OutputFormat { kCsv, kJsonl };

struct OutputOptions {
  Variant variant = Variant::kCollision;
  OutputFormat format = OutputFormat::kCsv;
  bool include_latency = true;
};

std::vector<std::string> ResultColumns(const OutputOptions& options);

class ResultWriter {
 public:
  ResultWriter(std::ostream& out, OutputOptions options);

  // CSV header; no-op for JSON lines.
  void WriteHeader();
  void Write(const pipeline::FrameResult& result);

 private:
  std::ostream& out_;
  OutputOptions options_;
  std::vector<std::string> columns_;
};

}  // namespace pedintent::io

#endif  // PEDINTENT_IO_H_
