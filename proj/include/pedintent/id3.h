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

// ID3 decision tree over discretized (vx, vy, phi) features.

#ifndef PEDINTENT_ID3_H_
#define PEDINTENT_ID3_H_

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pedintent/features.h"

namespace pedintent::id3 {

struct Sample {
  features::DiscreteFeatures features;
  features::MovementClass label = features::MovementClass::kStationary;
};

using Dataset = std::vector<Sample>;

// All quantities are in bits. Each throws Error{kEmptyDataset} on empty input.
double Entropy(std::span<const Sample> samples);
double ConditionalEntropy(std::span<const Sample> samples, features::Attribute attribute);
double InformationGain(std::span<const Sample> samples, features::Attribute attribute);

struct GainReport {
  // Indexed by Attribute.
  std::array<double, 3> gain{};

  double Of(features::Attribute a) const { return gain[static_cast<int>(a)]; }
  // Attributes by decreasing gain; equal gains keep vx, vy, phi order.
  std::array<features::Attribute, 3> Ranking() const;
};

GainReport ComputeGains(std::span<const Sample> samples);

struct Leaf {
  features::MovementClass label = features::MovementClass::kStationary;
  std::size_t support = 0;
  double purity = 1.0;
  friend bool operator==(const Leaf&, const Leaf&) = default;
};

struct TreeNode;

struct Split {
  features::Attribute attribute = features::Attribute::kVx;
  std::size_t support = 0;
  // Indexed by bin value; null where the training set had no samples.
  std::array<std::unique_ptr<TreeNode>, 3> children;
  // Majority of the split set, used for bin values without a child.
  Leaf fallback;
};

struct TreeNode {
  std::variant<Leaf, Split> node;

  bool is_leaf() const { return std::holds_alternative<Leaf>(node); }
  const Leaf& leaf() const { return std::get<Leaf>(node); }
  const Split& split() const { return std::get<Split>(node); }
};

bool operator==(const TreeNode& a, const TreeNode& b);

struct BuildOptions {
  int depth_limit = 3;
  std::vector<features::Attribute> attributes{features::kAllAttributes.begin(),
                                              features::kAllAttributes.end()};
};

// Splits on the maximum-gain attribute until a node is pure, has no
// attribute left that varies, or reaches the depth limit. Throws
// Error{kEmptyDataset}.
TreeNode BuildTree(std::span<const Sample> samples, const BuildOptions& options = {});

// `dispatches`, when given, is incremented once per internal node visited.
features::MovementClass Classify(const TreeNode& tree, const features::DiscreteFeatures& f,
                                 int* dispatches = nullptr);

int Depth(const TreeNode& tree);
std::size_t LeafCount(const TreeNode& tree);

inline constexpr int kTreeFormatVersion = 1;

std::string SerializeTree(const TreeNode& tree);
// Throws Error{kMalformedTreeFile}; the message names the byte offset for
// syntax errors or the JSON pointer of the offending node.
TreeNode DeserializeTree(std::string_view text);

TreeNode LoadTreeFile(const std::string& path);
void SaveTreeFile(const TreeNode& tree, const std::string& path);

}  // namespace pedintent::id3

#endif  // PEDINTENT_ID3_H_
