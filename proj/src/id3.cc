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

#include "pedintent/id3.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pedintent/error.h"

namespace pedintent::id3 {

using features::Attribute;
using features::MovementClass;
using json = nlohmann::json;

namespace {

using ClassCounts = std::array<std::size_t, features::kNumClasses>;

ClassCounts CountClasses(std::span<const Sample> samples) {
  ClassCounts counts{};
  for (const auto& s : samples) ++counts[static_cast<int>(s.label)];
  return counts;
}

double EntropyOfCounts(const ClassCounts& counts, std::size_t total) {
  double h = 0.0;
  const double n = static_cast<double>(total);
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

void RequireNonEmpty(std::span<const Sample> samples) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyDataset, "dataset has no samples");
}

// Lowest class index wins ties.
Leaf MajorityLeaf(std::span<const Sample> samples) {
  const ClassCounts counts = CountClasses(samples);
  const auto best = std::max_element(counts.begin(), counts.end());
  Leaf leaf;
  leaf.label = static_cast<MovementClass>(best - counts.begin());
  leaf.support = samples.size();
  leaf.purity = static_cast<double>(*best) / static_cast<double>(samples.size());
  return leaf;
}

bool AttributeVaries(std::span<const Sample> samples, Attribute a) {
  const int first = samples.front().features.Value(a);
  return std::any_of(samples.begin(), samples.end(),
                     [&](const Sample& s) { return s.features.Value(a) != first; });
}

TreeNode BuildRecursive(std::vector<Sample> samples, std::vector<Attribute> attributes,
                        int depth_remaining) {
  const Leaf majority = MajorityLeaf(samples);
  std::erase_if(attributes, [&](Attribute a) { return !AttributeVaries(samples, a); });
  if (majority.purity == 1.0 || attributes.empty() || depth_remaining <= 0) {
    return TreeNode{majority};
  }

  Attribute best = attributes.front();
  double best_gain = -1.0;
  for (Attribute a : attributes) {
    const double g = InformationGain(samples, a);
    if (g > best_gain) {
      best_gain = g;
      best = a;
    }
  }

  std::array<std::vector<Sample>, features::kBinsPerAttribute> partitions;
  for (const auto& s : samples) partitions[s.features.Value(best)].push_back(s);
  std::erase(attributes, best);

  Split split;
  split.attribute = best;
  split.support = samples.size();
  split.fallback = majority;
  for (int v = 0; v < features::kBinsPerAttribute; ++v) {
    if (partitions[v].empty()) continue;
    split.children[v] = std::make_unique<TreeNode>(
        BuildRecursive(std::move(partitions[v]), attributes, depth_remaining - 1));
  }
  return TreeNode{std::move(split)};
}

json NodeToJson(const Leaf& leaf) {
  return json{{"type", "leaf"},
              {"label", features::ClassName(leaf.label)},
              {"support", leaf.support},
              {"purity", leaf.purity}};
}

json NodeToJson(const TreeNode& node) {
  if (node.is_leaf()) return NodeToJson(node.leaf());
  const Split& split = node.split();
  json children = json::object();
  for (int v = 0; v < features::kBinsPerAttribute; ++v) {
    if (split.children[v]) {
      children[std::string(features::BinName(split.attribute, v))] = NodeToJson(*split.children[v]);
    }
  }
  children["default"] = NodeToJson(split.fallback);
  return json{{"type", "split"},
              {"attribute", features::AttributeName(split.attribute)},
              {"support", split.support},
              {"children", std::move(children)}};
}

[[noreturn]] void Malformed(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kMalformedTreeFile, "at " + where + ": " + what);
}

const json& Field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) Malformed(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) Malformed(where, std::string("missing field '") + key + "'");
  return *it;
}

Leaf LeafFromJson(const json& j, const std::string& where) {
  if (Field(j, "type", where) != "leaf") Malformed(where, "expected a leaf node");
  Leaf leaf;
  const json& label = Field(j, "label", where);
  const auto cls = label.is_string() ? features::ClassFromName(label.get<std::string>())
                                     : std::nullopt;
  if (!cls) Malformed(where + "/label", "unknown movement class");
  leaf.label = *cls;
  const json& support = Field(j, "support", where);
  if (!support.is_number_unsigned()) Malformed(where + "/support", "expected a count");
  leaf.support = support.get<std::size_t>();
  const json& purity = Field(j, "purity", where);
  if (!purity.is_number() || purity.get<double>() < 0.0 || purity.get<double>() > 1.0) {
    Malformed(where + "/purity", "expected a fraction in [0, 1]");
  }
  leaf.purity = purity.get<double>();
  return leaf;
}

TreeNode NodeFromJson(const json& j, const std::string& where, int depth) {
  if (depth > 3) Malformed(where, "tree deeper than the three available attributes");
  const json& type = Field(j, "type", where);
  if (type == "leaf") return TreeNode{LeafFromJson(j, where)};
  if (type != "split") Malformed(where + "/type", "expected 'leaf' or 'split'");

  Split split;
  const json& attr = Field(j, "attribute", where);
  const auto attribute = attr.is_string() ? features::AttributeFromName(attr.get<std::string>())
                                          : std::nullopt;
  if (!attribute) Malformed(where + "/attribute", "unknown attribute");
  split.attribute = *attribute;
  const json& support = Field(j, "support", where);
  if (!support.is_number_unsigned()) Malformed(where + "/support", "expected a count");
  split.support = support.get<std::size_t>();
  const json& children = Field(j, "children", where);
  if (!children.is_object()) Malformed(where + "/children", "expected an object");
  const std::string children_where = where + "/children";
  split.fallback = LeafFromJson(Field(children, "default", children_where),
                                children_where + "/default");
  for (const auto& [key, child] : children.items()) {
    if (key == "default") continue;
    const auto bin = features::BinFromName(split.attribute, key);
    if (!bin) Malformed(children_where, "unknown bin '" + key + "'");
    split.children[*bin] = std::make_unique<TreeNode>(
        NodeFromJson(child, children_where + "/" + key, depth + 1));
  }
  return TreeNode{std::move(split)};
}

}  // namespace

double Entropy(std::span<const Sample> samples) {
  RequireNonEmpty(samples);
  return EntropyOfCounts(CountClasses(samples), samples.size());
}

double ConditionalEntropy(std::span<const Sample> samples, Attribute attribute) {
  RequireNonEmpty(samples);
  std::array<ClassCounts, features::kBinsPerAttribute> counts{};
  std::array<std::size_t, features::kBinsPerAttribute> sizes{};
  for (const auto& s : samples) {
    const int v = s.features.Value(attribute);
    ++counts[v][static_cast<int>(s.label)];
    ++sizes[v];
  }
  double h = 0.0;
  const double n = static_cast<double>(samples.size());
  for (int v = 0; v < features::kBinsPerAttribute; ++v) {
    if (sizes[v] == 0) continue;
    h += static_cast<double>(sizes[v]) / n * EntropyOfCounts(counts[v], sizes[v]);
  }
  return h;
}

double InformationGain(std::span<const Sample> samples, Attribute attribute) {
  return Entropy(samples) - ConditionalEntropy(samples, attribute);
}

std::array<Attribute, 3> GainReport::Ranking() const {
  std::array<Attribute, 3> order = features::kAllAttributes;
  std::stable_sort(order.begin(), order.end(),
                   [this](Attribute a, Attribute b) { return Of(a) > Of(b); });
  return order;
}

GainReport ComputeGains(std::span<const Sample> samples) {
  GainReport report;
  for (Attribute a : features::kAllAttributes) {
    report.gain[static_cast<int>(a)] = InformationGain(samples, a);
  }
  return report;
}

bool operator==(const TreeNode& a, const TreeNode& b) {
  if (a.is_leaf() != b.is_leaf()) return false;
  if (a.is_leaf()) return a.leaf() == b.leaf();
  const Split& sa = a.split();
  const Split& sb = b.split();
  if (sa.attribute != sb.attribute || sa.support != sb.support || !(sa.fallback == sb.fallback)) {
    return false;
  }
  for (int v = 0; v < features::kBinsPerAttribute; ++v) {
    if (static_cast<bool>(sa.children[v]) != static_cast<bool>(sb.children[v])) return false;
    if (sa.children[v] && !(*sa.children[v] == *sb.children[v])) return false;
  }
  return true;
}

TreeNode BuildTree(std::span<const Sample> samples, const BuildOptions& options) {
  RequireNonEmpty(samples);
  return BuildRecursive(std::vector<Sample>(samples.begin(), samples.end()), options.attributes,
                        options.depth_limit);
}

MovementClass Classify(const TreeNode& tree, const features::DiscreteFeatures& f,
                       int* dispatches) {
  const TreeNode* node = &tree;
  while (!node->is_leaf()) {
    const Split& split = node->split();
    if (dispatches != nullptr) ++*dispatches;
    const auto& child = split.children[f.Value(split.attribute)];
    if (!child) return split.fallback.label;
    node = child.get();
  }
  return node->leaf().label;
}

int Depth(const TreeNode& tree) {
  if (tree.is_leaf()) return 0;
  int deepest = 0;
  for (const auto& child : tree.split().children) {
    if (child) deepest = std::max(deepest, Depth(*child));
  }
  return deepest + 1;
}

std::size_t LeafCount(const TreeNode& tree) {
  if (tree.is_leaf()) return 1;
  std::size_t n = 1;  // fallback
  for (const auto& child : tree.split().children) {
    if (child) n += LeafCount(*child);
  }
  return n;
}

std::string SerializeTree(const TreeNode& tree) {
  const json doc{{"format_version", kTreeFormatVersion}, {"root", NodeToJson(tree)}};
  return doc.dump(2) + "\n";
}

TreeNode DeserializeTree(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedTreeFile,
                "syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  const json& version = Field(doc, "format_version", "");
  if (!version.is_number_integer() || version.get<int>() != kTreeFormatVersion) {
    Malformed("/format_version", "unsupported format version");
  }
  return NodeFromJson(Field(doc, "root", ""), "/root", 0);
}

TreeNode LoadTreeFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMalformedTreeFile, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return DeserializeTree(buffer.str());
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedTreeFile, path + ": " + e.detail());
  }
}

void SaveTreeFile(const TreeNode& tree, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidConfig, "cannot write " + path);
  out << SerializeTree(tree);
}

}  // namespace pedintent::id3
