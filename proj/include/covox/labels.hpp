// Copyright 2026 The covox Authors
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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace covox {

inline constexpr int kLabelCount = 24;

/// Semantic category of a voxel. Codes 17..23 are reserved and carry
/// placeholder names until a registry renames them.
enum class Label : std::uint8_t {
  Empty = 0,
  Buildings = 1,
  Fences = 2,
  Other = 3,
  Poles = 4,
  RoadLines = 5,
  Roads = 6,
  Sidewalks = 7,
  Vegetation = 8,
  Vehicles = 9,
  Walls = 10,
  TrafficSigns = 11,
  Ground = 12,
  Bridge = 13,
  GuardRail = 14,
  TrafficLight = 15,
  Terrain = 16,
};

constexpr std::uint8_t code(Label l) { return static_cast<std::uint8_t>(l); }
constexpr bool is_valid_code(unsigned c) { return c < kLabelCount; }

/// Name <-> code table. Defaults: "empty", the 16 evaluated classes, then
/// "reserved_17" .. "reserved_23".
class LabelRegistry {
 public:
  LabelRegistry();

  static const LabelRegistry& defaults();

  std::string_view name(Label l) const { return names_[code(l)]; }
  /// Exact, case-sensitive lookup; also accepts a decimal code ("9").
  std::optional<Label> find(std::string_view name) const;
  /// Renames a reserved code (17..23). Throws ConfigError otherwise, or when
  /// the name is already taken.
  void rename(Label l, std::string name);

 private:
  std::array<std::string, kLabelCount> names_;
};

/// The 16 classes tabulated in the benchmark (codes 1..16); `empty` excluded.
std::vector<Label> default_eval_classes();

}  // namespace covox
