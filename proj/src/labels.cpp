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

#include "covox/labels.hpp"

#include <charconv>

#include "covox/error.hpp"

namespace covox {

namespace {

constexpr std::array<std::string_view, 17> kNamed{
    "empty",     "buildings",    "fences",   "other",      "poles",
    "roadlines", "roads",        "sidewalks", "vegetation", "vehicles",
    "walls",     "trafficsigns", "ground",   "bridge",     "guardrail",
    "trafficlight", "terrain"};

constexpr unsigned kFirstReserved = kNamed.size();

}  // namespace

LabelRegistry::LabelRegistry() {
  for (unsigned c = 0; c < kLabelCount; ++c) {
    names_[c] = c < kFirstReserved ? std::string(kNamed[c])
                                   : "reserved_" + std::to_string(c);
  }
}

const LabelRegistry& LabelRegistry::defaults() {
  static const LabelRegistry registry;
  return registry;
}

std::optional<Label> LabelRegistry::find(std::string_view name) const {
  for (unsigned c = 0; c < kLabelCount; ++c) {
    if (names_[c] == name) return static_cast<Label>(c);
  }
  unsigned value = 0;
  const auto* end = name.data() + name.size();
  const auto [ptr, ec] = std::from_chars(name.data(), end, value);
  if (!name.empty() && ec == std::errc() && ptr == end && is_valid_code(value)) {
    return static_cast<Label>(value);
  }
  return std::nullopt;
}

void LabelRegistry::rename(Label l, std::string name) {
  if (code(l) < kFirstReserved || !is_valid_code(code(l))) {
    throw ConfigError("label code " + std::to_string(code(l)) +
                      " is not a reserved code and cannot be renamed");
  }
  if (auto existing = find(name); existing && *existing != l) {
    throw ConfigError("label name '" + name + "' is already in use");
  }
  names_[code(l)] = std::move(name);
}

std::vector<Label> default_eval_classes() {
  std::vector<Label> out;
  for (unsigned c = 1; c < kFirstReserved; ++c) {
    out.push_back(static_cast<Label>(c));
  }
  return out;
}

}  // namespace covox
