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

// JSON scene and benchmark configuration files. See docs/FORMATS.md.
//
// Every validation failure is a ConfigError whose message starts with the
// location of the offending value, e.g.
//   scene.json: agents[0] (id 5).pose.rotation: not a proper rotation (det -1)

#pragma once

#include <filesystem>
#include <string>

#include "covox/bench.hpp"
#include "covox/labels.hpp"
#include "covox/scene.hpp"

namespace covox {

Scene load_scene(const std::filesystem::path& path,
                 const LabelRegistry& labels = LabelRegistry::defaults());
/// `origin` prefixes diagnostics (a file name, or "<string>").
Scene parse_scene(const std::string& text, const std::string& origin = "<string>",
                  const LabelRegistry& labels = LabelRegistry::defaults());
/// Inverse of parse_scene, up to floating-point formatting.
std::string scene_to_json(const Scene& scene,
                          const LabelRegistry& labels = LabelRegistry::defaults());

BenchConfig load_config(const std::filesystem::path& path);
BenchConfig parse_config(const std::string& text, const std::string& origin = "<string>");

/// "start:stop:step" with an inclusive stop ("0:0.5:0.1" gives six values),
/// or a single number. Values are rounded to 1e-12. Throws ConfigError.
std::vector<double> parse_sweep(const std::string& text);
/// "a..b" (inclusive), "a,b,c" or a single integer. Throws ConfigError.
std::vector<int> parse_int_list(const std::string& text);
/// Comma-separated numbers. Throws ConfigError.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace covox
