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

#include <cstdint>
#include <span>
#include <vector>

#include "covox/grid_spec.hpp"
#include "covox/labels.hpp"

namespace covox {

/// Dense semantic grid, x-fastest storage.
class VoxelGrid {
 public:
  explicit VoxelGrid(const GridSpec& spec, Label fill = Label::Empty);
  /// Throws GridError when the size mismatches the spec or a code is >= 24.
  VoxelGrid(const GridSpec& spec, std::vector<Label> labels);

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return labels_.size(); }
  std::span<const Label> labels() const { return labels_; }
  std::span<Label> labels() { return labels_; }

  Label at(const VoxelIndex& v) const { return labels_[spec_.linear(v)]; }
  Label& at(const VoxelIndex& v) { return labels_[spec_.linear(v)]; }
  Label operator[](std::size_t n) const { return labels_[n]; }
  Label& operator[](std::size_t n) { return labels_[n]; }

  std::size_t count_non_empty() const;

  /// Specs approximately equal (1e-6 m) and labels identical.
  friend bool operator==(const VoxelGrid& a, const VoxelGrid& b);

 private:
  GridSpec spec_;
  std::vector<Label> labels_;
};

/// Dense boolean grid matching a GridSpec. Used as warp validity, sensor
/// visibility and observedness masks.
class VoxelMask {
 public:
  explicit VoxelMask(const GridSpec& spec, bool fill = false);

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t n) const { return bits_[n] != 0; }
  void set(std::size_t n, bool value) { bits_[n] = value ? 1 : 0; }
  bool at(const VoxelIndex& v) const { return bits_[spec_.linear(v)] != 0; }
  void set(const VoxelIndex& v, bool value) { set(spec_.linear(v), value); }
  std::span<const std::uint8_t> data() const { return bits_; }
  std::span<std::uint8_t> data() { return bits_; }

  std::size_t count() const;
  bool all() const { return count() == size(); }
  bool none() const { return count() == 0; }

  friend bool operator==(const VoxelMask& a, const VoxelMask& b);

 private:
  GridSpec spec_;
  std::vector<std::uint8_t> bits_;
};

using WarpMask = VoxelMask;
using VisibilityMask = VoxelMask;
using ObservedMask = VoxelMask;

}  // namespace covox
