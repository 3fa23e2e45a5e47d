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

#include "covox/voxel_grid.hpp"

#include <algorithm>
#include <string>

#include "covox/error.hpp"

namespace covox {

VoxelGrid::VoxelGrid(const GridSpec& spec, Label fill)
    : spec_(spec), labels_(spec.voxel_count(), fill) {}

VoxelGrid::VoxelGrid(const GridSpec& spec, std::vector<Label> labels)
    : spec_(spec), labels_(std::move(labels)) {
  if (labels_.size() != spec_.voxel_count()) {
    throw GridError("label array has " + std::to_string(labels_.size()) +
                    " entries, grid needs " +
                    std::to_string(spec_.voxel_count()));
  }
  for (Label l : labels_) {
    if (!is_valid_code(code(l))) {
      throw GridError("invalid label code " + std::to_string(code(l)));
    }
  }
}

std::size_t VoxelGrid::count_non_empty() const {
  return labels_.size() -
         static_cast<std::size_t>(
             std::count(labels_.begin(), labels_.end(), Label::Empty));
}

bool operator==(const VoxelGrid& a, const VoxelGrid& b) {
  return a.spec_.approx_equal(b.spec_) && a.labels_ == b.labels_;
}

VoxelMask::VoxelMask(const GridSpec& spec, bool fill)
    : spec_(spec), bits_(spec.voxel_count(), fill ? 1 : 0) {}

std::size_t VoxelMask::count() const {
  return static_cast<std::size_t>(
      std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool operator==(const VoxelMask& a, const VoxelMask& b) {
  return a.spec_.approx_equal(b.spec_) && a.bits_ == b.bits_;
}

}  // namespace covox
