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
#include <cstddef>
#include <cstdint>
#include <optional>

#include "covox/geometry.hpp"

namespace covox {

struct VoxelIndex {
  int i = 0;
  int j = 0;
  int k = 0;

  friend bool operator==(const VoxelIndex&, const VoxelIndex&) = default;
  friend auto operator<=>(const VoxelIndex&, const VoxelIndex&) = default;
};

using GridShape = std::array<int, 3>;

/// Placement, resolution and size of a regular grid of cubic voxels. The grid
/// covers [lower, lower + dims * resolution) in the frame it is expressed in
/// (normally an agent frame). Voxels are stored x-fastest, then y, then z.
class GridSpec {
 public:
  /// 100 x 100 x 7 m at 0.1 m with x, y in [-50, 50] and z in [-2, 5].
  GridSpec();

  /// Throws ConfigError unless every extent is a positive integer multiple of
  /// `resolution` (within 1e-9 voxels).
  static GridSpec from_bounds(const Vec3& lower, const Vec3& extent,
                              double resolution);
  static GridSpec from_dims(const Vec3& lower, const GridShape& dims,
                            double resolution);
  /// x and y centred on the origin, z starting at `z_min`.
  static GridSpec centered(const Vec3& extent, double resolution,
                           double z_min = -2.0);

  const Vec3& lower() const { return lower_; }
  Vec3 upper() const { return lower_ + resolution_ * dims_vec(); }
  Vec3 extent() const { return resolution_ * dims_vec(); }
  double resolution() const { return resolution_; }
  const GridShape& dims() const { return dims_; }
  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  }
  Aabb bounds() const { return {lower_, upper()}; }

  bool contains(const VoxelIndex& v) const {
    return v.i >= 0 && v.j >= 0 && v.k >= 0 && v.i < dims_[0] &&
           v.j < dims_[1] && v.k < dims_[2];
  }
  std::size_t linear(const VoxelIndex& v) const {
    return static_cast<std::size_t>(v.i) +
           static_cast<std::size_t>(dims_[0]) *
               (static_cast<std::size_t>(v.j) +
                static_cast<std::size_t>(dims_[1]) * v.k);
  }
  VoxelIndex unravel(std::size_t n) const;

  /// Same dims, and lower/resolution equal within `tol` metres.
  bool approx_equal(const GridSpec& other, double tol = 1e-6) const;

 private:
  GridSpec(const Vec3& lower, const GridShape& dims, double resolution);
  Vec3 dims_vec() const { return {double(dims_[0]), double(dims_[1]), double(dims_[2])}; }

  Vec3 lower_;
  GridShape dims_;
  double resolution_;
};

GridShape grid_shape(const GridSpec& spec);

/// Closed cell [lower + idx * res, lower + (idx + 1) * res] per axis. Throws
/// GridError for indices outside the grid.
Aabb voxel_aabb(const GridSpec& spec, const VoxelIndex& idx);
Vec3 voxel_center(const GridSpec& spec, const VoxelIndex& idx);

/// Floor convention; points on the grid's upper faces (or beyond) and below
/// its lower faces yield nullopt.
std::optional<VoxelIndex> point_to_voxel(const GridSpec& spec, const Vec3& p);

/// Axis-aligned index range, inclusive on both ends.
struct IndexBox {
  VoxelIndex lo;
  VoxelIndex hi;

  GridShape shape() const { return {hi.i - lo.i + 1, hi.j - lo.j + 1, hi.k - lo.k + 1}; }
  std::size_t count() const {
    const auto s = shape();
    return static_cast<std::size_t>(s[0]) * s[1] * s[2];
  }
  bool contains(const VoxelIndex& v) const {
    return v.i >= lo.i && v.j >= lo.j && v.k >= lo.k && v.i <= hi.i &&
           v.j <= hi.j && v.k <= hi.k;
  }
};

/// Index range that contains every voxel whose closed cell may touch `box`
/// (padded by one voxel against rounding), clipped to the grid. nullopt when
/// the clipped range is empty.
std::optional<IndexBox> covering_indices(const GridSpec& spec, const Aabb& box);

/// Cost of the exhaustive per-voxel strategy.
struct BruteForceCost {
  std::uint64_t voxel_visits = 0;   // nx * ny * nz
  std::uint64_t object_checks = 0;  // voxel_visits * num_objects
};

BruteForceCost brute_force_op_count(const GridSpec& spec,
                                    std::size_t num_objects);

}  // namespace covox
