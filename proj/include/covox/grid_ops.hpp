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

#include "covox/geometry.hpp"
#include "covox/grid_spec.hpp"
#include "covox/scene.hpp"
#include "covox/voxel_grid.hpp"

namespace covox {

/// Transform taking points in `other`'s frame to `ego`'s frame, with both
/// poses mapping agent frame -> scene frame: ego.inverse() * other.
RigidTransform relative_transform(const RigidTransform& ego,
                                  const RigidTransform& other);

struct WarpedGrid {
  VoxelGrid grid;
  WarpMask mask;
};

/// Inverse nearest-voxel warp. `src_to_dst` maps source-frame points to the
/// destination frame. Each destination voxel centre p samples the source at
/// src_to_dst.inverse()(p); the mask is true iff that point lies inside the
/// source grid (same half-open convention as point_to_voxel). Unmasked
/// voxels are empty.
WarpedGrid warp_grid(const VoxelGrid& src, const RigidTransform& src_to_dst,
                     const GridSpec& dst_spec, int workers = 0);

/// Source voxel sampled for destination voxel `v` by the warps above, given
/// the inverse transform `dst_to_src`; nullopt when it falls outside.
std::optional<VoxelIndex> warp_source(const GridSpec& src,
                                      const RigidTransform& dst_to_src,
                                      const GridSpec& dst, const VoxelIndex& v);

/// Warps a mask the same way; voxels sampling outside the source are false.
VoxelMask warp_mask(const VoxelMask& src, const RigidTransform& src_to_dst,
                    const GridSpec& dst_spec, int workers = 0);

/// Coarsens by an integer factor on every axis (voxels stay cubic). A block
/// is empty iff all its sub-voxels are; otherwise it takes the most frequent
/// non-empty label, ties going to the lower code. Throws GridError when the
/// shape is not divisible.
VoxelGrid downsample(const VoxelGrid& grid, int factor);

/// Index-aligned sub-array copy. Throws GridError when the resolutions
/// differ, the origin is not on the source lattice, or the region does not
/// fit inside the source.
VoxelGrid crop_to_range(const VoxelGrid& grid, const GridSpec& dst_spec);

/// Voxels an agent can see in `gt`. `grid_pose` places the grid frame in the
/// scene frame (identity when the grid is in the scene frame, the agent's pose
/// when it is in the agent frame).
///
/// A voxel is visible when its centre is within max_range of the sensor,
/// inside the horizontal field of view (measured around the agent's +x
/// axis, unlimited vertically), and the 3D DDA walk from the sensor to that
/// centre crosses no non-empty voxel before reaching it. The voxel holding
/// the sensor does not occlude, and the target voxel itself may be occupied.
VisibilityMask compute_visibility(
    const VoxelGrid& gt, const Agent& agent,
    const RigidTransform& grid_pose = RigidTransform::identity(),
    int workers = 0);

struct Observation {
  VoxelGrid grid;
  ObservedMask observed;
};

/// Visible voxels keep their label, the rest become empty.
Observation observed_grid(const VoxelGrid& gt, const VisibilityMask& vis);

}  // namespace covox
