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

/**
 * @file annotator.hpp
 * @brief Dense semantic voxel annotation of a scene.
 *
 * The pipeline runs in three stages over a configured GridSpec:
 *
 *  1. top_down_trace: for every object and every grid column crossing the
 *     object's footprint, descend from the top layer and record the first
 *     voxel that passes the exact overlap test as a seed.
 *  2. occupancy_completion: per object, breadth-first expansion from the
 *     seeds over the six face neighbours, fine-testing each candidate once.
 *  3. assign_labels: stamp each object's label on its voxels; when objects
 *     share a voxel the smaller volume_hint wins, then the lower id.
 *
 * brute_force_annotate tests every voxel independently and is the reference
 * the pipeline is checked against. The two agree except where a component of
 * one object is disjoint from, and entirely hidden below, another component
 * of the same object: no column reaches it from the top, so the pipeline
 * never seeds it.
 *
 * A "fine check" is one exact object/voxel overlap test. Voxels outside an
 * object's bounding box are rejected without a fine check.
 */

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "covox/grid_spec.hpp"
#include "covox/scene.hpp"
#include "covox/voxel_grid.hpp"

namespace covox {

struct ObjectSeeds {
  int object_id = 0;
  std::vector<VoxelIndex> seeds;         // first hit per column
  std::vector<VoxelIndex> probed_empty;  // tested negative above a hit or miss
  std::uint64_t fine_checks = 0;
};

/// One entry per object, in scene order.
struct SeedMap {
  std::vector<ObjectSeeds> objects;

  std::size_t seed_count() const;
};

struct ObjectOccupancy {
  int object_id = 0;
  std::vector<VoxelIndex> voxels;  // breadth-first discovery order
  std::uint64_t fine_checks = 0;
};

struct AnnotationStats {
  std::uint64_t fine_checks_performed = 0;
  /// Tests actually run. Equal to fine_checks_performed for the pipeline;
  /// for brute force, performed is the exhaustive voxel x object count and
  /// this is what survived the bounding-box filter.
  std::uint64_t fine_checks_executed = 0;
  std::uint64_t voxel_visits = 0;
  std::uint64_t voxels_occupied = 0;  // non-empty voxels in the output grid
  std::uint64_t seed_count = 0;
  std::vector<std::pair<int, std::uint64_t>> per_object;  // id -> voxels overlapped, before priority
  double wall_time_s = 0.0;
};

struct Annotation {
  VoxelGrid grid;
  AnnotationStats stats;
};

struct AnnotateOptions {
  int workers = 0;  // <= 0: default_workers()
};

struct BruteForceOptions {
  std::uint64_t voxel_budget = std::uint64_t{1} << 25;
  bool force = false;
  int workers = 0;
};

SeedMap top_down_trace(std::span<const SceneObject> objects,
                       const GridSpec& spec, const AnnotateOptions& opts = {});

/// Throws GridError when a seed lies outside its object's covering range.
std::vector<ObjectOccupancy> occupancy_completion(
    std::span<const SceneObject> objects, const SeedMap& seeds,
    const GridSpec& spec, const AnnotateOptions& opts = {});

/// Occupancies are matched to objects by id; throws GridError on unknown ids.
VoxelGrid assign_labels(std::span<const ObjectOccupancy> occupied,
                        std::span<const SceneObject> objects,
                        const GridSpec& spec);

Annotation annotate(std::span<const SceneObject> objects, const GridSpec& spec,
                    const AnnotateOptions& opts = {});
Annotation annotate(const Scene& scene, const GridSpec& spec,
                    const AnnotateOptions& opts = {});

/// Throws ResourceError when the grid exceeds opts.voxel_budget and
/// opts.force is false.
Annotation brute_force_annotate(std::span<const SceneObject> objects,
                                const GridSpec& spec,
                                const BruteForceOptions& opts = {});
Annotation brute_force_annotate(const Scene& scene, const GridSpec& spec,
                                const BruteForceOptions& opts = {});

}  // namespace covox
