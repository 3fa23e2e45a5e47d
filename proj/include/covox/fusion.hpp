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
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "covox/grid_ops.hpp"
#include "covox/scene.hpp"
#include "covox/voxel_grid.hpp"

namespace covox {

inline constexpr int kMaxCollaborators = 6;

/// The min(k, |others|, 6) agents nearest to `ego` by translation distance,
/// ascending; equal distances go to the lower id. Agents sharing ego's id are
/// ignored.
std::vector<Agent> select_collaborators(const Agent& ego,
                                        std::span<const Agent> others, int k);

/// Horizontal translation noise on a relative transform.
struct NoiseModel {
  double mu = 0.0;     // mean offset magnitude, metres
  double sigma = 0.0;  // standard deviation of the magnitude, metres
  std::uint64_t seed = 0;

  bool noiseless() const { return mu == 0.0 && sigma == 0.0; }
  /// Throws ConfigError unless mu and sigma are finite and non-negative.
  void validate() const;
};

/// Adds an offset of length max(0, N(mu, sigma)) along a uniformly drawn
/// direction in the x-y plane. Rotation is untouched. Always consumes the
/// same number of draws from `rng`.
RigidTransform perturb_transform(const RigidTransform& t,
                                 const NoiseModel& noise, std::mt19937_64& rng);

/// A collaborator's observation and its transform into the ego frame.
struct NeighborView {
  const VoxelGrid* grid = nullptr;
  const ObservedMask* observed = nullptr;
  RigidTransform to_ego;
};

enum class FusionMode {
  /// Ego label where the ego observed; otherwise the first neighbor (in the
  /// given order) whose hybrid mask holds; empty where none does.
  FirstValid,
  /// Like FirstValid, but ego-unobserved voxels take the most common label
  /// among valid neighbors, ties going to the earliest neighbor.
  Vote,
};

struct FusionResult {
  VoxelGrid grid;
  VoxelMask defined;  // ego observed, or some neighbor's hybrid mask true
};

/// Label-level fusion. Each neighbor is warped into `spec`; its hybrid mask
/// is warp validity AND its warped observed mask. Throws GridError when the
/// ego observation does not match `spec`.
FusionResult fuse(const Observation& ego, std::span<const NeighborView> neighbors,
                  const GridSpec& spec, FusionMode mode = FusionMode::FirstValid,
                  int workers = 0);

struct ClassCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
};

struct EvalReport {
  std::vector<Label> evaluated_classes;
  /// Only classes with TP + FP + FN > 0.
  std::map<Label, double> per_class_iou;
  /// Every evaluated class.
  std::map<Label, ClassCounts> counts;
  /// Mean of per_class_iou; nullopt when no evaluated class is present.
  std::optional<double> miou;
};

/// Per-class IoU = TP / (TP + FP + FN). Classes absent from both grids are
/// left out of the mean. Throws GridError on spec mismatch.
EvalReport evaluate(const VoxelGrid& pred, const VoxelGrid& gt,
                    std::span<const Label> classes);
EvalReport evaluate(const VoxelGrid& pred, const VoxelGrid& gt);

}  // namespace covox
