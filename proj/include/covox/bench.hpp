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
 * @file bench.hpp
 * @brief Collaborative perception sweep over egos, ranges, collaborator
 * counts and pose-noise levels.
 *
 * Per agent and range the driver builds the agent-frame ground truth, the
 * agent's visibility and its observation. Each cell (ego, range, k, noise)
 * then fuses the ego observation with its k nearest collaborators and scores
 * the result against the ego ground truth.
 *
 * Results do not depend on scheduling: every cell draws pose noise from a
 * stream seeded by (config seed, noise seed, ego id, range index, neighbor
 * id). The noise level is deliberately not part of the seed, so the sweep
 * over mu reuses the same draws and only the offset length changes.
 */

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "covox/fusion.hpp"
#include "covox/grid_spec.hpp"
#include "covox/labels.hpp"
#include "covox/scene.hpp"

namespace covox {

struct RangeSetting {
  std::string name;  // e.g. "25.6m"
  GridSpec spec;     // ego frame
};

/// R x R x 4.8 m centred on the ego in x and y, z from -2 m, 256 voxels
/// across.
RangeSetting benchmark_range(double range_m);
/// 25.6 m, 51.2 m and 76.8 m.
std::vector<RangeSetting> default_ranges();

/// Smallest 0.1 m grid containing every range, aligned so each range can be
/// cropped from it.
GridSpec master_for(const std::vector<RangeSetting>& ranges);

enum class GtSource {
  /// Crop the ego's master annotation and downsample it; falls back to
  /// Annotate when the range is not on the master lattice.
  CropDownsample,
  /// Annotate every range directly.
  Annotate,
};

struct BenchConfig {
  std::optional<GridSpec> master;  // default: master_for(ranges)
  std::vector<RangeSetting> ranges = default_ranges();
  std::vector<int> k_values{0, 1, 2, 3, 4, 5, 6};
  std::vector<NoiseModel> noise;  // sweep entries
  bool include_noiseless = true;  // prepend mu = sigma = 0 when absent
  std::uint64_t seed = 0;
  std::vector<Label> classes = default_eval_classes();
  GtSource gt_source = GtSource::CropDownsample;
  FusionMode fusion = FusionMode::FirstValid;
  std::vector<int> egos;  // empty: every agent
  LabelRegistry labels;
  int workers = 0;

  /// Throws ConfigError on empty or out-of-range settings.
  void validate() const;
  /// Noise models in sweep order, with the noiseless entry first if added.
  std::vector<NoiseModel> noise_models() const;
};

struct CellResult {
  int ego_id = 0;
  std::size_t range_index = 0;
  int k = 0;
  std::size_t noise_index = 0;
  NoiseModel noise;
  std::vector<int> collaborators;  // ids, nearest first
  std::string gt_source;           // "crop_downsample" or "annotate"
  std::optional<EvalReport> report;
  std::string error;  // non-empty when the cell failed
  double wall_time_s = 0.0;
};

struct BenchReport {
  BenchConfig config;
  std::vector<NoiseModel> noise_models;
  std::vector<CellResult> cells;  // ego, range, k, noise order

  /// One JSON object per cell, no timing; byte-identical across reruns.
  std::string to_jsonl() const;
  /// Per-cell wall time, keyed like to_jsonl().
  std::string timings_jsonl() const;
  /// Aligned text tables: per-class IoU and mIoU by range and k (noiseless),
  /// then mIoU by noise level and range at the largest k.
  std::string table() const;

  /// Mean mIoU over egos for one (range, k, noise) cell column; nullopt when
  /// no cell produced one.
  std::optional<double> mean_miou(std::size_t range_index, int k,
                                  std::size_t noise_index) const;
};

/// Throws ConfigError on an invalid configuration or unknown ego ids. Errors
/// inside individual cells are recorded in CellResult::error.
BenchReport run_benchmark(const Scene& scene, const BenchConfig& config);

struct CellOutput {
  VoxelGrid gt;  // ego frame
  Observation ego;
  FusionResult fused;
  EvalReport report;
  std::vector<int> collaborators;
};

/// A single benchmark cell with its grids, computed exactly as
/// run_benchmark computes it. Throws on any failure.
CellOutput run_cell(const Scene& scene, const BenchConfig& config, int ego_id,
                    std::size_t range_index, int k, const NoiseModel& noise);

}  // namespace covox
