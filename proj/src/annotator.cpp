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

#include "covox/annotator.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>
#include <unordered_map>

#include "covox/bvh.hpp"
#include "covox/error.hpp"
#include "covox/parallel.hpp"

namespace covox {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Largest covering boxes first so the longest tasks start early.
std::vector<std::size_t> schedule_by_size(std::span<const SceneObject> objects,
                                          const GridSpec& spec) {
  std::vector<std::size_t> cost(objects.size(), 0);
  for (std::size_t n = 0; n < objects.size(); ++n) {
    if (auto box = covering_indices(spec, objects[n].bounds())) {
      cost[n] = box->count() * (objects[n].is_mesh() ? 4 : 1);
    }
  }
  std::vector<std::size_t> order(objects.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cost[a] > cost[b]; });
  return order;
}

ObjectSeeds trace_object(const SceneObject& object, const GridSpec& spec) {
  ObjectSeeds out;
  out.object_id = object.id();
  const auto box = covering_indices(spec, object.bounds());
  if (!box) return out;
  for (int j = box->lo.j; j <= box->hi.j; ++j) {
    for (int i = box->lo.i; i <= box->hi.i; ++i) {
      for (int k = box->hi.k; k >= box->lo.k; --k) {
        const VoxelIndex v{i, j, k};
        const Aabb cell = voxel_aabb(spec, v);
        if (!aabb_overlap(cell, object.bounds())) continue;
        ++out.fine_checks;
        if (object.overlaps(cell)) {
          out.seeds.push_back(v);
          break;
        }
        out.probed_empty.push_back(v);
      }
    }
  }
  return out;
}

ObjectOccupancy complete_object(const SceneObject& object,
                                const ObjectSeeds& seeds,
                                const GridSpec& spec) {
  ObjectOccupancy out;
  out.object_id = object.id();
  const auto box = covering_indices(spec, object.bounds());
  if (!box) {
    if (!seeds.seeds.empty()) {
      throw GridError("object " + std::to_string(object.id()) +
                      " has seeds but does not reach the grid");
    }
    return out;
  }

  // Visited bitset over the object's covering range only.
  const GridShape shape = box->shape();
  std::vector<std::uint8_t> visited(box->count(), 0);
  auto local = [&](const VoxelIndex& v) {
    return static_cast<std::size_t>(v.i - box->lo.i) +
           static_cast<std::size_t>(shape[0]) *
               (static_cast<std::size_t>(v.j - box->lo.j) +
                static_cast<std::size_t>(shape[1]) * (v.k - box->lo.k));
  };

  for (const auto& v : seeds.probed_empty) {
    if (box->contains(v)) visited[local(v)] = 1;
  }
  auto& queue = out.voxels;
  for (const auto& s : seeds.seeds) {
    if (!box->contains(s)) {
      throw GridError("seed outside the covering range of object " +
                      std::to_string(object.id()));
    }
    auto& flag = visited[local(s)];
    if (flag) continue;
    flag = 1;
    queue.push_back(s);
  }

  static constexpr int kSteps[6][3] = {{0, 0, 1},  {0, 0, -1}, {-1, 0, 0},
                                       {1, 0, 0},  {0, 1, 0},  {0, -1, 0}};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const VoxelIndex v = queue[head];
    for (const auto& step : kSteps) {
      const VoxelIndex n{v.i + step[0], v.j + step[1], v.k + step[2]};
      if (!box->contains(n)) continue;
      auto& flag = visited[local(n)];
      if (flag) continue;
      flag = 1;
      const Aabb cell = voxel_aabb(spec, n);
      if (!aabb_overlap(cell, object.bounds())) continue;
      ++out.fine_checks;
      if (object.overlaps(cell)) queue.push_back(n);
    }
  }
  return out;
}

}  // namespace

std::size_t SeedMap::seed_count() const {
  std::size_t n = 0;
  for (const auto& o : objects) n += o.seeds.size();
  return n;
}

SeedMap top_down_trace(std::span<const SceneObject> objects,
                       const GridSpec& spec, const AnnotateOptions& opts) {
  SeedMap out;
  out.objects.resize(objects.size());
  const auto order = schedule_by_size(objects, spec);
  parallel_for(order.size(), opts.workers, [&](std::size_t n) {
    const std::size_t idx = order[n];
    out.objects[idx] = trace_object(objects[idx], spec);
  });
  return out;
}

std::vector<ObjectOccupancy> occupancy_completion(
    std::span<const SceneObject> objects, const SeedMap& seeds,
    const GridSpec& spec, const AnnotateOptions& opts) {
  if (seeds.objects.size() != objects.size()) {
    throw GridError("seed map does not match the object list");
  }
  std::vector<ObjectOccupancy> out(objects.size());
  const auto order = schedule_by_size(objects, spec);
  parallel_for(order.size(), opts.workers, [&](std::size_t n) {
    const std::size_t idx = order[n];
    if (seeds.objects[idx].object_id != objects[idx].id()) {
      throw GridError("seed map entry " + std::to_string(idx) +
                      " belongs to a different object");
    }
    out[idx] = complete_object(objects[idx], seeds.objects[idx], spec);
  });
  return out;
}

VoxelGrid assign_labels(std::span<const ObjectOccupancy> occupied,
                        std::span<const SceneObject> objects,
                        const GridSpec& spec) {
  std::unordered_map<int, const SceneObject*> by_id;
  for (const auto& o : objects) by_id.emplace(o.id(), &o);

  std::vector<std::pair<const SceneObject*, const ObjectOccupancy*>> stamps;
  stamps.reserve(occupied.size());
  for (const auto& occ : occupied) {
    const auto it = by_id.find(occ.object_id);
    if (it == by_id.end()) {
      throw GridError("occupancy for unknown object id " +
                      std::to_string(occ.object_id));
    }
    stamps.emplace_back(it->second, &occ);
  }
  // Lowest priority first; the winner of any shared voxel stamps last.
  std::sort(stamps.begin(), stamps.end(), [](const auto& a, const auto& b) {
    return b.first->outranks(*a.first);
  });

  VoxelGrid grid(spec);
  for (const auto& [object, occ] : stamps) {
    for (const auto& v : occ->voxels) grid.at(v) = object->label();
  }
  return grid;
}

Annotation annotate(std::span<const SceneObject> objects, const GridSpec& spec,
                    const AnnotateOptions& opts) {
  const auto start = Clock::now();
  const SeedMap seeds = top_down_trace(objects, spec, opts);
  const auto occupied = occupancy_completion(objects, seeds, spec, opts);
  Annotation result{assign_labels(occupied, objects, spec), {}};

  auto& stats = result.stats;
  for (std::size_t n = 0; n < objects.size(); ++n) {
    stats.fine_checks_performed +=
        seeds.objects[n].fine_checks + occupied[n].fine_checks;
    stats.seed_count += seeds.objects[n].seeds.size();
    stats.per_object.emplace_back(objects[n].id(), occupied[n].voxels.size());
    stats.voxel_visits += seeds.objects[n].fine_checks + occupied[n].fine_checks;
  }
  stats.fine_checks_executed = stats.fine_checks_performed;
  stats.voxels_occupied = result.grid.count_non_empty();
  stats.wall_time_s = seconds_since(start);
  return result;
}

Annotation annotate(const Scene& scene, const GridSpec& spec,
                    const AnnotateOptions& opts) {
  return annotate(scene.objects(), spec, opts);
}

Annotation brute_force_annotate(std::span<const SceneObject> objects,
                                const GridSpec& spec,
                                const BruteForceOptions& opts) {
  const auto start = Clock::now();
  const BruteForceCost cost = brute_force_op_count(spec, objects.size());
  if (cost.voxel_visits > opts.voxel_budget && !opts.force) {
    throw ResourceError("brute-force annotation of " +
                        std::to_string(cost.voxel_visits) +
                        " voxels exceeds the budget of " +
                        std::to_string(opts.voxel_budget));
  }

  std::vector<Aabb> boxes;
  boxes.reserve(objects.size());
  for (const auto& o : objects) boxes.push_back(o.bounds());
  const Bvh bvh(boxes);

  const auto& dims = spec.dims();
  VoxelGrid grid(spec);
  struct SliceCounts {
    std::uint64_t executed = 0;
    std::vector<std::uint64_t> claimed;
  };
  std::vector<SliceCounts> slices(static_cast<std::size_t>(dims[2]));

  parallel_for(slices.size(), opts.workers, [&](std::size_t slice) {
    SliceCounts& counts = slices[slice];
    counts.claimed.assign(objects.size(), 0);
    const int k = static_cast<int>(slice);
    for (int j = 0; j < dims[1]; ++j) {
      for (int i = 0; i < dims[0]; ++i) {
        const VoxelIndex v{i, j, k};
        const Aabb cell = voxel_aabb(spec, v);
        const SceneObject* best = nullptr;
        bvh.visit(cell, [&](std::uint32_t id) {
          ++counts.executed;
          const SceneObject& o = objects[id];
          if (o.overlaps(cell)) {
            ++counts.claimed[id];
            if (!best || o.outranks(*best)) best = &o;
          }
          return false;
        });
        if (best) grid.at(v) = best->label();
      }
    }
  });

  Annotation result{std::move(grid), {}};
  auto& stats = result.stats;
  stats.voxel_visits = cost.voxel_visits;
  stats.fine_checks_performed = cost.object_checks;
  for (std::size_t n = 0; n < objects.size(); ++n) {
    std::uint64_t claimed = 0;
    for (const auto& s : slices) claimed += s.claimed[n];
    stats.per_object.emplace_back(objects[n].id(), claimed);
  }
  for (const auto& s : slices) stats.fine_checks_executed += s.executed;
  stats.voxels_occupied = result.grid.count_non_empty();
  stats.wall_time_s = seconds_since(start);
  return result;
}

Annotation brute_force_annotate(const Scene& scene, const GridSpec& spec,
                                const BruteForceOptions& opts) {
  return brute_force_annotate(scene.objects(), spec, opts);
}

}  // namespace covox
