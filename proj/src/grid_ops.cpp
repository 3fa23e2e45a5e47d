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

#include "covox/grid_ops.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "covox/error.hpp"
#include "covox/parallel.hpp"

namespace covox {

namespace {

constexpr std::size_t kOutside = std::numeric_limits<std::size_t>::max();

// Calls f(dst_linear, src_linear_or_kOutside) for every destination voxel.
template <class F>
void for_each_sample(const GridSpec& src, const RigidTransform& src_to_dst,
                     const GridSpec& dst, int workers, F&& f) {
  const RigidTransform dst_to_src = src_to_dst.inverse();
  const auto& dims = dst.dims();
  parallel_for(static_cast<std::size_t>(dims[2]), workers, [&](std::size_t k) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int i = 0; i < dims[0]; ++i) {
        const VoxelIndex v{i, j, static_cast<int>(k)};
        const auto s = warp_source(src, dst_to_src, dst, v);
        f(dst.linear(v), s ? src.linear(*s) : kOutside);
      }
    }
  });
}

using Cell = std::array<long, 3>;

// Empty-space summary for ray walks. For every voxel it stores the radii of
// several axis-aligned boxes around it that contain no occupied voxel:
//   slot 0: the largest empty cube (Chebyshev distance to the nearest
//           occupied voxel; 0 means the voxel itself is occupied),
//   slot s: the largest empty box with half-height kSlabHalfHeight[s] whose
//           x-y half-width is the stored value minus one.
// Distances are exact chessboard distances from two-pass raster scans,
// saturated at 255. Cells outside the grid count as empty.
class ClearanceField {
 public:
  static constexpr int kSlots = 5;
  static constexpr std::array<long, kSlots> kSlabHalfHeight{0, 1, 3, 7, 15};
  using Entry = std::array<std::uint8_t, kSlots>;

  explicit ClearanceField(const VoxelGrid& grid) {
    for (int a = 0; a < 3; ++a) n_[a] = grid.spec().dims()[a];
    const auto labels = grid.labels();
    const std::size_t count = labels.size();
    entries_.resize(count);

    std::vector<std::uint8_t> dist(count);
    for (std::size_t v = 0; v < count; ++v) dist[v] = labels[v] != Label::Empty ? 0 : 255;
    chessboard(dist, true);
    for (std::size_t v = 0; v < count; ++v) entries_[v][0] = dist[v];

    // Distance to the nearest occupied voxel in the same column.
    std::vector<std::uint8_t> dz(count);
    for (std::size_t v = 0; v < count; ++v) dz[v] = labels[v] != Label::Empty ? 0 : 255;
    const long layer = n_[0] * n_[1];
    for (long c = 0; c < layer; ++c) {
      for (long k = 1; k < n_[2]; ++k) relax(dz[c + k * layer], dz[c + (k - 1) * layer]);
      for (long k = n_[2] - 2; k >= 0; --k) relax(dz[c + k * layer], dz[c + (k + 1) * layer]);
    }
    for (int slot = 1; slot < kSlots; ++slot) {
      for (std::size_t v = 0; v < count; ++v) dist[v] = dz[v] <= kSlabHalfHeight[slot] ? 0 : 255;
      chessboard(dist, false);
      for (std::size_t v = 0; v < count; ++v) entries_[v][slot] = dist[v];
    }
  }

  bool inside(const Cell& c) const {
    return c[0] >= 0 && c[1] >= 0 && c[2] >= 0 && c[0] < n_[0] && c[1] < n_[1] && c[2] < n_[2];
  }
  bool occupied(const Cell& c) const { return inside(c) && entries_[index(c)][0] == 0; }
  /// Null for cells outside the grid.
  const Entry* entry(const Cell& c) const { return inside(c) ? &entries_[index(c)] : nullptr; }

 private:
  static void relax(std::uint8_t& d, std::uint8_t from) {
    if (from < 255 && from + 1 < d) d = static_cast<std::uint8_t>(from + 1);
  }

  // Two-pass chessboard distance, over 26 neighbours (3D) or over the 8
  // neighbours within each z layer.
  void chessboard(std::vector<std::uint8_t>& d, bool three_d) const {
    const long nx = n_[0], ny = n_[1], nz = n_[2];
    auto at = [&](long i, long j, long k) -> std::uint8_t& { return d[i + nx * (j + ny * k)]; };
    const int dk_lo = three_d ? -1 : 0;
    for (long k = 0; k < nz; ++k) {
      for (long j = 0; j < ny; ++j) {
        for (long i = 0; i < nx; ++i) {
          std::uint8_t& cur = at(i, j, k);
          if (cur == 0) continue;
          for (int dk = dk_lo; dk <= 0; ++dk) {
            for (int dj = -1; dj <= 1; ++dj) {
              for (int di = -1; di <= 1; ++di) {
                // Neighbours that precede (i, j, k) in raster order.
                if (dk == 0 && (dj > 0 || (dj == 0 && di >= 0))) continue;
                const long ii = i + di, jj = j + dj, kk = k + dk;
                if (ii < 0 || jj < 0 || kk < 0 || ii >= nx || jj >= ny) continue;
                relax(cur, at(ii, jj, kk));
              }
            }
          }
        }
      }
    }
    for (long k = nz - 1; k >= 0; --k) {
      for (long j = ny - 1; j >= 0; --j) {
        for (long i = nx - 1; i >= 0; --i) {
          std::uint8_t& cur = at(i, j, k);
          if (cur == 0) continue;
          for (int dk = 0; dk <= (three_d ? 1 : 0); ++dk) {
            for (int dj = -1; dj <= 1; ++dj) {
              for (int di = -1; di <= 1; ++di) {
                if (dk == 0 && (dj < 0 || (dj == 0 && di <= 0))) continue;
                const long ii = i + di, jj = j + dj, kk = k + dk;
                if (ii < 0 || jj < 0 || ii >= nx || jj >= ny || kk >= nz) continue;
                relax(cur, at(ii, jj, kk));
              }
            }
          }
        }
      }
    }
  }

  std::size_t index(const Cell& c) const {
    return static_cast<std::size_t>(c[0] + n_[0] * (c[1] + n_[1] * c[2]));
  }

  long n_[3];
  std::vector<Entry> entries_;
};

// Amanatides-Woo walk from `s` (voxel units, inside `start`) to the centre of
// `goal`. The crossing time of every grid plane is a fixed function of the
// plane index, and crossings are taken in (time, axis) order, so jumping
// across an empty box visits exactly the cells a step-by-step walk would.
bool line_of_sight(const ClearanceField& field, const Vec3& s, const Cell& start,
                   const Cell& goal) {
  if (goal == start) return true;
  const Vec3 d(goal[0] + 0.5 - s.x(), goal[1] + 0.5 - s.y(), goal[2] + 0.5 - s.z());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Cell cell = start;
  Cell step{};
  Cell next{};  // index of the next plane to cross on each axis
  long budget = 3;
  for (int a = 0; a < 3; ++a) {
    budget += std::abs(goal[a] - start[a]);
    step[a] = d[a] > 0.0 ? 1 : (d[a] < 0.0 ? -1 : 0);
    next[a] = step[a] > 0 ? cell[a] + 1 : cell[a];
  }
  const std::array<double, 3> inv{1.0 / d[0], 1.0 / d[1], 1.0 / d[2]};
  auto plane_time = [&](int a, long plane) {
    return step[a] == 0 ? kInf : (double(plane) - s[a]) * inv[a];
  };
  auto before = [](double t0, int a0, double t1, int a1) {
    return t0 < t1 || (t0 == t1 && a0 < a1);
  };
  std::array<double, 3> t_next{plane_time(0, next[0]), plane_time(1, next[1]),
                               plane_time(2, next[2])};

  while (budget > 0) {
    // Pick the empty box around the cell that the ray leaves last.
    const auto* entry = field.entry(cell);
    std::array<long, 3> radius{-1, -1, -1};
    if (entry != nullptr) {
      double best = -kInf;
      for (int slot = 0; slot < ClearanceField::kSlots; ++slot) {
        const long v = (*entry)[slot];
        const std::array<long, 3> r =
            slot == 0 ? std::array<long, 3>{v - 1, v - 1, v - 1}
                      : std::array<long, 3>{v - 1, v - 1, ClearanceField::kSlabHalfHeight[slot]};
        if (r[0] < 0 || r[0] + r[1] + r[2] == 0) continue;
        double t = kInf;
        for (int a = 0; a < 3; ++a) {
          if (step[a] != 0) t = std::min(t, plane_time(a, step[a] > 0 ? cell[a] + r[a] + 1 : cell[a] - r[a]));
        }
        if (t > best) {
          best = t;
          radius = r;
        }
      }
    }
    if (radius[0] >= 0) {
      // Every cell of the box is empty.
      bool goal_near = true;
      for (int a = 0; a < 3; ++a) goal_near = goal_near && std::abs(goal[a] - cell[a]) <= radius[a];
      if (goal_near) return true;
      Cell exit{};
      std::array<double, 3> t_exit{kInf, kInf, kInf};
      for (int a = 0; a < 3; ++a) {
        if (step[a] == 0) continue;
        exit[a] = step[a] > 0 ? cell[a] + radius[a] + 1 : cell[a] - radius[a];
        t_exit[a] = plane_time(a, exit[a]);
      }
      int e = 0;
      for (int a = 1; a < 3; ++a) {
        if (before(t_exit[a], a, t_exit[e], e)) e = a;
      }
      long taken = 0;
      for (int b = 0; b < 3; ++b) {
        if (step[b] == 0) continue;
        long n;
        if (b == e) {
          n = std::abs(exit[b] - next[b]) + 1;
        } else {
          // Crossings on b strictly before the exit event.
          const long max_n = std::abs(exit[b] - next[b]);
          const double guess = std::floor((t_exit[e] - t_next[b]) * std::abs(d[b])) + 1.0;
          n = static_cast<long>(std::clamp(guess, 0.0, double(max_n)));
          while (n > 0 && !before(plane_time(b, next[b] + step[b] * (n - 1)), b, t_exit[e], e)) --n;
          while (n < max_n && before(plane_time(b, next[b] + step[b] * n), b, t_exit[e], e)) ++n;
        }
        cell[b] += step[b] * n;
        next[b] += step[b] * n;
        t_next[b] = plane_time(b, next[b]);
        taken += n;
      }
      budget -= taken;
    } else {
      int axis = 0;
      if (t_next[1] < t_next[axis]) axis = 1;
      if (t_next[2] < t_next[axis]) axis = 2;
      cell[axis] += step[axis];
      next[axis] += step[axis];
      t_next[axis] = plane_time(axis, next[axis]);
      --budget;
    }
    if (cell == goal) return true;
    if (field.occupied(cell)) return false;
  }
  return true;  // unreachable in exact arithmetic
}

// Tolerances for comparing lattices that may have passed through the 32-bit
// grid file header.
constexpr double kResolutionRelTol = 1e-6;
constexpr double kLatticeTol = 1e-4;  // fraction of a voxel

}  // namespace

std::optional<VoxelIndex> warp_source(const GridSpec& src,
                                      const RigidTransform& dst_to_src,
                                      const GridSpec& dst, const VoxelIndex& v) {
  return point_to_voxel(src, dst_to_src.apply(voxel_center(dst, v)));
}

RigidTransform relative_transform(const RigidTransform& ego,
                                  const RigidTransform& other) {
  return ego.inverse() * other;
}

WarpedGrid warp_grid(const VoxelGrid& src, const RigidTransform& src_to_dst,
                     const GridSpec& dst_spec, int workers) {
  WarpedGrid out{VoxelGrid(dst_spec), WarpMask(dst_spec)};
  const auto in = src.labels();
  auto labels = out.grid.labels();
  auto mask = out.mask.data();
  for_each_sample(src.spec(), src_to_dst, dst_spec, workers,
                  [&](std::size_t d, std::size_t s) {
                    if (s == kOutside) return;
                    labels[d] = in[s];
                    mask[d] = 1;
                  });
  return out;
}

VoxelMask warp_mask(const VoxelMask& src, const RigidTransform& src_to_dst,
                    const GridSpec& dst_spec, int workers) {
  VoxelMask out(dst_spec);
  const auto in = src.data();
  auto bits = out.data();
  for_each_sample(src.spec(), src_to_dst, dst_spec, workers,
                  [&](std::size_t d, std::size_t s) {
                    if (s != kOutside) bits[d] = in[s];
                  });
  return out;
}

VoxelGrid downsample(const VoxelGrid& grid, int factor) {
  const auto& dims = grid.spec().dims();
  if (factor <= 0) throw GridError("downsample factor must be positive");
  for (int a = 0; a < 3; ++a) {
    if (dims[a] % factor != 0) {
      std::ostringstream msg;
      msg << "grid dimension " << dims[a] << " on axis " << "xyz"[a]
          << " is not divisible by factor " << factor;
      throw GridError(msg.str());
    }
  }
  const GridSpec coarse = GridSpec::from_dims(
      grid.spec().lower(),
      {dims[0] / factor, dims[1] / factor, dims[2] / factor},
      grid.spec().resolution() * factor);
  VoxelGrid out(coarse);
  const auto& cd = coarse.dims();
  std::array<int, kLabelCount> votes{};
  for (int k = 0; k < cd[2]; ++k) {
    for (int j = 0; j < cd[1]; ++j) {
      for (int i = 0; i < cd[0]; ++i) {
        votes.fill(0);
        for (int dk = 0; dk < factor; ++dk) {
          for (int dj = 0; dj < factor; ++dj) {
            for (int di = 0; di < factor; ++di) {
              const VoxelIndex f{i * factor + di, j * factor + dj,
                                 k * factor + dk};
              ++votes[code(grid.at(f))];
            }
          }
        }
        int best = 0;
        for (int c = 1; c < kLabelCount; ++c) {
          if (votes[c] > 0 && (best == 0 || votes[c] > votes[best])) best = c;
        }
        out.at({i, j, k}) = static_cast<Label>(best);
      }
    }
  }
  return out;
}

VoxelGrid crop_to_range(const VoxelGrid& grid, const GridSpec& dst_spec) {
  const GridSpec& src = grid.spec();
  const double res = src.resolution();
  if (std::abs(dst_spec.resolution() - res) > kResolutionRelTol * res) {
    throw GridError("crop resolution differs from the source grid");
  }
  int offset[3];
  for (int a = 0; a < 3; ++a) {
    const double o = (dst_spec.lower()[a] - src.lower()[a]) / res;
    const double r = std::round(o);
    if (std::abs(o - r) > kLatticeTol) {
      throw GridError("crop origin is not aligned with the source voxels");
    }
    offset[a] = static_cast<int>(r);
    if (offset[a] < 0 || offset[a] + dst_spec.dims()[a] > src.dims()[a]) {
      throw GridError("crop region extends outside the source grid");
    }
  }
  VoxelGrid out(dst_spec);
  const auto& d = dst_spec.dims();
  for (int k = 0; k < d[2]; ++k) {
    for (int j = 0; j < d[1]; ++j) {
      for (int i = 0; i < d[0]; ++i) {
        out.at({i, j, k}) = grid.at({i + offset[0], j + offset[1], k + offset[2]});
      }
    }
  }
  return out;
}

VisibilityMask compute_visibility(const VoxelGrid& gt, const Agent& agent,
                                  const RigidTransform& grid_pose,
                                  int workers) {
  const GridSpec& spec = gt.spec();
  VisibilityMask vis(spec);
  const RigidTransform agent_in_grid = grid_pose.inverse() * agent.pose;
  const Vec3 sensor = agent_in_grid.apply(agent.sensor_origin);
  const Mat3 to_agent = agent_in_grid.rotation.transpose();
  const double range2 = agent.max_range * agent.max_range;
  const bool full_circle = agent.fov_deg >= 360.0;
  const double half_fov = 0.5 * agent.fov_deg * std::numbers::pi / 180.0 + 1e-12;

  const double res = spec.resolution();
  const Vec3 s = (sensor - spec.lower()) / res;  // voxel units
  const Cell start{static_cast<long>(std::floor(s.x())),
                   static_cast<long>(std::floor(s.y())),
                   static_cast<long>(std::floor(s.z()))};
  const auto& dims = spec.dims();
  const ClearanceField field(gt);

  auto bits = vis.data();
  parallel_for(static_cast<std::size_t>(dims[2]), workers, [&](std::size_t kk) {
    const int k = static_cast<int>(kk);
    for (int j = 0; j < dims[1]; ++j) {
      for (int i = 0; i < dims[0]; ++i) {
        const VoxelIndex v{i, j, k};
        const Vec3 offset = voxel_center(spec, v) - sensor;
        if (offset.squaredNorm() > range2) continue;
        if (!full_circle) {
          const Vec3 local = to_agent * offset;
          if (std::abs(std::atan2(local.y(), local.x())) > half_fov) continue;
        }
        if (line_of_sight(field, s, start, {v.i, v.j, v.k})) bits[spec.linear(v)] = 1;
      }
    }
  });
  return vis;
}

Observation observed_grid(const VoxelGrid& gt, const VisibilityMask& vis) {
  if (!gt.spec().approx_equal(vis.spec())) {
    throw GridError("visibility mask does not match the grid");
  }
  Observation out{VoxelGrid(gt.spec()), vis};
  auto labels = out.grid.labels();
  for (std::size_t n = 0; n < gt.size(); ++n) {
    if (vis[n]) labels[n] = gt[n];
  }
  return out;
}

}  // namespace covox
