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

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "covox/error.hpp"
#include "covox/grid_ops.hpp"
#include "support/scene_gen.hpp"

using namespace covox;
using testgen::Rng;
using testgen::uniform;
using testgen::uniform_int;

namespace {

VoxelGrid random_grid(Rng& rng, const GridSpec& spec, double fill = 0.3) {
  VoxelGrid g(spec);
  for (auto& l : g.labels()) {
    if (uniform(rng, 0, 1) < fill) l = static_cast<Label>(uniform_int(rng, 1, 23));
  }
  return g;
}

// Quarter turn about z, exactly.
Mat3 quarter_turns(int q) {
  Mat3 r = Mat3::Identity();
  const int c[4] = {1, 0, -1, 0};
  const int s[4] = {0, 1, 0, -1};
  q = ((q % 4) + 4) % 4;
  r(0, 0) = c[q];
  r(0, 1) = -s[q];
  r(1, 0) = s[q];
  r(1, 1) = c[q];
  return r;
}

}  // namespace

TEST_CASE("relative transform maps the other frame into the ego frame") {
  const auto ego = RigidTransform::from_yaw(0, Vec3::Zero());
  const auto other = RigidTransform::from_yaw(0, Vec3(10, 0, 0));
  const auto rel = relative_transform(ego, other);
  CHECK((rel.translation - Vec3(10, 0, 0)).norm() < 1e-12);
  Rng rng(6);
  for (int n = 0; n < 50; ++n) {
    const auto a = RigidTransform::make(testgen::random_rotation(rng), Vec3(uniform(rng, -9, 9), 1, 2));
    const auto b = RigidTransform::make(testgen::random_rotation(rng), Vec3(3, uniform(rng, -9, 9), 0));
    const auto r = relative_transform(a, b);
    const Vec3 p(uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5));
    CHECK((a.apply(r.apply(p)) - b.apply(p)).norm() < 1e-11);
  }
}

TEST_CASE("identity warp") {
  Rng rng(1);
  const GridSpec spec = GridSpec::from_dims(Vec3(-1.6, -1.6, -0.8), {32, 32, 16}, 0.1);
  const VoxelGrid g = random_grid(rng, spec);
  const auto w = warp_grid(g, RigidTransform::identity(), spec);
  CHECK(w.grid == g);
  CHECK(w.mask.all());
}

TEST_CASE("lattice-preserving warps match the index remap") {
  Rng rng(2);
  const int n = 24;
  const int nz = 8;
  const double res = 0.2;
  const GridSpec spec = GridSpec::from_dims(Vec3(-n / 2 * res, -n / 2 * res, -1.0), {n, n, nz}, res);
  for (int trial = 0; trial < 60; ++trial) {
    const int q = uniform_int(rng, 0, 3);
    const int tx = uniform_int(rng, -10, 10), ty = uniform_int(rng, -10, 10), tz = uniform_int(rng, -3, 3);
    const RigidTransform x = RigidTransform::make(quarter_turns(q), Vec3(tx * res, ty * res, tz * res));
    const VoxelGrid src = random_grid(rng, spec);
    const auto w = warp_grid(src, x, spec);
    const Mat3 inv = quarter_turns(-q);
    for (int k = 0; k < nz; ++k) {
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          // Centres in voxel units relative to the rotation axis: half integers.
          const Vec3 c(i + 0.5 - n / 2 - tx, j + 0.5 - n / 2 - ty, k - tz);
          const Vec3 s = inv * c;
          const int si = static_cast<int>(std::lround(s.x() + n / 2 - 0.5));
          const int sj = static_cast<int>(std::lround(s.y() + n / 2 - 0.5));
          const int sk = static_cast<int>(std::lround(s.z()));
          const bool inside = si >= 0 && sj >= 0 && sk >= 0 && si < n && sj < n && sk < nz;
          const VoxelIndex d{i, j, k};
          REQUIRE(w.mask.at(d) == inside);
          if (inside) {
            REQUIRE(w.grid.at(d) == src.at({si, sj, sk}));
          } else {
            REQUIRE(w.grid.at(d) == Label::Empty);
          }
        }
      }
    }
    // Round trip: every doubly-valid voxel returns to its label.
    const auto back = warp_grid(w.grid, x.inverse(), spec);
    for (std::size_t v = 0; v < src.size(); ++v) {
      if (back.mask[v] && w.mask[spec.linear(
              *point_to_voxel(spec, x.apply(voxel_center(spec, spec.unravel(v)))))]) {
        REQUIRE(back.grid[v] == src[v]);
      }
    }
  }
}

TEST_CASE("warp masks match a direct bounds check") {
  Rng rng(3);
  const GridSpec src = GridSpec::from_dims(Vec3(-2, -3, -1), {40, 60, 20}, 0.1);
  const GridSpec dst = GridSpec::from_dims(Vec3(-4, -4, -1.5), {32, 32, 12}, 0.25);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto x = RigidTransform::make(testgen::yaw_rotation(uniform(rng, -3.1, 3.1)),
                                        Vec3(uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -0.3, 0.3)));
    const VoxelGrid g = random_grid(rng, src, 0.5);
    const auto w = warp_grid(g, x, dst);
    VoxelMask observed(src);
    for (std::size_t v = 0; v < observed.size(); ++v) observed.set(v, uniform(rng, 0, 1) < 0.5);
    const auto wm = warp_mask(observed, x, dst);
    for (std::size_t v = 0; v < dst.voxel_count(); ++v) {
      const Vec3 p = voxel_center(dst, dst.unravel(v));
      const Vec3 q = x.rotation.transpose() * (p - x.translation);
      const Vec3 u = (q - src.lower()) / src.resolution();
      bool near_edge = false;
      bool inside = true;
      for (int a = 0; a < 3; ++a) {
        near_edge = near_edge || std::abs(u[a] - std::round(u[a])) < 1e-7;
        inside = inside && u[a] >= 0 && u[a] < src.dims()[a];
      }
      if (near_edge) continue;
      ++checked;
      REQUIRE(w.mask[v] == inside);
      if (inside) {
        const VoxelIndex s{static_cast<int>(std::floor(u.x())), static_cast<int>(std::floor(u.y())),
                           static_cast<int>(std::floor(u.z()))};
        REQUIRE(w.grid[v] == g.at(s));
        REQUIRE(wm[v] == observed.at(s));
      } else {
        REQUIRE(w.grid[v] == Label::Empty);
        REQUIRE_FALSE(wm[v]);
      }
    }
  }
  CHECK(checked > 500000);
}

TEST_CASE("downsample takes the most frequent non-empty label") {
  Rng rng(4);
  const GridSpec spec = GridSpec::from_dims(Vec3(-1, -1, 0), {12, 9, 6}, 0.1);
  for (int f : {1, 3}) {
    const VoxelGrid g = random_grid(rng, spec, 0.2);
    const VoxelGrid d = downsample(g, f);
    CHECK(d.spec().resolution() == doctest::Approx(0.1 * f));
    CHECK((d.spec().lower() - spec.lower()).norm() < 1e-12);
    for (std::size_t v = 0; v < d.size(); ++v) {
      const VoxelIndex c = d.spec().unravel(v);
      std::map<int, int> votes;
      for (int dk = 0; dk < f; ++dk)
        for (int dj = 0; dj < f; ++dj)
          for (int di = 0; di < f; ++di) {
            const Label l = g.at({c.i * f + di, c.j * f + dj, c.k * f + dk});
            if (l != Label::Empty) ++votes[code(l)];
          }
      Label expected = Label::Empty;
      int best = 0;
      for (const auto& [lab, count] : votes) {
        if (count > best) {
          best = count;
          expected = static_cast<Label>(lab);
        }
      }
      REQUIRE(d[v] == expected);
    }
  }
  CHECK_THROWS_AS(downsample(VoxelGrid(spec), 4), GridError);
  CHECK_THROWS_AS(downsample(VoxelGrid(spec), 0), GridError);
}

TEST_CASE("downsample ties go to the lower code and empty needs an empty block") {
  const GridSpec spec = GridSpec::from_dims(Vec3::Zero(), {2, 2, 2}, 0.1);
  VoxelGrid g(spec);
  g.at({0, 0, 0}) = Label::Vehicles;
  g.at({1, 0, 0}) = Label::Roads;
  CHECK(downsample(g, 2)[0] == Label::Roads);
  VoxelGrid one(spec);
  one.at({1, 1, 1}) = Label::Poles;
  CHECK(downsample(one, 2)[0] == Label::Poles);
  CHECK(downsample(VoxelGrid(spec), 2)[0] == Label::Empty);
}

TEST_CASE("crop copies an index-aligned window") {
  Rng rng(5);
  const GridSpec spec = GridSpec::from_dims(Vec3(-2, -2, -1), {40, 40, 20}, 0.1);
  const VoxelGrid g = random_grid(rng, spec);
  const GridSpec win = GridSpec::from_dims(Vec3(-1.5, -0.7, -0.5), {10, 12, 5}, 0.1);
  const VoxelGrid c = crop_to_range(g, win);
  for (std::size_t v = 0; v < c.size(); ++v) {
    const VoxelIndex i = win.unravel(v);
    REQUIRE(c[v] == g.at({i.i + 5, i.j + 13, i.k + 5}));
  }
  CHECK_THROWS_AS(crop_to_range(g, GridSpec::from_dims(Vec3(-1.55, -0.7, -0.5), {10, 12, 5}, 0.1)), GridError);
  CHECK_THROWS_AS(crop_to_range(g, GridSpec::from_dims(Vec3(-1.5, -0.7, -0.5), {10, 12, 5}, 0.2)), GridError);
  CHECK_THROWS_AS(crop_to_range(g, GridSpec::from_dims(Vec3(1.5, -0.7, -0.5), {10, 12, 5}, 0.1)), GridError);
}
