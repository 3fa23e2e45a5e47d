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
 * @file geometry.hpp
 * @brief Exact overlap primitives used by the voxel annotator.
 *
 * All overlap predicates use the closed-set convention: two shapes that only
 * touch (shared face, edge or vertex) are reported as overlapping. This keeps
 * annotation free of holes at voxel boundaries, at the price of labelling the
 * voxel layer adjacent to a face that lies exactly on a grid plane.
 */

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace covox {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kRotationTolerance = 1e-6;
inline constexpr double kMinTriangleArea = 1e-12;

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  /// Inverted box, the identity for expand().
  static Aabb empty();

  bool valid() const { return (min.array() <= max.array()).all(); }
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 size() const { return max - min; }
  double volume() const;

  void expand(const Vec3& p);
  void expand(const Aabb& other);

  bool contains(const Vec3& p) const;
  bool contains(const Aabb& inner) const;
};

/// Closed-interval overlap on all three axes.
bool aabb_overlap(const Aabb& a, const Aabb& b);

/// True when `r` is orthonormal with determinant +1 within `tol`.
bool is_rotation(const Mat3& r, double tol = kRotationTolerance);

/// Oriented box. Columns of `rotation` are the box axes in the parent frame.
struct Obb {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Ones();
  Mat3 rotation = Mat3::Identity();

  /// Validating constructor; throws GeometryError.
  static Obb make(const Vec3& center, const Vec3& half_extents,
                  const Mat3& rotation = Mat3::Identity());

  Aabb bounds() const;
  double volume() const { return 8.0 * half_extents.prod(); }
  bool contains(const Vec3& p) const;
};

struct Triangle {
  std::array<Vec3, 3> v;

  Aabb bounds() const;
  /// Unnormalized normal (v1 - v0) x (v2 - v0).
  Vec3 normal() const { return (v[1] - v[0]).cross(v[2] - v[0]); }
  double area() const { return 0.5 * normal().norm(); }
};

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  Triangle triangle(std::size_t t) const;
  /// Throws GeometryError on out-of-range indices or degenerate triangles.
  void validate() const;
  /// Absolute signed volume via the divergence theorem; 0 for open surfaces
  /// that happen to cancel, so treat it as a hint only.
  double enclosed_volume() const;
};

/// Rigid motion x -> rotation * x + translation.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }
  /// Validating constructor; throws GeometryError.
  static RigidTransform make(const Mat3& rotation, const Vec3& translation);
  /// Rotation about +z by `yaw` radians followed by `translation`.
  static RigidTransform from_yaw(double yaw, const Vec3& translation);

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_direction(const Vec3& d) const { return rotation * d; }
  RigidTransform inverse() const;
  /// Composition: (a * b).apply(p) == a.apply(b.apply(p)).
  RigidTransform operator*(const RigidTransform& rhs) const;
};

Triangle transformed(const Triangle& t, const RigidTransform& x);
Obb transformed(const Obb& o, const RigidTransform& x);

/// Separating-axis test over 15 axes.
bool obb_aabb_overlap(const Obb& obb, const Aabb& box);

/// Separating-axis test over 13 axes (3 box normals, triangle normal, 9 edge
/// cross products).
bool tri_aabb_overlap(const Triangle& tri, const Aabb& box);

}  // namespace covox
