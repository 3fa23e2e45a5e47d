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

#include "covox/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>

#include "covox/error.hpp"

namespace covox {

namespace {

// Padding on |R| in the box/box test so nearly parallel edge pairs, whose
// cross product is numerically zero, never produce a spurious separation.
constexpr double kParallelEps = 1e-12;

}  // namespace

Aabb Aabb::empty() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {Vec3::Constant(inf), Vec3::Constant(-inf)};
}

double Aabb::volume() const {
  if (!valid()) return 0.0;
  return size().prod();
}

void Aabb::expand(const Vec3& p) {
  min = min.cwiseMin(p);
  max = max.cwiseMax(p);
}

void Aabb::expand(const Aabb& other) {
  min = min.cwiseMin(other.min);
  max = max.cwiseMax(other.max);
}

bool Aabb::contains(const Vec3& p) const {
  return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
}

bool Aabb::contains(const Aabb& inner) const {
  return (inner.min.array() >= min.array()).all() &&
         (inner.max.array() <= max.array()).all();
}

bool aabb_overlap(const Aabb& a, const Aabb& b) {
  for (int i = 0; i < 3; ++i) {
    if (a.max[i] < b.min[i] || b.max[i] < a.min[i]) return false;
  }
  return true;
}

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  const Mat3 gram = r.transpose() * r;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(r.determinant() - 1.0) <= tol;
}

Obb Obb::make(const Vec3& center, const Vec3& half_extents,
              const Mat3& rotation) {
  if (!center.allFinite()) throw GeometryError("obb center is not finite");
  if (!half_extents.allFinite() || (half_extents.array() <= 0.0).any()) {
    throw GeometryError("obb half extents must be positive and finite");
  }
  if (!is_rotation(rotation)) {
    throw GeometryError("obb rotation is not orthonormal with determinant +1");
  }
  return Obb{center, half_extents, rotation};
}

Aabb Obb::bounds() const {
  const Vec3 reach = rotation.cwiseAbs() * half_extents;
  return {center - reach, center + reach};
}

bool Obb::contains(const Vec3& p) const {
  const Vec3 local = rotation.transpose() * (p - center);
  return (local.cwiseAbs().array() <= half_extents.array()).all();
}

Aabb Triangle::bounds() const {
  Aabb b = Aabb::empty();
  for (const auto& p : v) b.expand(p);
  return b;
}

Triangle TriMesh::triangle(std::size_t t) const {
  const auto& idx = triangles[t];
  return Triangle{{vertices[idx[0]], vertices[idx[1]], vertices[idx[2]]}};
}

void TriMesh::validate() const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!vertices[i].allFinite()) {
      throw GeometryError("mesh vertex " + std::to_string(i) +
                          " is not finite");
    }
  }
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (auto idx : triangles[t]) {
      if (idx >= vertices.size()) {
        throw GeometryError("mesh triangle " + std::to_string(t) +
                            " references vertex " + std::to_string(idx) +
                            " out of range");
      }
    }
    if (triangle(t).area() <= kMinTriangleArea) {
      throw GeometryError("mesh triangle " + std::to_string(t) +
                          " is degenerate");
    }
  }
}

double TriMesh::enclosed_volume() const {
  double six_v = 0.0;
  for (const auto& idx : triangles) {
    six_v += vertices[idx[0]].dot(vertices[idx[1]].cross(vertices[idx[2]]));
  }
  return std::abs(six_v) / 6.0;
}

RigidTransform RigidTransform::make(const Mat3& rotation,
                                    const Vec3& translation) {
  if (!is_rotation(rotation)) {
    throw GeometryError("rotation is not orthonormal with determinant +1");
  }
  if (!translation.allFinite()) throw GeometryError("translation not finite");
  return RigidTransform{rotation, translation};
}

RigidTransform RigidTransform::from_yaw(double yaw, const Vec3& translation) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Mat3 r;
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return RigidTransform{r, translation};
}

RigidTransform RigidTransform::inverse() const {
  const Mat3 rt = rotation.transpose();
  return RigidTransform{rt, -(rt * translation)};
}

RigidTransform RigidTransform::operator*(const RigidTransform& rhs) const {
  return RigidTransform{rotation * rhs.rotation,
                        rotation * rhs.translation + translation};
}

Triangle transformed(const Triangle& t, const RigidTransform& x) {
  return Triangle{{x.apply(t.v[0]), x.apply(t.v[1]), x.apply(t.v[2])}};
}

Obb transformed(const Obb& o, const RigidTransform& x) {
  return Obb{x.apply(o.center), o.half_extents, x.rotation * o.rotation};
}

bool obb_aabb_overlap(const Obb& obb, const Aabb& box) {
  const Vec3 a = 0.5 * box.size();
  const Vec3& b = obb.half_extents;
  const Mat3& r = obb.rotation;  // r(i, j) = box axis i . obb axis j
  const Vec3 t = obb.center - box.center();
  const Mat3 abs_r = (r.cwiseAbs().array() + kParallelEps).matrix();

  for (int i = 0; i < 3; ++i) {
    if (std::abs(t[i]) > a[i] + abs_r.row(i).dot(b)) return false;
  }
  for (int j = 0; j < 3; ++j) {
    if (std::abs(t.dot(r.col(j))) > abs_r.col(j).dot(a) + b[j]) return false;
  }
  for (int i = 0; i < 3; ++i) {
    const int i1 = (i + 1) % 3;
    const int i2 = (i + 2) % 3;
    for (int j = 0; j < 3; ++j) {
      const int j1 = (j + 1) % 3;
      const int j2 = (j + 2) % 3;
      const double ra = a[i1] * abs_r(i2, j) + a[i2] * abs_r(i1, j);
      const double rb = b[j1] * abs_r(i, j2) + b[j2] * abs_r(i, j1);
      const double d = std::abs(t[i2] * r(i1, j) - t[i1] * r(i2, j));
      if (d > ra + rb) return false;
    }
  }
  return true;
}

namespace {

// Projects the three (box-centred) vertices on `axis` and compares against the
// box's projected radius.
bool separated_on(const Vec3& axis, const std::array<Vec3, 3>& v,
                  const Vec3& half) {
  const double p0 = axis.dot(v[0]);
  const double p1 = axis.dot(v[1]);
  const double p2 = axis.dot(v[2]);
  const double r = half.dot(axis.cwiseAbs());
  const double lo = std::min({p0, p1, p2});
  const double hi = std::max({p0, p1, p2});
  return lo > r || hi < -r;
}

}  // namespace

bool tri_aabb_overlap(const Triangle& tri, const Aabb& box) {
  const Vec3 c = box.center();
  const Vec3 h = 0.5 * box.size();
  const std::array<Vec3, 3> v{tri.v[0] - c, tri.v[1] - c, tri.v[2] - c};

  // Box face normals: the triangle's bounds against the box.
  for (int i = 0; i < 3; ++i) {
    const double lo = std::min({v[0][i], v[1][i], v[2][i]});
    const double hi = std::max({v[0][i], v[1][i], v[2][i]});
    if (lo > h[i] || hi < -h[i]) return false;
  }

  // Triangle plane against the box.
  const Vec3 e0 = v[1] - v[0];
  const Vec3 e1 = v[2] - v[1];
  const Vec3 e2 = v[0] - v[2];
  const Vec3 n = e0.cross(e1);
  if (std::abs(n.dot(v[0])) > h.dot(n.cwiseAbs())) return false;

  // Edge x box-axis cross products. Zero axes (edge parallel to a box axis)
  // project everything to 0 and cannot separate.
  const std::array<Vec3, 3> edges{e0, e1, e2};
  for (const auto& e : edges) {
    for (int k = 0; k < 3; ++k) {
      if (separated_on(Vec3::Unit(k).cross(e), v, h)) return false;
    }
  }
  return true;
}

}  // namespace covox
