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

#include "covox/scene.hpp"

#include <cmath>
#include <set>
#include <string>

#include "covox/error.hpp"

namespace covox {

SceneObject::SceneObject(int id, Geometry geometry, Label label)
    : id_(id), geometry_(std::move(geometry)), label_(label) {
  if (label_ == Label::Empty || !is_valid_code(code(label_))) {
    throw ConfigError("object " + std::to_string(id_) +
                      ": label must be a non-empty category");
  }
  if (auto* obb = std::get_if<Obb>(&geometry_)) {
    *obb = Obb::make(obb->center, obb->half_extents, obb->rotation);
    bounds_ = obb->bounds();
    volume_ = obb->volume();
    return;
  }
  auto& posed = std::get<PosedMesh>(geometry_);
  if (posed.mesh.triangles.empty()) {
    throw GeometryError("object " + std::to_string(id_) + ": mesh has no triangles");
  }
  posed.mesh.validate();
  posed.pose = RigidTransform::make(posed.pose.rotation, posed.pose.translation);

  auto cache = std::make_shared<MeshCache>();
  cache->triangles.reserve(posed.mesh.triangles.size());
  std::vector<Aabb> boxes;
  boxes.reserve(posed.mesh.triangles.size());
  bounds_ = Aabb::empty();
  for (std::size_t t = 0; t < posed.mesh.triangles.size(); ++t) {
    cache->triangles.push_back(covox::transformed(posed.mesh.triangle(t), posed.pose));
    boxes.push_back(cache->triangles.back().bounds());
    bounds_.expand(boxes.back());
  }
  cache->bvh = Bvh(boxes);
  mesh_cache_ = std::move(cache);
  volume_ = posed.mesh.enclosed_volume();
}

bool SceneObject::overlaps(const Aabb& cell) const {
  if (const auto* obb = std::get_if<Obb>(&geometry_)) {
    return obb_aabb_overlap(*obb, cell);
  }
  const auto& tris = mesh_cache_->triangles;
  return mesh_cache_->bvh.visit(cell, [&](std::uint32_t t) {
    return tri_aabb_overlap(tris[t], cell);
  });
}

SceneObject SceneObject::transformed(const RigidTransform& x) const {
  if (const auto* obb = std::get_if<Obb>(&geometry_)) {
    return SceneObject(id_, covox::transformed(*obb, x), label_);
  }
  const auto& posed = std::get<PosedMesh>(geometry_);
  return SceneObject(id_, PosedMesh{posed.mesh, x * posed.pose}, label_);
}

void Agent::validate() const {
  const std::string who = "agent " + std::to_string(id);
  if (!is_rotation(pose.rotation)) {
    throw ConfigError(who + ": pose rotation is not orthonormal with determinant +1");
  }
  if (!pose.translation.allFinite() || !sensor_origin.allFinite()) {
    throw ConfigError(who + ": pose or sensor origin is not finite");
  }
  if (!(fov_deg > 0.0 && fov_deg <= 360.0)) {
    throw ConfigError(who + ": fov_deg must be in (0, 360]");
  }
  if (!(max_range > 0.0) || !std::isfinite(max_range)) {
    throw ConfigError(who + ": max_range must be positive and finite");
  }
}

Scene::Scene(std::vector<SceneObject> objects, std::vector<Agent> agents)
    : objects_(std::move(objects)), agents_(std::move(agents)) {
  if (agents_.empty()) throw ConfigError("scene needs at least one agent");
  std::set<int> ids;
  for (const auto& o : objects_) {
    if (!ids.insert(o.id()).second) {
      throw ConfigError("duplicate object id " + std::to_string(o.id()));
    }
  }
  ids.clear();
  for (const auto& a : agents_) {
    a.validate();
    if (!ids.insert(a.id).second) {
      throw ConfigError("duplicate agent id " + std::to_string(a.id));
    }
  }
}

const Agent& Scene::agent(int id) const {
  for (const auto& a : agents_) {
    if (a.id == id) return a;
  }
  throw ConfigError("no agent with id " + std::to_string(id));
}

Scene Scene::expressed_in(const RigidTransform& frame) const {
  const RigidTransform to_frame = frame.inverse();
  std::vector<SceneObject> objects;
  objects.reserve(objects_.size());
  for (const auto& o : objects_) objects.push_back(o.transformed(to_frame));
  std::vector<Agent> agents = agents_;
  for (auto& a : agents) a.pose = to_frame * a.pose;
  return Scene(std::move(objects), std::move(agents));
}

}  // namespace covox
