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

#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "covox/bvh.hpp"
#include "covox/geometry.hpp"
#include "covox/labels.hpp"

namespace covox {

/// A mesh in its local frame plus the pose placing it in the scene.
struct PosedMesh {
  TriMesh mesh;
  RigidTransform pose;
};

using Geometry = std::variant<Obb, PosedMesh>;

/// A labelled rigid object.
///
/// Occupancy semantics differ by geometry: an Obb is solid, a mesh occupies
/// only the voxels its triangles cross. A voxel strictly inside a closed mesh
/// is therefore not occupied by it; model solid objects with Obbs.
class SceneObject {
 public:
  /// Validates geometry and label (must not be empty); throws GeometryError
  /// or ConfigError.
  SceneObject(int id, Geometry geometry, Label label);

  int id() const { return id_; }
  Label label() const { return label_; }
  const Geometry& geometry() const { return geometry_; }
  const Aabb& bounds() const { return bounds_; }
  /// Obb volume, or the enclosed volume of a mesh. Used to resolve voxels
  /// claimed by several objects: smaller volume wins, then lower id.
  double volume_hint() const { return volume_; }
  bool is_mesh() const { return std::holds_alternative<PosedMesh>(geometry_); }

  /// Exact overlap of the object with a closed box; no bounds pre-check.
  bool overlaps(const Aabb& cell) const;

  /// Returns a copy with `x` applied after the object's own placement.
  SceneObject transformed(const RigidTransform& x) const;

  /// Strict priority order used for label conflicts.
  bool outranks(const SceneObject& other) const {
    return volume_ < other.volume_ || (volume_ == other.volume_ && id_ < other.id_);
  }

 private:
  struct MeshCache {
    std::vector<Triangle> triangles;  // scene frame
    Bvh bvh;
  };

  int id_;
  Geometry geometry_;
  Label label_;
  Aabb bounds_;
  double volume_ = 0.0;
  std::shared_ptr<const MeshCache> mesh_cache_;
};

/// A collaborating vehicle. `pose` maps agent-frame points to the scene
/// frame; the agent looks along its +x axis.
struct Agent {
  int id = 0;
  RigidTransform pose;
  Vec3 sensor_origin = Vec3::Zero();  // agent frame
  double fov_deg = 360.0;             // horizontal, in (0, 360]
  double max_range = 100.0;           // metres

  Vec3 position() const { return pose.translation; }
  Vec3 sensor_position() const { return pose.apply(sensor_origin); }
  /// Throws ConfigError when the pose or sensor parameters are invalid.
  void validate() const;
};

class Scene {
 public:
  Scene() = default;
  /// Validates unique ids and at least one agent; throws ConfigError.
  Scene(std::vector<SceneObject> objects, std::vector<Agent> agents);

  std::span<const SceneObject> objects() const { return objects_; }
  std::span<const Agent> agents() const { return agents_; }
  /// Throws ConfigError for unknown ids.
  const Agent& agent(int id) const;

  /// The same scene with every object and agent expressed in `frame`
  /// (typically an agent pose): a point p in the scene frame becomes
  /// frame.inverse().apply(p).
  Scene expressed_in(const RigidTransform& frame) const;

 private:
  std::vector<SceneObject> objects_;
  std::vector<Agent> agents_;
};

}  // namespace covox
