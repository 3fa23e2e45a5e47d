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

#include <string>

#include "covox/error.hpp"
#include "covox/scene.hpp"
#include "covox/scene_io.hpp"
#include "support/scene_gen.hpp"

using namespace covox;
using testgen::Rng;
using testgen::uniform;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_scene(text, "s.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kBox = R"("geometry":{"obb":{"center":[0,0,0],"half_extents":[1,1,1]}})";

std::string one_object(const std::string& fields) {
  return std::string(R"({"objects":[{)") + fields + R"(}],"agents":[{"id":1,"pose":{"translation":[0,0,0]}}]})";
}

TriMesh tetra() {
  TriMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.triangles = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  return m;
}

}  // namespace

TEST_CASE("scene objects validate and rank by volume then id") {
  CHECK_THROWS_AS(SceneObject(1, Obb::make(Vec3::Zero(), Vec3::Ones()), Label::Empty), ConfigError);
  TriMesh empty_mesh;
  CHECK_THROWS_AS(SceneObject(1, PosedMesh{empty_mesh, {}}, Label::Roads), GeometryError);
  const SceneObject big(1, Obb::make(Vec3::Zero(), Vec3::Ones()), Label::Roads);
  const SceneObject small(2, Obb::make(Vec3::Zero(), Vec3::Constant(0.5)), Label::Poles);
  const SceneObject twin(3, Obb::make(Vec3::Ones(), Vec3::Constant(0.5)), Label::Poles);
  CHECK(big.volume_hint() == doctest::Approx(8.0));
  CHECK(small.outranks(big));
  CHECK_FALSE(big.outranks(small));
  CHECK(small.outranks(twin));
  const SceneObject mesh(4, PosedMesh{tetra(), RigidTransform::from_yaw(0.5, Vec3(1, 2, 3))}, Label::Vegetation);
  CHECK(mesh.is_mesh());
  CHECK(mesh.volume_hint() == doctest::Approx(1.0 / 6.0));
  CHECK(mesh.bounds().contains(Vec3(1, 2, 3)));
}

TEST_CASE("mesh occupancy is the surface only") {
  TriMesh m = tetra();
  for (auto& v : m.vertices) v *= 10.0;
  const SceneObject o(1, PosedMesh{m, {}}, Label::Vegetation);
  CHECK(o.overlaps({Vec3(-0.1, -0.1, -0.1), Vec3(0.1, 0.1, 0.1)}));
  CHECK_FALSE(o.overlaps({Vec3(1, 1, 1), Vec3(1.2, 1.2, 1.2)}));
}

TEST_CASE("expressed_in maps objects and agents into a frame") {
  Rng rng(8);
  const auto frame = RigidTransform::make(testgen::random_rotation(rng), Vec3(3, -2, 1));
  Agent a;
  a.id = 7;
  a.pose = RigidTransform::from_yaw(0.4, Vec3(1, 1, 0));
  const Scene scene({SceneObject(1, Obb::make(Vec3(2, 0, 0), Vec3(1, 0.5, 0.5)), Label::Vehicles),
                     SceneObject(2, PosedMesh{tetra(), {}}, Label::Vegetation)},
                    {a});
  const Scene local = scene.expressed_in(frame);
  const auto& obb = std::get<Obb>(local.objects()[0].geometry());
  CHECK((obb.center - frame.inverse().apply(Vec3(2, 0, 0))).norm() < 1e-12);
  CHECK((local.agent(7).position() - frame.inverse().apply(a.position())).norm() < 1e-12);
  for (int n = 0; n < 200; ++n) {
    const Vec3 lo(uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3));
    const Aabb probe{lo, lo + Vec3::Constant(0.2)};
    // The mesh must be hit exactly where its scene-frame triangles are.
    bool hit = false;
    const auto& pm = std::get<PosedMesh>(local.objects()[1].geometry());
    for (std::size_t t = 0; t < pm.mesh.triangles.size(); ++t) {
      Triangle tr = pm.mesh.triangle(t);
      for (auto& v : tr.v) v = pm.pose.apply(v);
      hit = hit || tri_aabb_overlap(tr, probe);
    }
    CHECK(local.objects()[1].overlaps(probe) == hit);
  }
  CHECK_THROWS_AS(scene.agent(99), ConfigError);
}

TEST_CASE("scene validation") {
  Agent a;
  a.id = 1;
  CHECK_THROWS_AS(Scene({}, {}), ConfigError);
  CHECK_THROWS_AS(Scene({}, {a, a}), ConfigError);
  const SceneObject o(1, Obb::make(Vec3::Zero(), Vec3::Ones()), Label::Roads);
  CHECK_THROWS_AS(Scene({o, o}, {a}), ConfigError);
  Agent bad = a;
  bad.fov_deg = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = a;
  bad.max_range = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("scene json errors name the offending field") {
  CHECK(error_of("{}") == "s.json: missing field 'agents'");
  CHECK(error_of(one_object(std::string(R"("id":1,"label":"cars",)") + kBox)) ==
        "s.json: objects[0] (id 1).label: unknown label 'cars'");
  CHECK(error_of(one_object(std::string(R"("id":1,"label":"roads","colour":2,)") + kBox)) ==
        "s.json: objects[0] (id 1): unknown field 'colour'");
  CHECK(error_of(one_object(
            R"("id":1,"label":"roads","geometry":{"obb":{"center":[0,0,0],"half_extents":[1,1,1],"rotation":[1,0,0,0,1,0,0,0,-1]}})")) ==
        "s.json: objects[0] (id 1).geometry.obb.rotation: not a proper rotation (determinant -1)");
  CHECK(error_of(one_object(
            R"("id":1,"label":"roads","geometry":{"obb":{"center":[0,0,0],"half_extents":[1,1,1],"rotation":[1,0,0,0,1.1,0,0,0,1]}})"))
            .find("rotation is not orthonormal") != std::string::npos);
  CHECK(error_of(one_object(R"("id":1,"label":"roads","geometry":{"obb":{"center":[0,0],"half_extents":[1,1,1]}})"))
            .find("objects[0] (id 1).geometry.obb.center") != std::string::npos);
  CHECK(error_of(one_object(R"("id":1,"label":"roads","geometry":{"mesh":{"vertices":[[0,0,0],[1,0,0],[2,0,0]],"triangles":[[0,1,2]]}})"))
            .find("objects[0] (id 1).geometry") != std::string::npos);
  CHECK(error_of("{\"objects\":[").find("s.json: invalid JSON") == 0);
  const std::string dup = std::string(R"({"objects":[{"id":4,"label":"roads",)") + kBox + R"(},{"id":4,"label":"roads",)" +
                          kBox + R"(}],"agents":[{"id":1,"pose":{}}]})";
  CHECK(error_of(dup) == "s.json: objects[1] (id 4).id: duplicate object id 4 (first used at objects[0])");
  CHECK(error_of(R"({"objects":[],"agents":[{"id":1,"pose":{},"sensor":{"fov_deg":400}}]})")
            .find("agents[0] (id 1)") != std::string::npos);
}

TEST_CASE("scene json round trip") {
  Rng rng(21);
  for (int n = 0; n < 10; ++n) {
    const Scene scene = testgen::random_street_scene(rng, 3);
    const std::string text = scene_to_json(scene);
    const Scene back = parse_scene(text);
    REQUIRE(back.objects().size() == scene.objects().size());
    CHECK(scene_to_json(back) == text);
    for (std::size_t i = 0; i < scene.objects().size(); ++i) {
      CHECK(back.objects()[i].id() == scene.objects()[i].id());
      CHECK(back.objects()[i].label() == scene.objects()[i].label());
      CHECK((back.objects()[i].bounds().min - scene.objects()[i].bounds().min).norm() < 1e-9);
    }
    CHECK((back.agent(2).pose.translation - scene.agent(2).pose.translation).norm() < 1e-12);
  }
}

TEST_CASE("labels by name, code and registry") {
  const std::string text = one_object(std::string(R"("id":1,"label":"bikes",)") + kBox);
  CHECK_THROWS_AS(parse_scene(text), ConfigError);
  LabelRegistry reg;
  reg.rename(static_cast<Label>(17), "bikes");
  CHECK(parse_scene(text, "x", reg).objects()[0].label() == static_cast<Label>(17));
  CHECK(parse_scene(one_object(std::string(R"("id":1,"label":9,)") + kBox)).objects()[0].label() == Label::Vehicles);
}

TEST_CASE("sweeps and lists") {
  const auto mu = parse_sweep("0:0.5:0.1");
  REQUIRE(mu.size() == 6);
  CHECK(mu[3] == 0.3);
  CHECK(mu[5] == 0.5);
  CHECK(parse_sweep("0.25") == std::vector<double>{0.25});
  CHECK_THROWS_AS(parse_sweep("0:1:0"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("1:0:0.1"), ConfigError);
  CHECK_THROWS_AS(parse_sweep("a:b:c"), ConfigError);
  CHECK(parse_int_list("0..3") == std::vector<int>{0, 1, 2, 3});
  CHECK(parse_int_list("1,4,2") == std::vector<int>{1, 4, 2});
  CHECK(parse_int_list("5") == std::vector<int>{5});
  CHECK_THROWS_AS(parse_int_list("3..1"), ConfigError);
  CHECK_THROWS_AS(parse_int_list("x"), ConfigError);
  CHECK(parse_number_list("25.6,51.2") == std::vector<double>{25.6, 51.2});
}

TEST_CASE("benchmark config parsing") {
  const BenchConfig c = parse_config(R"({
    "ranges": [25.6],
    "k": "0..2",
    "noise": {"mu": "0:0.2:0.1", "sigma": 0.02, "seed": 9},
    "seed": 4,
    "gt_source": "annotate",
    "fusion": "vote",
    "egos": [2],
    "label_names": {"17": "bikes"},
    "workers": 1
  })");
  CHECK(c.ranges.size() == 1);
  CHECK(c.k_values == std::vector<int>{0, 1, 2});
  REQUIRE(c.noise.size() == 3);
  CHECK(c.noise[2].mu == 0.2);
  CHECK(c.noise[2].sigma == 0.02);
  CHECK(c.noise[2].seed == 9);
  CHECK(c.noise_models().size() == 4);
  CHECK(c.noise_models()[0].noiseless());
  CHECK(c.seed == 4);
  CHECK(c.gt_source == GtSource::Annotate);
  CHECK(c.fusion == FusionMode::Vote);
  CHECK(c.egos == std::vector<int>{2});
  CHECK(c.labels.find("bikes") == static_cast<Label>(17));
  CHECK_THROWS_WITH_AS(parse_config(R"({"k": [9]})", "c.json"), doctest::Contains("c.json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"gt_source": "magic"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"unknown": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"noise": {"mu": -0.1}})"), ConfigError);
}
