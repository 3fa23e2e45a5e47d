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

#include "covox/scene_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "covox/error.hpp"

namespace covox {

namespace {

using json = nlohmann::json;

// A JSON value together with its location, for diagnostics.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const json& value() const { return value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(path_ + ": " + msg);
  }

  Node at(const std::string& key) const {
    if (!value_.is_object()) fail("expected an object");
    const auto it = value_.find(key);
    if (it == value_.end()) fail("missing field '" + key + "'");
    return Node(*it, path_ + "." + key);
  }
  std::optional<Node> find(const std::string& key) const {
    if (!value_.is_object()) fail("expected an object");
    const auto it = value_.find(key);
    if (it == value_.end()) return std::nullopt;
    return Node(*it, path_ + "." + key);
  }
  std::vector<Node> items() const {
    if (!value_.is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < value_.size(); ++i) {
      out.emplace_back(value_[i], path_ + "[" + std::to_string(i) + "]");
    }
    return out;
  }
  void only(std::initializer_list<const char*> keys) const {
    if (!value_.is_object()) fail("expected an object");
    for (const auto& [k, v] : value_.items()) {
      bool known = false;
      for (const char* allowed : keys) known = known || k == allowed;
      if (!known) fail("unknown field '" + k + "'");
    }
  }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    const double v = value_.get<double>();
    if (!std::isfinite(v)) fail("number is not finite");
    return v;
  }
  long long integer() const {
    if (!value_.is_number_integer()) fail("expected an integer");
    return value_.get<long long>();
  }
  int int32() const {
    const long long v = integer();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      fail("integer out of range");
    }
    return static_cast<int>(v);
  }
  std::uint64_t uint64() const {
    if (!value_.is_number_unsigned() && !(value_.is_number_integer() && integer() >= 0)) {
      fail("expected a non-negative integer");
    }
    return value_.get<std::uint64_t>();
  }
  bool boolean() const {
    if (!value_.is_boolean()) fail("expected true or false");
    return value_.get<bool>();
  }
  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }
  Vec3 vec3() const {
    const auto xs = items();
    if (xs.size() != 3) fail("expected 3 numbers");
    return {xs[0].number(), xs[1].number(), xs[2].number()};
  }
  // Nine numbers row-major, or three rows of three.
  Mat3 mat3() const {
    const auto xs = items();
    Mat3 m;
    if (xs.size() == 9) {
      for (int n = 0; n < 9; ++n) m(n / 3, n % 3) = xs[n].number();
    } else if (xs.size() == 3) {
      for (int r = 0; r < 3; ++r) m.row(r) = xs[r].vec3().transpose();
    } else {
      fail("expected 9 numbers (row-major) or 3 rows of 3");
    }
    return m;
  }
  Mat3 rotation() const {
    const Mat3 m = mat3();
    if (!is_rotation(m)) {
      const double det = m.determinant();
      if (det < 0.0) {
        std::ostringstream s;
        s << "not a proper rotation (determinant " << det << ")";
        fail(s.str());
      }
      fail("rotation is not orthonormal within 1e-6");
    }
    return m;
  }

 private:
  const json& value_;
  std::string path_;
};

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": invalid JSON: " + e.what());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Label parse_label(const Node& n, const LabelRegistry& labels) {
  std::optional<Label> l;
  if (n.value().is_string()) {
    l = labels.find(n.string());
    if (!l) n.fail("unknown label '" + n.string() + "'");
  } else {
    const long long c = n.integer();
    if (c < 0 || c >= kLabelCount) n.fail("label code out of range");
    l = static_cast<Label>(c);
  }
  return *l;
}

RigidTransform parse_pose(const Node& n) {
  n.only({"rotation", "translation", "yaw_deg"});
  RigidTransform t;
  if (auto r = n.find("rotation")) t.rotation = r->rotation();
  if (auto yaw = n.find("yaw_deg")) {
    if (n.find("rotation")) yaw->fail("give either rotation or yaw_deg, not both");
    t = RigidTransform::from_yaw(yaw->number() * std::numbers::pi / 180.0, Vec3::Zero());
  }
  if (auto tr = n.find("translation")) t.translation = tr->vec3();
  return t;
}

std::string describe(const Node& n, const json& item) {
  if (item.is_object() && item.contains("id") && item["id"].is_number_integer()) {
    return n.path() + " (id " + std::to_string(item["id"].get<long long>()) + ")";
  }
  return n.path();
}

Geometry parse_geometry(const Node& n) {
  n.only({"obb", "mesh"});
  const auto obb = n.find("obb");
  const auto mesh = n.find("mesh");
  if (obb.has_value() == mesh.has_value()) n.fail("expected exactly one of 'obb' or 'mesh'");
  if (obb) {
    obb->only({"center", "half_extents", "rotation", "yaw_deg"});
    Mat3 r = Mat3::Identity();
    if (auto rot = obb->find("rotation")) r = rot->rotation();
    if (auto yaw = obb->find("yaw_deg")) {
      if (obb->find("rotation")) yaw->fail("give either rotation or yaw_deg, not both");
      r = RigidTransform::from_yaw(yaw->number() * std::numbers::pi / 180.0, Vec3::Zero())
              .rotation;
    }
    const Vec3 half = obb->at("half_extents").vec3();
    if (!(half.array() > 0.0).all()) obb->at("half_extents").fail("must be positive");
    return Obb{obb->at("center").vec3(), half, r};
  }
  mesh->only({"vertices", "triangles", "pose"});
  PosedMesh pm;
  for (const auto& v : mesh->at("vertices").items()) pm.mesh.vertices.push_back(v.vec3());
  const auto nv = pm.mesh.vertices.size();
  for (const auto& t : mesh->at("triangles").items()) {
    const auto idx = t.items();
    if (idx.size() != 3) t.fail("expected 3 vertex indices");
    std::array<std::uint32_t, 3> tri{};
    for (int c = 0; c < 3; ++c) {
      const long long i = idx[c].integer();
      if (i < 0 || static_cast<std::size_t>(i) >= nv) idx[c].fail("vertex index out of range");
      tri[c] = static_cast<std::uint32_t>(i);
    }
    pm.mesh.triangles.push_back(tri);
  }
  if (auto pose = mesh->find("pose")) pm.pose = parse_pose(*pose);
  return pm;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json mat_json(const Mat3& m) {
  json out = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out.push_back(m(r, c));
  }
  return out;
}

GridSpec parse_grid_spec(const Node& n) {
  n.only({"name", "lower", "dims", "extent", "resolution"});
  const double res = n.at("resolution").number();
  const Vec3 lower = n.at("lower").vec3();
  try {
    if (auto d = n.find("dims")) {
      if (n.find("extent")) d->fail("give either dims or extent, not both");
      const auto xs = d->items();
      if (xs.size() != 3) d->fail("expected 3 integers");
      return GridSpec::from_dims(lower, {xs[0].int32(), xs[1].int32(), xs[2].int32()}, res);
    }
    return GridSpec::from_bounds(lower, n.at("extent").vec3(), res);
  } catch (const ConfigError& e) {
    if (std::string(e.what()).starts_with(n.path())) throw;
    n.fail(e.what());
  }
}

double round12(double v) { return std::round(v * 1e12) / 1e12; }

double to_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError(context + ": '" + s + "' is not a number");
  }
  return v;
}

int to_int(const std::string& s, const std::string& context) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(context + ": '" + s + "' is not an integer");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, const std::string& sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + sep.size();
  }
  return out;
}

}  // namespace

Scene parse_scene(const std::string& text, const std::string& origin,
                  const LabelRegistry& labels) {
  const json doc = parse_json(text, origin);
  const Node root(doc, origin);
  // Paths read "file: objects[0]...", so strip the root separator.
  auto rooted = [&](const char* key) {
    const auto n = root.find(key);
    return n ? std::optional<Node>(Node(n->value(), origin + ": " + key)) : std::nullopt;
  };
  root.only({"objects", "agents"});

  std::vector<SceneObject> objects;
  std::map<int, std::string> object_ids;
  if (auto objs = rooted("objects")) {
    for (const auto& item : objs->items()) {
      const Node o(item.value(), describe(item, item.value()));
      o.only({"id", "label", "geometry"});
      const int id = o.at("id").int32();
      if (auto [it, fresh] = object_ids.emplace(id, item.path()); !fresh) {
        o.at("id").fail("duplicate object id " + std::to_string(id) + " (first used at " +
                        it->second.substr(origin.size() + 2) + ")");
      }
      const Label label = parse_label(o.at("label"), labels);
      if (label == Label::Empty) o.at("label").fail("objects cannot be labelled 'empty'");
      const Node g = o.at("geometry");
      Geometry geom = parse_geometry(g);
      try {
        objects.emplace_back(id, std::move(geom), label);
      } catch (const Error& e) {
        g.fail(e.what());
      }
    }
  }

  std::vector<Agent> agents;
  std::map<int, std::string> agent_ids;
  const auto ags = rooted("agents");
  if (!ags) root.fail("missing field 'agents'");
  for (const auto& item : ags->items()) {
    const Node a(item.value(), describe(item, item.value()));
    a.only({"id", "pose", "sensor"});
    Agent agent;
    agent.id = a.at("id").int32();
    if (auto [it, fresh] = agent_ids.emplace(agent.id, item.path()); !fresh) {
      a.at("id").fail("duplicate agent id " + std::to_string(agent.id) + " (first used at " +
                      it->second.substr(origin.size() + 2) + ")");
    }
    agent.pose = parse_pose(a.at("pose"));
    if (auto s = a.find("sensor")) {
      s->only({"origin", "fov_deg", "max_range_m"});
      if (auto v = s->find("origin")) agent.sensor_origin = v->vec3();
      if (auto v = s->find("fov_deg")) agent.fov_deg = v->number();
      if (auto v = s->find("max_range_m")) agent.max_range = v->number();
    }
    try {
      agent.validate();
    } catch (const ConfigError& e) {
      a.fail(e.what());
    }
    agents.push_back(agent);
  }
  if (agents.empty()) ags->fail("a scene needs at least one agent");
  return Scene(std::move(objects), std::move(agents));
}

Scene load_scene(const std::filesystem::path& path, const LabelRegistry& labels) {
  return parse_scene(read_text(path), path.string(), labels);
}

std::string scene_to_json(const Scene& scene, const LabelRegistry& labels) {
  nlohmann::ordered_json doc;
  doc["objects"] = nlohmann::ordered_json::array();
  for (const auto& o : scene.objects()) {
    nlohmann::ordered_json j;
    j["id"] = o.id();
    j["label"] = std::string(labels.name(o.label()));
    if (const auto* obb = std::get_if<Obb>(&o.geometry())) {
      j["geometry"]["obb"] = {{"center", vec_json(obb->center)},
                              {"half_extents", vec_json(obb->half_extents)},
                              {"rotation", mat_json(obb->rotation)}};
    } else {
      const auto& pm = std::get<PosedMesh>(o.geometry());
      json verts = json::array();
      for (const auto& v : pm.mesh.vertices) verts.push_back(vec_json(v));
      json tris = json::array();
      for (const auto& t : pm.mesh.triangles) tris.push_back({t[0], t[1], t[2]});
      nlohmann::ordered_json mesh;
      mesh["vertices"] = verts;
      mesh["triangles"] = tris;
      mesh["pose"] = {{"rotation", mat_json(pm.pose.rotation)},
                      {"translation", vec_json(pm.pose.translation)}};
      j["geometry"]["mesh"] = mesh;
    }
    doc["objects"].push_back(j);
  }
  doc["agents"] = nlohmann::ordered_json::array();
  for (const auto& a : scene.agents()) {
    nlohmann::ordered_json j;
    j["id"] = a.id;
    j["pose"] = {{"rotation", mat_json(a.pose.rotation)},
                 {"translation", vec_json(a.pose.translation)}};
    j["sensor"] = {{"origin", vec_json(a.sensor_origin)},
                   {"fov_deg", a.fov_deg},
                   {"max_range_m", a.max_range}};
    doc["agents"].push_back(j);
  }
  return doc.dump(1) + "\n";
}

BenchConfig parse_config(const std::string& text, const std::string& origin) {
  const json doc = parse_json(text, origin);
  const Node root(doc, origin);
  auto field = [&](const char* key) {
    const auto n = root.find(key);
    return n ? std::optional<Node>(Node(n->value(), origin + ": " + key)) : std::nullopt;
  };
  root.only({"master", "ranges", "k", "noise", "include_noiseless", "seed", "classes",
             "gt_source", "fusion", "egos", "label_names", "workers"});

  BenchConfig cfg;
  if (auto n = field("label_names")) {
    if (!n->value().is_object()) n->fail("expected an object mapping codes to names");
    for (const auto& [key, value] : n->value().items()) {
      const Node entry(value, n->path() + "." + key);
      const int c = to_int(key, entry.path());
      if (!is_valid_code(static_cast<unsigned>(c)) || c < 0) entry.fail("label code out of range");
      try {
        cfg.labels.rename(static_cast<Label>(c), entry.string());
      } catch (const ConfigError& e) {
        entry.fail(e.what());
      }
    }
  }
  if (auto n = field("ranges")) {
    cfg.ranges.clear();
    for (const auto& r : n->items()) {
      try {
        if (r.value().is_number()) {
          cfg.ranges.push_back(benchmark_range(r.number()));
        } else {
          const GridSpec spec = parse_grid_spec(r);
          const auto name = r.find("name");
          cfg.ranges.push_back({name ? name->string() : r.path(), spec});
        }
      } catch (const ConfigError& e) {
        if (std::string(e.what()).starts_with(origin)) throw;
        r.fail(e.what());
      }
    }
  }
  if (auto n = field("master")) cfg.master = parse_grid_spec(*n);
  if (auto n = field("k")) {
    if (n->value().is_string()) {
      try {
        cfg.k_values = parse_int_list(n->string());
      } catch (const ConfigError& e) {
        n->fail(e.what());
      }
    } else {
      cfg.k_values.clear();
      for (const auto& k : n->items()) cfg.k_values.push_back(k.int32());
    }
  }
  if (auto n = field("noise")) {
    n->only({"mu", "sigma", "seed"});
    std::vector<double> mus;
    const Node mu = n->at("mu");
    if (mu.value().is_string()) {
      try {
        mus = parse_sweep(mu.string());
      } catch (const ConfigError& e) {
        mu.fail(e.what());
      }
    } else if (mu.value().is_number()) {
      mus.push_back(mu.number());
    } else {
      for (const auto& m : mu.items()) mus.push_back(m.number());
    }
    const double sigma = n->find("sigma") ? n->at("sigma").number() : 0.0;
    const std::uint64_t seed = n->find("seed") ? n->at("seed").uint64() : 0;
    for (double m : mus) {
      NoiseModel model{m, sigma, seed};
      try {
        model.validate();
      } catch (const ConfigError& e) {
        n->fail(e.what());
      }
      cfg.noise.push_back(model);
    }
  }
  if (auto n = field("include_noiseless")) cfg.include_noiseless = n->boolean();
  if (auto n = field("seed")) cfg.seed = n->uint64();
  if (auto n = field("classes")) {
    cfg.classes.clear();
    for (const auto& c : n->items()) {
      const Label l = parse_label(c, cfg.labels);
      if (l == Label::Empty) c.fail("'empty' cannot be an evaluated class");
      cfg.classes.push_back(l);
    }
  }
  if (auto n = field("gt_source")) {
    const auto s = n->string();
    if (s == "crop_downsample") {
      cfg.gt_source = GtSource::CropDownsample;
    } else if (s == "annotate") {
      cfg.gt_source = GtSource::Annotate;
    } else {
      n->fail("expected 'crop_downsample' or 'annotate'");
    }
  }
  if (auto n = field("fusion")) {
    const auto s = n->string();
    if (s == "first_valid") {
      cfg.fusion = FusionMode::FirstValid;
    } else if (s == "vote") {
      cfg.fusion = FusionMode::Vote;
    } else {
      n->fail("expected 'first_valid' or 'vote'");
    }
  }
  if (auto n = field("egos")) {
    for (const auto& e : n->items()) cfg.egos.push_back(e.int32());
  }
  if (auto n = field("workers")) cfg.workers = n->int32();
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

BenchConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text(path), path.string());
}

std::vector<double> parse_sweep(const std::string& text) {
  const auto parts = split(text, ":");
  if (parts.size() == 1) return {round12(to_double(parts[0], "sweep"))};
  if (parts.size() != 3) {
    throw ConfigError("sweep '" + text + "' must be start:stop:step");
  }
  const double start = to_double(parts[0], "sweep start");
  const double stop = to_double(parts[1], "sweep stop");
  const double step = to_double(parts[2], "sweep step");
  if (!(step > 0.0)) throw ConfigError("sweep step must be positive");
  if (stop < start) throw ConfigError("sweep stop is below its start");
  const double n = std::floor((stop - start) / step + 1e-9);
  if (n > 1e6) throw ConfigError("sweep has too many values");
  std::vector<double> out;
  for (long i = 0; i <= static_cast<long>(n); ++i) out.push_back(round12(start + i * step));
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const int a = to_int(text.substr(0, dots), "range start");
    const int b = to_int(text.substr(dots + 2), "range end");
    if (b < a) throw ConfigError("range '" + text + "' is empty");
    if (static_cast<long>(b) - a > 1000000) throw ConfigError("range is too long");
    std::vector<int> out;
    for (int v = a; v <= b; ++v) out.push_back(v);
    return out;
  }
  std::vector<int> out;
  for (const auto& p : split(text, ",")) out.push_back(to_int(p, "integer list"));
  return out;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& p : split(text, ",")) out.push_back(to_double(p, "number list"));
  return out;
}

}  // namespace covox
