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

// Python bindings. Label arrays are exposed as numpy uint8 arrays of shape
// (nx, ny, nz) in Fortran order, which matches the x-fastest storage.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "covox/annotator.hpp"
#include "covox/bench.hpp"
#include "covox/error.hpp"
#include "covox/fusion.hpp"
#include "covox/grid_io.hpp"
#include "covox/grid_ops.hpp"
#include "covox/scene_io.hpp"

namespace py = pybind11;
using namespace covox;

namespace {

using LabelArray = py::array_t<std::uint8_t, py::array::f_style | py::array::forcecast>;

py::array_t<std::uint8_t> to_numpy(const GridSpec& spec, const std::uint8_t* data) {
  const auto& d = spec.dims();
  py::array_t<std::uint8_t, py::array::f_style> out({d[0], d[1], d[2]});
  std::memcpy(out.mutable_data(), data, spec.voxel_count());
  return out;
}

py::array_t<std::uint8_t> labels_of(const VoxelGrid& g) {
  return to_numpy(g.spec(), reinterpret_cast<const std::uint8_t*>(g.labels().data()));
}

py::array_t<bool> mask_of(const VoxelMask& m) {
  const auto& d = m.spec().dims();
  py::array_t<bool, py::array::f_style> out({d[0], d[1], d[2]});
  auto* dst = out.mutable_data();
  const auto bits = m.data();
  for (std::size_t n = 0; n < bits.size(); ++n) dst[n] = bits[n] != 0;
  return out;
}

VoxelGrid grid_from(const GridSpec& spec, const LabelArray& a) {
  const auto& d = spec.dims();
  if (a.ndim() != 3 || a.shape(0) != d[0] || a.shape(1) != d[1] || a.shape(2) != d[2]) {
    throw GridError("label array shape does not match the grid dims");
  }
  std::vector<Label> labels(spec.voxel_count());
  std::memcpy(labels.data(), a.data(), labels.size());
  return VoxelGrid(spec, std::move(labels));
}

py::dict stats_dict(const AnnotationStats& s) {
  py::dict d;
  d["fine_checks_performed"] = s.fine_checks_performed;
  d["fine_checks_executed"] = s.fine_checks_executed;
  d["voxel_visits"] = s.voxel_visits;
  d["voxels_occupied"] = s.voxels_occupied;
  d["seed_count"] = s.seed_count;
  d["per_object"] = s.per_object;
  d["wall_time_s"] = s.wall_time_s;
  return d;
}

py::dict report_dict(const EvalReport& r) {
  py::dict iou;
  py::dict counts;
  const auto& names = LabelRegistry::defaults();
  for (const auto& [l, v] : r.per_class_iou) iou[py::str(std::string(names.name(l)))] = v;
  for (const auto& [l, c] : r.counts) {
    counts[py::str(std::string(names.name(l)))] = py::make_tuple(c.tp, c.fp, c.fn);
  }
  py::dict d;
  d["miou"] = r.miou ? py::object(py::float_(*r.miou)) : py::object(py::none());
  d["per_class_iou"] = iou;
  d["counts"] = counts;
  return d;
}

std::vector<Label> parse_classes(const std::optional<std::vector<std::string>>& names) {
  if (!names) return default_eval_classes();
  std::vector<Label> out;
  for (const auto& n : *names) {
    const auto l = LabelRegistry::defaults().find(n);
    if (!l || *l == Label::Empty) throw ConfigError("unknown class '" + n + "'");
    out.push_back(*l);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Semantic voxel annotation and collaborative perception benchmark";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", error.ptr());
  py::register_exception<GridError>(m, "GridError", error.ptr());
  py::register_exception<ResourceError>(m, "ResourceError", error.ptr());
  py::register_exception<GridFormatError>(m, "GridFormatError", error.ptr());

  m.def("label_name", [](int c) {
    if (c < 0 || !is_valid_code(static_cast<unsigned>(c))) throw ConfigError("label code out of range");
    return std::string(LabelRegistry::defaults().name(static_cast<Label>(c)));
  });
  m.def("label_code", [](const std::string& name) {
    const auto l = LabelRegistry::defaults().find(name);
    if (!l) throw ConfigError("unknown label '" + name + "'");
    return static_cast<int>(code(*l));
  });

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_static("from_bounds", &GridSpec::from_bounds, py::arg("lower"), py::arg("extent"),
                  py::arg("resolution"))
      .def_static("from_dims", &GridSpec::from_dims, py::arg("lower"), py::arg("dims"),
                  py::arg("resolution"))
      .def_static("centered", &GridSpec::centered, py::arg("extent"), py::arg("resolution"),
                  py::arg("z_min") = -2.0)
      .def_property_readonly("lower", &GridSpec::lower)
      .def_property_readonly("upper", &GridSpec::upper)
      .def_property_readonly("extent", &GridSpec::extent)
      .def_property_readonly("resolution", &GridSpec::resolution)
      .def_property_readonly("dims", &GridSpec::dims)
      .def_property_readonly("voxel_count", &GridSpec::voxel_count)
      .def("__repr__", [](const GridSpec& s) {
        const auto& d = s.dims();
        return "GridSpec(dims=(" + std::to_string(d[0]) + ", " + std::to_string(d[1]) + ", " +
               std::to_string(d[2]) + "), resolution=" + std::to_string(s.resolution()) + ")";
      });

  m.def("brute_force_op_count", [](const GridSpec& spec, std::size_t n) {
    const auto c = brute_force_op_count(spec, n);
    return py::make_tuple(c.voxel_visits, c.object_checks);
  }, py::arg("spec"), py::arg("num_objects"),
        "Returns (voxel_visits, object_checks) for exhaustive annotation.");

  py::class_<RigidTransform>(m, "RigidTransform")
      .def(py::init([](const Mat3& r, const Vec3& t) { return RigidTransform::make(r, t); }),
           py::arg("rotation"), py::arg("translation"))
      .def_static("identity", &RigidTransform::identity)
      .def_static("from_yaw", &RigidTransform::from_yaw, py::arg("yaw"), py::arg("translation"))
      .def_readonly("rotation", &RigidTransform::rotation)
      .def_readonly("translation", &RigidTransform::translation)
      .def("apply", &RigidTransform::apply)
      .def("inverse", &RigidTransform::inverse)
      .def("__mul__", &RigidTransform::operator*);

  m.def("relative_transform", &relative_transform, py::arg("ego"), py::arg("other"));

  py::class_<Agent>(m, "Agent")
      .def_readonly("id", &Agent::id)
      .def_readonly("pose", &Agent::pose)
      .def_readonly("sensor_origin", &Agent::sensor_origin)
      .def_readonly("fov_deg", &Agent::fov_deg)
      .def_readonly("max_range", &Agent::max_range);

  py::class_<Scene>(m, "Scene")
      .def_static("load", [](const std::filesystem::path& p) { return load_scene(p); })
      .def_static("parse", [](const std::string& text) { return parse_scene(text); })
      .def("to_json", [](const Scene& s) { return scene_to_json(s); })
      .def_property_readonly("num_objects", [](const Scene& s) { return s.objects().size(); })
      .def_property_readonly("agents", [](const Scene& s) {
        return std::vector<Agent>(s.agents().begin(), s.agents().end());
      })
      .def("agent", &Scene::agent, py::return_value_policy::copy)
      .def("expressed_in", &Scene::expressed_in);

  py::class_<VoxelGrid>(m, "VoxelGrid")
      .def(py::init(&grid_from), py::arg("spec"), py::arg("labels"))
      .def(py::init([](const GridSpec& s) { return VoxelGrid(s); }), py::arg("spec"))
      .def_property_readonly("spec", &VoxelGrid::spec)
      .def_property_readonly("labels", &labels_of)
      .def("count_non_empty", &VoxelGrid::count_non_empty)
      .def("__eq__", [](const VoxelGrid& a, const VoxelGrid& b) { return a == b; });

  m.def("annotate", [](const Scene& scene, const GridSpec& spec, int workers) {
    std::optional<Annotation> a;
    {
      py::gil_scoped_release release;
      a = annotate(scene, spec, {workers});
    }
    return py::make_tuple(a->grid, stats_dict(a->stats));
  }, py::arg("scene"), py::arg("spec"), py::arg("workers") = 0,
        "Returns (grid, stats).");

  m.def("brute_force_annotate", [](const Scene& scene, const GridSpec& spec, bool force,
                                   int workers) {
    BruteForceOptions opts;
    opts.force = force;
    opts.workers = workers;
    std::optional<Annotation> a;
    {
      py::gil_scoped_release release;
      a = brute_force_annotate(scene, spec, opts);
    }
    return py::make_tuple(a->grid, stats_dict(a->stats));
  }, py::arg("scene"), py::arg("spec"), py::arg("force") = false, py::arg("workers") = 0);

  m.def("write_grid", [](const VoxelGrid& g, const std::filesystem::path& p, bool dense) {
    write_grid(g, p, dense ? GridEncoding::Dense : GridEncoding::RunLength);
  }, py::arg("grid"), py::arg("path"), py::arg("dense") = false);
  m.def("read_grid", &read_grid, py::arg("path"));
  m.def("encode_grid", [](const VoxelGrid& g, bool dense) {
    const auto bytes = encode_grid(g, dense ? GridEncoding::Dense : GridEncoding::RunLength);
    return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  }, py::arg("grid"), py::arg("dense") = false);
  m.def("decode_grid", [](const py::bytes& b) {
    const std::string s = b;
    return decode_grid(std::vector<std::uint8_t>(s.begin(), s.end()));
  });

  m.def("downsample", &downsample, py::arg("grid"), py::arg("factor"));
  m.def("crop_to_range", &crop_to_range, py::arg("grid"), py::arg("spec"));
  m.def("warp_grid", [](const VoxelGrid& g, const RigidTransform& t, const GridSpec& spec) {
    auto w = warp_grid(g, t, spec);
    return py::make_tuple(w.grid, mask_of(w.mask));
  }, py::arg("grid"), py::arg("src_to_dst"), py::arg("dst_spec"),
        "Returns (warped grid, validity mask).");
  m.def("compute_visibility", [](const VoxelGrid& g, const Agent& a, const RigidTransform& pose) {
    return mask_of(compute_visibility(g, a, pose));
  }, py::arg("grid"), py::arg("agent"), py::arg("grid_pose") = RigidTransform::identity());

  m.def("evaluate", [](const VoxelGrid& pred, const VoxelGrid& gt,
                       const std::optional<std::vector<std::string>>& classes) {
    return report_dict(evaluate(pred, gt, parse_classes(classes)));
  }, py::arg("pred"), py::arg("gt"), py::arg("classes") = py::none());

  m.def("select_collaborators", [](const Scene& scene, int ego, int k) {
    std::vector<int> ids;
    for (const auto& a : select_collaborators(scene.agent(ego), scene.agents(), k)) {
      ids.push_back(a.id);
    }
    return ids;
  }, py::arg("scene"), py::arg("ego"), py::arg("k"));

  m.def("run_benchmark", [](const Scene& scene, const std::string& config_json) {
    const BenchConfig cfg = parse_config(config_json);
    BenchReport r;
    {
      py::gil_scoped_release release;
      r = run_benchmark(scene, cfg);
    }
    return py::make_tuple(r.to_jsonl(), r.table());
  }, py::arg("scene"), py::arg("config_json") = "{}",
        "Returns (report JSON lines, text table).");
}
