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

#include "covox/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "covox/annotator.hpp"
#include "covox/error.hpp"
#include "covox/grid_ops.hpp"
#include "covox/parallel.hpp"

namespace covox {

namespace {

using Clock = std::chrono::steady_clock;
using ordered_json = nlohmann::ordered_json;

constexpr double kMasterResolution = 0.1;
constexpr int kRangeVoxels = 256;
constexpr double kRangeHeight = 4.8;
constexpr double kRangeZMin = -2.0;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (auto p : parts) h = splitmix(h ^ splitmix(p));
  return h;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string format_range(double r) {
  std::ostringstream s;
  s << r << "m";
  return s.str();
}

// Ground truth and observation of one agent at one range, in its own frame.
struct AgentView {
  std::optional<VoxelGrid> gt;
  std::optional<Observation> obs;
  std::string gt_source;
  std::string error;
  double prep_s = 0.0;
};

std::optional<VoxelGrid> gt_from_master(const VoxelGrid& master,
                                        const GridSpec& target) {
  const double ratio = target.resolution() / master.spec().resolution();
  const int factor = static_cast<int>(std::lround(ratio));
  if (factor < 1 || std::abs(ratio - factor) > 1e-9 * factor) return std::nullopt;
  const auto& d = target.dims();
  try {
    const GridSpec fine = GridSpec::from_dims(
        target.lower(), {d[0] * factor, d[1] * factor, d[2] * factor},
        master.spec().resolution());
    VoxelGrid cropped = crop_to_range(master, fine);
    return factor == 1 ? cropped : downsample(cropped, factor);
  } catch (const GridError&) {
    return std::nullopt;
  }
}

// Ground truth, visibility and observation of one agent at every range.
std::vector<AgentView> make_views(const Scene& scene, const Agent& agent,
                                  const BenchConfig& config, int workers) {
  std::vector<AgentView> out(config.ranges.size());
  const Scene local = scene.expressed_in(agent.pose);
  const AnnotateOptions opts{workers};
  std::optional<VoxelGrid> master_gt;
  if (config.gt_source == GtSource::CropDownsample) {
    const GridSpec master = config.master.value_or(master_for(config.ranges));
    try {
      master_gt = annotate(local, master, opts).grid;
    } catch (const Error&) {
      // Every range falls back to direct annotation.
    }
  }
  for (std::size_t r = 0; r < out.size(); ++r) {
    auto& v = out[r];
    const auto t0 = Clock::now();
    try {
      const GridSpec& spec = config.ranges[r].spec;
      if (master_gt) v.gt = gt_from_master(*master_gt, spec);
      if (v.gt) {
        v.gt_source = "crop_downsample";
      } else {
        v.gt = annotate(local, spec, opts).grid;
        v.gt_source = "annotate";
      }
      const auto vis = compute_visibility(*v.gt, agent, agent.pose, workers);
      v.obs = observed_grid(*v.gt, vis);
    } catch (const Error& e) {
      v.error = "agent " + std::to_string(agent.id) + ": " + e.what();
      v.gt.reset();
      v.obs.reset();
    }
    v.prep_s = seconds_since(t0);
  }
  return out;
}

RigidTransform neighbor_to_ego(const BenchConfig& config, const Agent& ego,
                               const Agent& neighbor, std::size_t range_index,
                               const NoiseModel& noise) {
  RigidTransform to_ego = relative_transform(ego.pose, neighbor.pose);
  if (noise.noiseless()) return to_ego;
  std::mt19937_64 rng(mix({config.seed, noise.seed, static_cast<std::uint64_t>(ego.id),
                           static_cast<std::uint64_t>(range_index),
                           static_cast<std::uint64_t>(neighbor.id)}));
  return perturb_transform(to_ego, noise, rng);
}

std::string cell_key(const CellResult& c, const BenchConfig& cfg) {
  std::ostringstream s;
  s << c.ego_id << '/' << cfg.ranges[c.range_index].name << '/' << c.k << '/'
    << c.noise_index;
  return s.str();
}

}  // namespace

RangeSetting benchmark_range(double range_m) {
  if (!(range_m > 0.0) || !std::isfinite(range_m)) {
    throw ConfigError("range must be positive and finite");
  }
  const double res = range_m / kRangeVoxels;
  const int nz = static_cast<int>(std::lround(kRangeHeight / res));
  if (nz < 1 || std::abs(nz * res - kRangeHeight) > 1e-9 * kRangeHeight) {
    throw ConfigError("range " + format_range(range_m) +
                      " does not divide the 4.8 m height into whole voxels");
  }
  const Vec3 lower(-0.5 * range_m, -0.5 * range_m, kRangeZMin);
  return {format_range(range_m),
          GridSpec::from_dims(lower, {kRangeVoxels, kRangeVoxels, nz}, res)};
}

std::vector<RangeSetting> default_ranges() {
  return {benchmark_range(25.6), benchmark_range(51.2), benchmark_range(76.8)};
}

GridSpec master_for(const std::vector<RangeSetting>& ranges) {
  if (ranges.empty()) throw ConfigError("no ranges configured");
  Aabb box = Aabb::empty();
  for (const auto& r : ranges) box.expand(r.spec.bounds());
  GridShape dims{};
  for (int a = 0; a < 3; ++a) {
    dims[a] = static_cast<int>(
        std::ceil((box.max[a] - box.min[a]) / kMasterResolution - 1e-6));
  }
  return GridSpec::from_dims(box.min, dims, kMasterResolution);
}

void BenchConfig::validate() const {
  if (ranges.empty()) throw ConfigError("bench: no ranges configured");
  if (k_values.empty()) throw ConfigError("bench: no k values configured");
  for (int k : k_values) {
    if (k < 0 || k > kMaxCollaborators) {
      throw ConfigError("bench: k must lie in 0.." + std::to_string(kMaxCollaborators) +
                        ", got " + std::to_string(k));
    }
  }
  for (const auto& n : noise) n.validate();
  if (noise_models().empty()) throw ConfigError("bench: no noise models configured");
  if (classes.empty()) throw ConfigError("bench: empty class list");
  for (Label c : classes) {
    if (c == Label::Empty) throw ConfigError("bench: 'empty' cannot be evaluated");
  }
}

std::vector<NoiseModel> BenchConfig::noise_models() const {
  std::vector<NoiseModel> out;
  const bool has_noiseless = std::any_of(noise.begin(), noise.end(),
                                         [](const NoiseModel& n) { return n.noiseless(); });
  if (include_noiseless && !has_noiseless) out.push_back(NoiseModel{0.0, 0.0, 0});
  out.insert(out.end(), noise.begin(), noise.end());
  return out;
}

BenchReport run_benchmark(const Scene& scene, const BenchConfig& config) {
  config.validate();
  BenchReport out;
  out.config = config;
  out.noise_models = config.noise_models();
  const int workers = resolve_workers(config.workers);

  std::vector<const Agent*> egos;
  if (config.egos.empty()) {
    for (const auto& a : scene.agents()) egos.push_back(&a);
  } else {
    for (int id : config.egos) egos.push_back(&scene.agent(id));
  }
  const int k_max = *std::max_element(config.k_values.begin(), config.k_values.end());

  // Agents whose views are needed, in scene order.
  std::set<int> needed;
  std::map<int, std::vector<Agent>> collaborators_of;
  for (const Agent* e : egos) {
    needed.insert(e->id);
    auto nbs = select_collaborators(*e, scene.agents(), k_max);
    for (const auto& n : nbs) needed.insert(n.id);
    collaborators_of[e->id] = std::move(nbs);
  }

  const std::size_t nr = config.ranges.size();
  std::map<int, std::vector<AgentView>> views;
  for (const auto& agent : scene.agents()) {
    if (needed.contains(agent.id)) views[agent.id] = make_views(scene, agent, config, workers);
  }

  for (const Agent* e : egos) {
    for (std::size_t r = 0; r < nr; ++r) {
      for (int k : config.k_values) {
        for (std::size_t n = 0; n < out.noise_models.size(); ++n) {
          CellResult c;
          c.ego_id = e->id;
          c.range_index = r;
          c.k = k;
          c.noise_index = n;
          c.noise = out.noise_models[n];
          const auto& all = collaborators_of[e->id];
          for (std::size_t i = 0; i < std::min<std::size_t>(k, all.size()); ++i) {
            c.collaborators.push_back(all[i].id);
          }
          out.cells.push_back(std::move(c));
        }
      }
    }
  }

  parallel_for(out.cells.size(), workers, [&](std::size_t idx) {
    CellResult& c = out.cells[idx];
    const auto t0 = Clock::now();
    try {
      const Agent& ego = scene.agent(c.ego_id);
      const AgentView& ev = views.at(c.ego_id)[c.range_index];
      c.gt_source = ev.gt_source;
      if (!ev.error.empty()) throw Error(ev.error);
      std::vector<NeighborView> nbs;
      for (int id : c.collaborators) {
        const AgentView& nv = views.at(id)[c.range_index];
        if (!nv.error.empty()) throw Error(nv.error);
        nbs.push_back({&nv.obs->grid, &nv.obs->observed,
                       neighbor_to_ego(config, ego, scene.agent(id), c.range_index, c.noise)});
      }
      const auto& spec = config.ranges[c.range_index].spec;
      const auto fused = fuse(*ev.obs, nbs, spec, config.fusion, 1);
      c.report = evaluate(fused.grid, *ev.gt, config.classes);
    } catch (const Error& err) {
      c.error = err.what();
    }
    c.wall_time_s = seconds_since(t0);
  });
  return out;
}

std::string BenchReport::to_jsonl() const {
  std::ostringstream s;
  for (const auto& c : cells) {
    const auto& range = config.ranges[c.range_index];
    ordered_json j;
    j["ego"] = c.ego_id;
    j["range"] = range.name;
    j["resolution_m"] = range.spec.resolution();
    j["dims"] = range.spec.dims();
    j["k"] = c.k;
    j["collaborators"] = c.collaborators;
    j["mu"] = c.noise.mu;
    j["sigma"] = c.noise.sigma;
    j["noise_seed"] = c.noise.seed;
    j["seed"] = config.seed;
    j["gt_source"] = c.gt_source;
    if (c.report) {
      const auto& rep = *c.report;
      j["miou"] = rep.miou ? ordered_json(*rep.miou) : ordered_json(nullptr);
      ordered_json iou = ordered_json::object();
      ordered_json counts = ordered_json::object();
      for (Label l : rep.evaluated_classes) {
        const std::string name(config.labels.name(l));
        const auto it = rep.per_class_iou.find(l);
        iou[name] = it == rep.per_class_iou.end() ? ordered_json(nullptr)
                                                  : ordered_json(it->second);
        const auto& n = rep.counts.at(l);
        counts[name] = {n.tp, n.fp, n.fn};
      }
      j["per_class_iou"] = std::move(iou);
      j["counts"] = std::move(counts);
    } else {
      j["miou"] = nullptr;
      j["error"] = c.error;
    }
    s << j.dump() << '\n';
  }
  return s.str();
}

std::string BenchReport::timings_jsonl() const {
  std::ostringstream s;
  for (const auto& c : cells) {
    ordered_json j;
    j["cell"] = cell_key(c, config);
    j["wall_time_s"] = c.wall_time_s;
    s << j.dump() << '\n';
  }
  return s.str();
}

std::optional<double> BenchReport::mean_miou(std::size_t range_index, int k,
                                             std::size_t noise_index) const {
  double sum = 0.0;
  int n = 0;
  for (const auto& c : cells) {
    if (c.range_index != range_index || c.k != k || c.noise_index != noise_index) continue;
    if (!c.report || !c.report->miou) continue;
    sum += *c.report->miou;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

std::string BenchReport::table() const {
  std::ostringstream s;
  auto pct = [](std::optional<double> v) {
    if (!v) return std::string("-");
    std::ostringstream o;
    o << std::fixed << std::setprecision(1) << 100.0 * *v;
    return o.str();
  };
  auto mean_class = [&](std::size_t r, int k, std::size_t n, Label l) -> std::optional<double> {
    double sum = 0.0;
    int count = 0;
    for (const auto& c : cells) {
      if (c.range_index != r || c.k != k || c.noise_index != n || !c.report) continue;
      const auto it = c.report->per_class_iou.find(l);
      if (it == c.report->per_class_iou.end()) continue;
      sum += it->second;
      ++count;
    }
    if (count == 0) return std::nullopt;
    return sum / count;
  };

  std::size_t base = 0;
  for (std::size_t n = 0; n < noise_models.size(); ++n) {
    if (noise_models[n].noiseless()) {
      base = n;
      break;
    }
  }
  const auto& nm = noise_models[base];
  s << "IoU (%) by range and collaborators, mu=" << nm.mu << " sigma=" << nm.sigma << "\n";
  s << std::left << std::setw(8) << "range" << std::right << std::setw(3) << "k";
  std::vector<int> widths;
  for (Label l : config.classes) {
    const std::string name(config.labels.name(l));
    widths.push_back(std::max<int>(6, static_cast<int>(name.size())) + 1);
    s << std::setw(widths.back()) << name;
  }
  s << std::setw(7) << "mIoU" << "\n";
  for (std::size_t r = 0; r < config.ranges.size(); ++r) {
    for (int k : config.k_values) {
      s << std::left << std::setw(8) << config.ranges[r].name << std::right
        << std::setw(3) << k;
      for (std::size_t c = 0; c < config.classes.size(); ++c) {
        s << std::setw(widths[c]) << pct(mean_class(r, k, base, config.classes[c]));
      }
      s << std::setw(7) << pct(mean_miou(r, k, base)) << "\n";
    }
  }

  const int k_max = *std::max_element(config.k_values.begin(), config.k_values.end());
  s << "\nmIoU (%) by pose noise, k=" << k_max << "\n";
  s << std::left << std::setw(8) << "mu" << std::setw(8) << "sigma" << std::right;
  for (const auto& r : config.ranges) {
    s << std::setw(std::max<int>(8, static_cast<int>(r.name.size()) + 1)) << r.name;
  }
  s << "\n";
  for (std::size_t n = 0; n < noise_models.size(); ++n) {
    s << std::left << std::setw(8) << noise_models[n].mu << std::setw(8)
      << noise_models[n].sigma << std::right;
    for (std::size_t r = 0; r < config.ranges.size(); ++r) {
      s << std::setw(std::max<int>(8, static_cast<int>(config.ranges[r].name.size()) + 1))
        << pct(mean_miou(r, k_max, n));
    }
    s << "\n";
  }
  return s.str();
}

CellOutput run_cell(const Scene& scene, const BenchConfig& config, int ego_id,
                    std::size_t range_index, int k, const NoiseModel& noise) {
  config.validate();
  noise.validate();
  if (range_index >= config.ranges.size()) throw ConfigError("range index out of range");
  if (k < 0 || k > kMaxCollaborators) throw ConfigError("k must lie in 0..6");
  const int workers = resolve_workers(config.workers);
  BenchConfig one = config;
  one.ranges = {config.ranges[range_index]};
  if (!one.master) one.master = master_for(config.ranges);
  const Agent& ego = scene.agent(ego_id);
  auto view = [&](const Agent& a) {
    auto v = std::move(make_views(scene, a, one, workers).front());
    if (!v.error.empty()) throw Error(v.error);
    return v;
  };
  AgentView ev = view(ego);
  const auto collaborators = select_collaborators(ego, scene.agents(), k);
  std::vector<AgentView> nvs;
  std::vector<NeighborView> nbs;
  nvs.reserve(collaborators.size());
  for (const auto& c : collaborators) {
    nvs.push_back(view(c));
    nbs.push_back({&nvs.back().obs->grid, &nvs.back().obs->observed,
                   neighbor_to_ego(config, ego, c, range_index, noise)});
  }
  const GridSpec& spec = config.ranges[range_index].spec;
  auto fused = fuse(*ev.obs, nbs, spec, config.fusion, workers);
  auto report = evaluate(fused.grid, *ev.gt, config.classes);
  std::vector<int> ids;
  for (const auto& c : collaborators) ids.push_back(c.id);
  return {std::move(*ev.gt), std::move(*ev.obs), std::move(fused), std::move(report),
          std::move(ids)};
}

}  // namespace covox
