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

// covox: command-line front end. Every failure prints a single
// "covox: error: ..." line on stderr and exits nonzero.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "covox/annotator.hpp"
#include "covox/bench.hpp"
#include "covox/error.hpp"
#include "covox/fusion.hpp"
#include "covox/grid_io.hpp"
#include "covox/grid_ops.hpp"
#include "covox/parallel.hpp"
#include "covox/scene_io.hpp"

namespace fs = std::filesystem;
using namespace covox;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitMismatch = 3;

struct Failure {
  std::string message;
  int code = kExitFailure;
};

GridEncoding parse_encoding(const std::string& s) {
  if (s == "rle") return GridEncoding::RunLength;
  if (s == "dense") return GridEncoding::Dense;
  throw ConfigError("--encoding must be 'rle' or 'dense'");
}

Vec3 parse_vec3(const std::string& s, const char* flag) {
  const auto xs = parse_number_list(s);
  if (xs.size() != 3) throw ConfigError(std::string(flag) + " expects three comma-separated numbers");
  return {xs[0], xs[1], xs[2]};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

// Options shared by the commands that annotate a scene.
struct GridArgs {
  std::string extent = "100,100,7";
  double res = 0.1;
  double zmin = -2.0;
  std::string lower;
  int ego = -1;

  void add(CLI::App* cmd) {
    cmd->add_option("--extent", extent, "Grid size in metres, X,Y,Z (centred in x and y)");
    cmd->add_option("--res", res, "Voxel edge length in metres");
    cmd->add_option("--zmin", zmin, "Lower z bound in metres when --lower is not given");
    cmd->add_option("--lower", lower, "Explicit lower corner X,Y,Z in metres");
    cmd->add_option("--ego", ego, "Annotate in this agent's frame instead of the scene frame");
  }
  GridSpec spec() const {
    const Vec3 e = parse_vec3(extent, "--extent");
    if (!lower.empty()) return GridSpec::from_bounds(parse_vec3(lower, "--lower"), e, res);
    return GridSpec::centered(e, res, zmin);
  }
  Scene frame(const Scene& scene) const {
    return ego < 0 ? scene : scene.expressed_in(scene.agent(ego).pose);
  }
};

ordered_json stats_json(const AnnotationStats& s, const GridSpec& spec) {
  ordered_json j;
  j["dims"] = spec.dims();
  j["resolution_m"] = spec.resolution();
  j["fine_checks_performed"] = s.fine_checks_performed;
  j["fine_checks_executed"] = s.fine_checks_executed;
  j["voxel_visits"] = s.voxel_visits;
  j["voxels_occupied"] = s.voxels_occupied;
  j["seed_count"] = s.seed_count;
  ordered_json per = ordered_json::array();
  for (const auto& [id, n] : s.per_object) per.push_back({{"id", id}, {"voxels", n}});
  j["per_object"] = per;
  j["wall_time_s"] = s.wall_time_s;
  return j;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic voxel annotation and collaborative perception benchmark"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "covox 0.1.0");

  // annotate
  auto* annotate_cmd = app.add_subcommand("annotate", "Annotate a scene into a semantic grid");
  std::string scene_path, out_path, stats_path, encoding = "rle";
  GridArgs annotate_grid;
  annotate_cmd->add_option("--scene", scene_path, "Scene JSON file")->required();
  annotate_cmd->add_option("--out", out_path, "Output grid file")->required();
  annotate_cmd->add_option("--stats", stats_path, "Write annotation statistics as JSON");
  annotate_cmd->add_option("--encoding", encoding, "Grid payload encoding: rle or dense");
  annotate_grid.add(annotate_cmd);

  // oracle-check
  auto* oracle_cmd = app.add_subcommand(
      "oracle-check", "Compare the pipeline against exhaustive per-voxel annotation");
  GridArgs oracle_grid;
  bool force = false;
  oracle_cmd->add_option("--scene", scene_path, "Scene JSON file")->required();
  oracle_cmd->add_flag("--force", force, "Run the exhaustive pass even on very large grids");
  oracle_grid.add(oracle_cmd);

  // visibility
  auto* vis_cmd = app.add_subcommand("visibility", "Compute an agent's visible voxels");
  std::string grid_path, frame = "scene";
  int agent_id = 0;
  vis_cmd->add_option("--scene", scene_path, "Scene JSON file")->required();
  vis_cmd->add_option("--grid", grid_path, "Ground-truth grid file")->required();
  vis_cmd->add_option("--agent", agent_id, "Agent id")->required();
  vis_cmd->add_option("--out", out_path, "Output mask grid (code 1 = visible)")->required();
  vis_cmd->add_option("--frame", frame,
                      "Frame of the grid: 'scene' or the id of the agent it is expressed in");

  // fuse
  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse an ego observation with its collaborators");
  int ego_id = 0, k = 1;
  double mu = 0.0, sigma = 0.0, range = 51.2;
  std::uint64_t seed = 0;
  std::string mode = "first_valid", gt_out;
  fuse_cmd->add_option("--scene", scene_path, "Scene JSON file")->required();
  fuse_cmd->add_option("--ego", ego_id, "Ego agent id")->required();
  fuse_cmd->add_option("--k", k, "Number of collaborators (0..6)");
  fuse_cmd->add_option("--mu", mu, "Mean pose-noise offset in metres");
  fuse_cmd->add_option("--sigma", sigma, "Pose-noise standard deviation in metres");
  fuse_cmd->add_option("--seed", seed, "Pose-noise seed");
  fuse_cmd->add_option("--range", range, "Perception range in metres (256 voxels across)");
  fuse_cmd->add_option("--mode", mode, "first_valid or vote");
  fuse_cmd->add_option("--gt-out", gt_out, "Also write the ego ground truth");
  fuse_cmd->add_option("--out", out_path, "Output fused grid")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Per-class IoU and mIoU of a prediction");
  std::string pred_path, gt_path, classes;
  eval_cmd->add_option("--pred", pred_path, "Predicted grid")->required();
  eval_cmd->add_option("--gt", gt_path, "Ground-truth grid")->required();
  eval_cmd->add_option("--classes", classes, "Comma-separated class names or codes");
  eval_cmd->add_option("--out", out_path, "Report JSON")->required();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run the collaboration and pose-noise sweep");
  std::string config_path, ranges, k_list, mu_sweep, egos, gt_source;
  std::optional<double> bench_sigma;
  std::optional<std::uint64_t> bench_seed;
  bench_cmd->add_option("--scene", scene_path, "Scene JSON file")->required();
  bench_cmd->add_option("--config", config_path, "Benchmark configuration JSON");
  bench_cmd->add_option("--ranges", ranges, "Comma-separated ranges in metres");
  bench_cmd->add_option("--k", k_list, "Collaborator counts, e.g. 0..6 or 0,1,3");
  bench_cmd->add_option("--mu", mu_sweep, "Noise sweep start:stop:step (inclusive stop)");
  bench_cmd->add_option("--sigma", bench_sigma, "Noise standard deviation in metres");
  bench_cmd->add_option("--seed", bench_seed, "Global seed");
  bench_cmd->add_option("--egos", egos, "Comma-separated ego ids (default: all agents)");
  bench_cmd->add_option("--gt-source", gt_source, "crop_downsample or annotate");
  bench_cmd->add_option("--out", out_path, "Output directory")->required();

  // downsample
  auto* down_cmd = app.add_subcommand("downsample", "Coarsen a grid by an integer factor");
  std::string in_path;
  int factor = 2;
  down_cmd->add_option("--in", in_path, "Input grid")->required();
  down_cmd->add_option("--factor", factor, "Integer factor applied to every axis")->required();
  down_cmd->add_option("--out", out_path, "Output grid")->required();
  down_cmd->add_option("--encoding", encoding, "Grid payload encoding: rle or dense");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "covox: error: " << one_line(e.what()) << "\n";
    return e.get_exit_code() != 0 ? e.get_exit_code() : kExitFailure;
  }

  try {
    const int workers = default_workers();
    if (*annotate_cmd) {
      const GridSpec spec = annotate_grid.spec();
      const Scene scene = annotate_grid.frame(load_scene(scene_path));
      const auto result = annotate(scene, spec, {workers});
      write_grid(result.grid, out_path, parse_encoding(encoding));
      if (!stats_path.empty()) write_text(stats_path, stats_json(result.stats, spec).dump(2) + "\n");
      std::cout << "annotated " << result.stats.voxels_occupied << " of " << spec.voxel_count()
                << " voxels with " << result.stats.fine_checks_performed << " fine checks in "
                << result.stats.wall_time_s << " s\n";
    } else if (*oracle_cmd) {
      const GridSpec spec = oracle_grid.spec();
      const Scene scene = oracle_grid.frame(load_scene(scene_path));
      const auto fast = annotate(scene, spec, {workers});
      BruteForceOptions bf;
      bf.force = force;
      bf.workers = workers;
      const auto slow = brute_force_annotate(scene, spec, bf);
      std::size_t mismatches = 0;
      for (std::size_t n = 0; n < spec.voxel_count(); ++n) {
        if (fast.grid[n] != slow.grid[n]) ++mismatches;
      }
      const double ratio = slow.stats.fine_checks_performed == 0
                               ? 0.0
                               : double(fast.stats.fine_checks_performed) /
                                     double(slow.stats.fine_checks_performed);
      std::cout << "voxels " << spec.voxel_count() << "\n"
                << "mismatches " << mismatches << "\n"
                << "pipeline_fine_checks " << fast.stats.fine_checks_performed << "\n"
                << "brute_force_fine_checks " << slow.stats.fine_checks_performed << "\n"
                << "brute_force_fine_checks_executed " << slow.stats.fine_checks_executed << "\n"
                << "ratio " << ratio << "\n";
      if (mismatches != 0) {
        throw Failure{std::to_string(mismatches) + " voxels differ from the exhaustive oracle",
                      kExitMismatch};
      }
    } else if (*vis_cmd) {
      const Scene scene = load_scene(scene_path);
      const VoxelGrid gt = read_grid(grid_path);
      RigidTransform grid_pose = RigidTransform::identity();
      if (frame != "scene") {
        const auto ids = parse_int_list(frame);
        if (ids.size() != 1) throw ConfigError("--frame must be 'scene' or one agent id");
        grid_pose = scene.agent(ids[0]).pose;
      }
      const auto vis = compute_visibility(gt, scene.agent(agent_id), grid_pose, workers);
      VoxelGrid mask(gt.spec());
      for (std::size_t n = 0; n < vis.size(); ++n) {
        if (vis[n]) mask[n] = static_cast<Label>(1);
      }
      write_grid(mask, out_path);
      std::cout << "visible " << vis.count() << " of " << vis.size() << " voxels\n";
    } else if (*fuse_cmd) {
      const Scene scene = load_scene(scene_path);
      if (k < 0 || k > kMaxCollaborators) throw ConfigError("--k must lie in 0..6");
      NoiseModel noise{mu, sigma, seed};
      noise.validate();
      FusionMode fm = FusionMode::FirstValid;
      if (mode == "vote") {
        fm = FusionMode::Vote;
      } else if (mode != "first_valid") {
        throw ConfigError("--mode must be 'first_valid' or 'vote'");
      }
      BenchConfig cfg;
      cfg.ranges = {benchmark_range(range)};
      cfg.k_values = {k};
      cfg.noise = {noise};
      cfg.include_noiseless = false;
      cfg.egos = {ego_id};
      cfg.fusion = fm;
      cfg.seed = seed;
      cfg.workers = workers;
      const auto cell = run_cell(scene, cfg, ego_id, 0, k, noise);
      write_grid(cell.fused.grid, out_path);
      if (!gt_out.empty()) write_grid(cell.gt, gt_out);
      std::cout << "collaborators";
      for (int id : cell.collaborators) std::cout << ' ' << id;
      std::cout << "\nmIoU "
                << (cell.report.miou ? std::to_string(*cell.report.miou) : std::string("n/a"))
                << "\n";
    } else if (*eval_cmd) {
      const VoxelGrid pred = read_grid(pred_path);
      const VoxelGrid gt = read_grid(gt_path);
      std::vector<Label> cls = default_eval_classes();
      if (!classes.empty()) {
        cls.clear();
        std::size_t start = 0;
        while (start <= classes.size()) {
          const auto end = std::min(classes.find(',', start), classes.size());
          const std::string name = classes.substr(start, end - start);
          const auto l = LabelRegistry::defaults().find(name);
          if (!l || *l == Label::Empty) throw ConfigError("--classes: unknown class '" + name + "'");
          cls.push_back(*l);
          start = end + 1;
        }
      }
      const auto rep = evaluate(pred, gt, cls);
      ordered_json j;
      j["miou"] = rep.miou ? ordered_json(*rep.miou) : ordered_json(nullptr);
      ordered_json iou = ordered_json::object();
      ordered_json counts = ordered_json::object();
      for (Label l : rep.evaluated_classes) {
        const std::string name(LabelRegistry::defaults().name(l));
        const auto it = rep.per_class_iou.find(l);
        iou[name] = it == rep.per_class_iou.end() ? ordered_json(nullptr) : ordered_json(it->second);
        const auto& c = rep.counts.at(l);
        counts[name] = {c.tp, c.fp, c.fn};
      }
      j["per_class_iou"] = iou;
      j["counts"] = counts;
      write_text(out_path, j.dump(2) + "\n");
      std::cout << "mIoU " << (rep.miou ? std::to_string(*rep.miou) : std::string("n/a")) << "\n";
    } else if (*bench_cmd) {
      BenchConfig cfg = config_path.empty() ? BenchConfig{} : load_config(config_path);
      const Scene scene = load_scene(scene_path, cfg.labels);
      if (!ranges.empty()) {
        cfg.ranges.clear();
        for (double r : parse_number_list(ranges)) cfg.ranges.push_back(benchmark_range(r));
      }
      if (!k_list.empty()) cfg.k_values = parse_int_list(k_list);
      if (!mu_sweep.empty() || bench_sigma) {
        const double s = bench_sigma.value_or(cfg.noise.empty() ? 0.0 : cfg.noise.front().sigma);
        const std::uint64_t ns = cfg.noise.empty() ? 0 : cfg.noise.front().seed;
        std::vector<double> mus;
        if (!mu_sweep.empty()) {
          mus = parse_sweep(mu_sweep);
        } else {
          for (const auto& n : cfg.noise) mus.push_back(n.mu);
        }
        cfg.noise.clear();
        for (double m : mus) cfg.noise.push_back({m, s, ns});
      }
      if (bench_seed) cfg.seed = *bench_seed;
      if (!egos.empty()) cfg.egos = parse_int_list(egos);
      if (gt_source == "annotate") {
        cfg.gt_source = GtSource::Annotate;
      } else if (gt_source == "crop_downsample") {
        cfg.gt_source = GtSource::CropDownsample;
      } else if (!gt_source.empty()) {
        throw ConfigError("--gt-source must be 'crop_downsample' or 'annotate'");
      }
      cfg.workers = workers;
      const auto report = run_benchmark(scene, cfg);
      fs::create_directories(out_path);
      write_text(fs::path(out_path) / "report.jsonl", report.to_jsonl());
      write_text(fs::path(out_path) / "timings.jsonl", report.timings_jsonl());
      const std::string table = report.table();
      write_text(fs::path(out_path) / "table.txt", table);
      std::cout << table;
      std::size_t failed = 0;
      for (const auto& c : report.cells) failed += c.error.empty() ? 0 : 1;
      if (failed != 0) {
        throw Failure{std::to_string(failed) + " of " + std::to_string(report.cells.size()) +
                      " benchmark cells failed; see report.jsonl"};
      }
    } else if (*down_cmd) {
      const VoxelGrid in = read_grid(in_path);
      write_grid(downsample(in, factor), out_path, parse_encoding(encoding));
    }
  } catch (const Failure& f) {
    std::cerr << "covox: error: " << one_line(f.message) << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "covox: error: " << one_line(e.what()) << "\n";
    return kExitFailure;
  }
  return 0;
}
