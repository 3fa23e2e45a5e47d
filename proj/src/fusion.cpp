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

#include "covox/fusion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "covox/error.hpp"
#include "covox/grid_ops.hpp"
#include "covox/parallel.hpp"

namespace covox {

std::vector<Agent> select_collaborators(const Agent& ego,
                                        std::span<const Agent> others, int k) {
  std::vector<std::pair<double, const Agent*>> ranked;
  for (const auto& a : others) {
    if (a.id == ego.id) continue;
    ranked.emplace_back((a.position() - ego.position()).norm(), &a);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    return x.first < y.first || (x.first == y.first && x.second->id < y.second->id);
  });
  const auto n = static_cast<std::size_t>(
      std::clamp(k, 0, kMaxCollaborators));
  std::vector<Agent> out;
  for (std::size_t i = 0; i < std::min(n, ranked.size()); ++i) {
    out.push_back(*ranked[i].second);
  }
  return out;
}

void NoiseModel::validate() const {
  if (!std::isfinite(mu) || !std::isfinite(sigma) || mu < 0.0 || sigma < 0.0) {
    throw ConfigError("noise mu and sigma must be finite and non-negative");
  }
}

RigidTransform perturb_transform(const RigidTransform& t,
                                 const NoiseModel& noise,
                                 std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double z = gauss(rng);
  const double theta = angle(rng);
  const double magnitude = std::max(0.0, noise.mu + noise.sigma * z);
  RigidTransform out = t;
  out.translation.x() += magnitude * std::cos(theta);
  out.translation.y() += magnitude * std::sin(theta);
  return out;
}

FusionResult fuse(const Observation& ego, std::span<const NeighborView> neighbors,
                  const GridSpec& spec, FusionMode mode, int workers) {
  if (!ego.grid.spec().approx_equal(spec) || !ego.observed.spec().approx_equal(spec)) {
    throw GridError("ego observation does not match the fusion grid");
  }
  struct Source {
    const VoxelGrid* grid;
    const ObservedMask* observed;
    RigidTransform to_neighbor;
  };
  std::vector<Source> sources;
  sources.reserve(neighbors.size());
  for (const auto& n : neighbors) {
    if (n.grid == nullptr || n.observed == nullptr) {
      throw GridError("neighbor view is missing its grid or mask");
    }
    if (!n.grid->spec().approx_equal(n.observed->spec())) {
      throw GridError("neighbor grid and observed mask differ in shape");
    }
    sources.push_back({n.grid, n.observed, n.to_ego.inverse()});
  }

  FusionResult out{ego.grid, ego.observed};
  auto labels = out.grid.labels();
  auto defined = out.defined.data();
  const auto& dims = spec.dims();
  // Label a neighbor contributes at v, if its hybrid mask holds there.
  auto sample = [&](const Source& src, const VoxelIndex& v) -> std::optional<Label> {
    const auto s = warp_source(src.grid->spec(), src.to_neighbor, spec, v);
    if (!s) return std::nullopt;
    const std::size_t n = src.grid->spec().linear(*s);
    if (!(*src.observed)[n]) return std::nullopt;
    return (*src.grid)[n];
  };
  parallel_for(static_cast<std::size_t>(dims[2]), workers, [&](std::size_t kk) {
    std::array<int, kLabelCount> votes{};
    std::vector<std::optional<Label>> found(sources.size());
    for (int j = 0; j < dims[1]; ++j) {
      for (int i = 0; i < dims[0]; ++i) {
        const VoxelIndex v{i, j, static_cast<int>(kk)};
        const std::size_t d = spec.linear(v);
        if (ego.observed[d]) continue;
        labels[d] = Label::Empty;
        if (mode == FusionMode::FirstValid) {
          for (const auto& src : sources) {
            if (const auto l = sample(src, v)) {
              labels[d] = *l;
              defined[d] = 1;
              break;
            }
          }
          continue;
        }
        votes.fill(0);
        int top = 0;
        for (std::size_t n = 0; n < sources.size(); ++n) {
          found[n] = sample(sources[n], v);
          if (found[n]) top = std::max(top, ++votes[code(*found[n])]);
        }
        if (top == 0) continue;
        for (const auto& l : found) {
          if (l && votes[code(*l)] == top) {
            labels[d] = *l;
            defined[d] = 1;
            break;
          }
        }
      }
    }
  });
  return out;
}

EvalReport evaluate(const VoxelGrid& pred, const VoxelGrid& gt,
                    std::span<const Label> classes) {
  if (!pred.spec().approx_equal(gt.spec())) {
    throw GridError("prediction and ground truth grids differ in shape or placement");
  }
  std::array<std::uint64_t, kLabelCount> in_pred{};
  std::array<std::uint64_t, kLabelCount> in_gt{};
  std::array<std::uint64_t, kLabelCount> both{};
  const auto p = pred.labels();
  const auto g = gt.labels();
  for (std::size_t v = 0; v < p.size(); ++v) {
    const auto pc = code(p[v]);
    const auto gc = code(g[v]);
    ++in_pred[pc];
    ++in_gt[gc];
    if (pc == gc) ++both[pc];
  }

  EvalReport report;
  report.evaluated_classes.assign(classes.begin(), classes.end());
  double sum = 0.0;
  for (Label c : classes) {
    const auto n = code(c);
    const ClassCounts counts{both[n], in_pred[n] - both[n], in_gt[n] - both[n]};
    report.counts[c] = counts;
    const std::uint64_t denom = counts.tp + counts.fp + counts.fn;
    if (denom == 0) continue;
    const double iou = static_cast<double>(counts.tp) / static_cast<double>(denom);
    report.per_class_iou[c] = iou;
  }
  for (const auto& [label, iou] : report.per_class_iou) sum += iou;
  if (!report.per_class_iou.empty()) {
    report.miou = sum / static_cast<double>(report.per_class_iou.size());
  }
  return report;
}

EvalReport evaluate(const VoxelGrid& pred, const VoxelGrid& gt) {
  const auto classes = default_eval_classes();
  return evaluate(pred, gt, classes);
}

}  // namespace covox
