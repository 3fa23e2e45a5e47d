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

#include "covox/bvh.hpp"

#include <algorithm>
#include <numeric>

namespace covox {

Bvh::Bvh(std::span<const Aabb> boxes) : boxes_(boxes.begin(), boxes.end()) {
  if (boxes_.empty()) return;
  order_.resize(boxes_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * boxes_.size());
  build(0, static_cast<std::uint32_t>(boxes_.size()), 0);
}

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end, int depth) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();

  Aabb bounds = Aabb::empty();
  for (std::uint32_t i = begin; i < end; ++i) bounds.expand(boxes_[order_[i]]);
  nodes_[index].bounds = bounds;

  const std::uint32_t count = end - begin;
  if (count <= kLeafSize || depth >= 60) {
    nodes_[index].first = begin;
    nodes_[index].count = count;
    return index;
  }

  int axis = 0;
  const Vec3 size = bounds.size();
  if (size[1] > size[axis]) axis = 1;
  if (size[2] > size[axis]) axis = 2;

  // Full sort with an id tie-break keeps the split independent of the
  // standard library's partial-sort strategy.
  std::sort(order_.begin() + begin, order_.begin() + end,
            [&](std::uint32_t a, std::uint32_t b) {
              const double ca = boxes_[a].min[axis] + boxes_[a].max[axis];
              const double cb = boxes_[b].min[axis] + boxes_[b].max[axis];
              return ca < cb || (ca == cb && a < b);
            });
  const std::uint32_t mid = begin + count / 2;
  const std::uint32_t left = build(begin, mid, depth + 1);
  const std::uint32_t right = build(mid, end, depth + 1);
  nodes_[index].first = left;
  nodes_[index].right = right;
  nodes_[index].count = 0;
  return index;
}

std::vector<std::uint32_t> Bvh::query(const Aabb& probe) const {
  std::vector<std::uint32_t> out;
  visit(probe, [&](std::uint32_t id) {
    out.push_back(id);
    return false;
  });
  std::sort(out.begin(), out.end());
  return out;
}

bool Bvh::check_invariants() const {
  if (boxes_.empty()) return nodes_.empty();
  std::vector<int> seen(boxes_.size(), 0);
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.leaf()) {
      for (std::uint32_t i = 0; i < node.count; ++i) {
        const std::uint32_t id = order_[node.first + i];
        if (!node.bounds.contains(boxes_[id])) return false;
        ++seen[id];
      }
      continue;
    }
    for (std::uint32_t child : {node.first, node.right}) {
      if (child >= nodes_.size()) return false;
      if (!node.bounds.contains(nodes_[child].bounds)) return false;
      stack.push_back(child);
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int n) { return n == 1; });
}

}  // namespace covox
