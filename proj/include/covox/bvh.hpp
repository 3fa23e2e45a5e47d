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

#include <cstdint>
#include <span>
#include <vector>

#include "covox/geometry.hpp"

namespace covox {

/// Static bounding volume hierarchy over primitive boxes.
///
/// Built top-down with a median split on the longest axis of each node's
/// bounds, at most kLeafSize primitives per leaf. Construction depends only on
/// the input order, so two builds over the same boxes produce identical trees.
/// Queries are a broad-phase filter: they report primitives whose box overlaps
/// the probe (closed convention), and exact tests follow.
class Bvh {
 public:
  static constexpr std::uint32_t kLeafSize = 4;

  struct Node {
    Aabb bounds;
    std::uint32_t first = 0;  // leaf: offset into order(); inner: left child
    std::uint32_t count = 0;  // leaf: primitive count; inner: 0
    std::uint32_t right = 0;  // inner: right child
    bool leaf() const { return count > 0; }
  };

  Bvh() = default;
  explicit Bvh(std::span<const Aabb> boxes);

  std::size_t primitive_count() const { return boxes_.size(); }
  bool empty() const { return boxes_.empty(); }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const std::uint32_t> order() const { return order_; }
  const Aabb& primitive_bounds(std::uint32_t id) const { return boxes_[id]; }

  /// Ids whose box overlaps `probe`, ascending.
  std::vector<std::uint32_t> query(const Aabb& probe) const;

  /// Calls `f(id)` for every overlapping primitive in traversal order. `f`
  /// returns true to stop early; visit() then returns true as well.
  template <class F>
  bool visit(const Aabb& probe, F&& f) const {
    if (nodes_.empty()) return false;
    std::uint32_t stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes_[stack[--top]];
      if (!aabb_overlap(node.bounds, probe)) continue;
      if (node.leaf()) {
        for (std::uint32_t i = 0; i < node.count; ++i) {
          const std::uint32_t id = order_[node.first + i];
          if (aabb_overlap(boxes_[id], probe) && f(id)) return true;
        }
      } else {
        stack[top++] = node.right;
        stack[top++] = node.first;
      }
    }
    return false;
  }

  /// Checks parent/child containment and that every primitive sits in exactly
  /// one leaf. Used by tests.
  bool check_invariants() const;

 private:
  std::uint32_t build(std::uint32_t begin, std::uint32_t end, int depth);

  std::vector<Aabb> boxes_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace covox
