// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "boxsynth/camera.hpp"
#include "boxsynth/mesh.hpp"

namespace boxsynth {

struct RayHit {
  double t = 0.0;
  std::uint32_t triangle = 0;
  Vec2 barycentrics = Vec2::Zero();  // weights of the triangle's 2nd and 3rd vertex
};

/// Watertight ray/triangle test (shear-and-scale edge functions with an
/// extended-precision fallback on exact zeros). Edges shared by two
/// triangles never let a ray slip between them. Accepts hits with
/// 0 < t < t_max.
std::optional<RayHit> intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c,
                                         double t_max = std::numeric_limits<double>::infinity());

/// Bounding-volume hierarchy over a mesh's triangles. Immutable after
/// construction and safe to query from several threads.
class Bvh {
 public:
  /// Throws Error(kEmptyMesh) when the mesh has no triangles.
  explicit Bvh(const TriMesh& mesh);

  /// Nearest hit with t in (0, t_max); ties on t go to the lower triangle index.
  std::optional<RayHit> intersect(const Ray& ray,
                                  double t_max = std::numeric_limits<double>::infinity()) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t leaf_count() const;
  std::size_t triangle_count() const { return tri_.size(); }

 private:
  struct Node {
    Vec3 lo, hi;
    std::uint32_t first = 0;  // leaf: first triangle slot; inner: right child
    std::uint32_t count = 0;  // triangles in leaf, 0 for inner nodes
  };
  struct Tri {
    Vec3 a, b, c;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids);

  std::vector<Node> nodes_;
  std::vector<Tri> tri_;               // in leaf order
  std::vector<std::uint32_t> index_;  // leaf slot -> mesh triangle index
};

/// Reference nearest-hit query over every triangle, same tie-break rule.
std::optional<RayHit> intersect_brute_force(const TriMesh& mesh, const Ray& ray,
                                            double t_max = std::numeric_limits<double>::infinity());

}  // namespace boxsynth
