// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Internal: deterministic triangulation of planar polygon loops.

#include <algorithm>
#include <cstdint>
#include <tuple>
#include <vector>

#include "boxsynth/error.hpp"
#include "boxsynth/mesh.hpp"

namespace boxsynth::detail {

inline double oriented_area(const std::vector<Vec3>& pos, std::uint32_t a, std::uint32_t b,
                            std::uint32_t c, const Vec3& normal) {
  return 0.5 * (pos[b] - pos[a]).cross(pos[c] - pos[a]).dot(normal);
}

/// Triangulates a convex loop wound counter-clockwise about `normal`.
/// Quads split along the diagonal holding the lowest vertex index; larger
/// loops are ear-clipped starting from the lowest index.
inline std::vector<Triangle> triangulate_loop(const std::vector<Vec3>& pos,
                                              std::vector<std::uint32_t> loop,
                                              const Vec3& normal) {
  std::vector<Triangle> out;
  if (loop.size() < 3) return out;
  if (loop.size() == 3) {
    out.push_back({loop[0], loop[1], loop[2]});
    return out;
  }
  if (loop.size() == 4) {
    const auto [a, b, c, d] = std::tuple{loop[0], loop[1], loop[2], loop[3]};
    const bool ac_first = std::min(a, c) < std::min(b, d);
    const bool ac_ok = oriented_area(pos, a, b, c, normal) > kMinTriangleArea &&
                       oriented_area(pos, a, c, d, normal) > kMinTriangleArea;
    const bool bd_ok = oriented_area(pos, b, c, d, normal) > kMinTriangleArea &&
                       oriented_area(pos, b, d, a, normal) > kMinTriangleArea;
    if ((ac_first && ac_ok) || !bd_ok) {
      out.push_back({a, b, c});
      out.push_back({a, c, d});
    } else {
      out.push_back({b, c, d});
      out.push_back({b, d, a});
    }
    return out;
  }
  // Rotate so the lowest index leads; then clip ears in order.
  std::rotate(loop.begin(), std::min_element(loop.begin(), loop.end()), loop.end());
  while (loop.size() > 3) {
    bool clipped = false;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const std::size_t n = loop.size();
      const auto p = loop[(i + n - 1) % n];
      const auto c = loop[i];
      const auto q = loop[(i + 1) % n];
      if (oriented_area(pos, p, c, q, normal) <= kMinTriangleArea) continue;
      bool contains = false;
      for (auto v : loop) {
        if (v == p || v == c || v == q) continue;
        if (oriented_area(pos, p, c, v, normal) >= 0 && oriented_area(pos, c, q, v, normal) >= 0 &&
            oriented_area(pos, q, p, v, normal) >= 0) {
          contains = true;
          break;
        }
      }
      if (contains) continue;
      out.push_back({p, c, q});
      loop.erase(loop.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped) throw Error(ErrorCode::kInvalidArgument, "polygon loop cannot be triangulated");
  }
  out.push_back({loop[0], loop[1], loop[2]});
  return out;
}

}  // namespace boxsynth::detail
