// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>

#include "boxsynth/mesh.hpp"

namespace boxsynth {

/// Procedural cardboard box. Lengths in meters, angles in radians.
///
/// `size` is the outer body: the base sits in z = 0 centered on the origin
/// and the walls rise to z = size.z(). Flaps hinge on the top edges in side
/// order +X, +Y, -X, -Y. `open[i]` is measured from the wall's upward
/// continuation: 0 keeps the flap vertical, pi/2 lays it horizontal
/// outward, pi folds it flat against the outer wall. `flap_taper` insets
/// both tip corners of every flap along the hinge direction.
struct BoxParams {
  Vec3 size{0.25, 0.25, 0.25};
  double flap_length = 0.0;
  double flap_taper = 0.0;
  std::array<double, 4> open{0.0, 0.0, 0.0, 0.0};
  double thickness = 0.0;
  double bevel_radius = 0.0;
  std::uint32_t bevel_segments = 1;

  bool operator==(const BoxParams&) const = default;
};

/// Throws Error(kInvalidParams) naming the first violated field.
void validate(const BoxParams& params);

/// Zero-thickness open box: base, four walls and up to four flaps, outward
/// winding. Flaps shorter than kMinFlapLength are omitted.
TriMesh build_shell(const BoxParams& params);

/// Per-corner UVs from the unfolded sheet: base at the center, walls folded
/// out around it, flaps beyond the walls. Isometric per panel and seam-free
/// across base/wall and wall/flap folds.
TriMesh unwrap_uv(const BoxParams& params, TriMesh shell);

/// Selects which panel-pair edges are rounded. Receives the two group ids
/// (lower first).
using EdgeSelector = std::function<bool(std::uint32_t, std::uint32_t)>;

/// Rounds the selected convex edges with a circular fillet of `radius`
/// approximated by `segments` strips. Vertices where three selected edges
/// meet receive a spherical corner patch; vertices with one selected edge
/// terminate the fillet in the plane perpendicular to the edge. Every
/// selected edge must separate two planar panels. Without a selector all
/// edges between distinct panel groups are rounded.
TriMesh bevel_edges(const TriMesh& mesh, double radius, std::uint32_t segments,
                    const EdgeSelector& select = {});

/// Thickens an oriented surface inward by `thickness`, producing a closed
/// 2-manifold: the input faces, offset copies with reversed winding, and
/// rim quads along every boundary edge. Throws Error(kSelfIntersection)
/// where a fold is too sharp for the thickness or panels fold back onto
/// each other.
TriMesh solidify(const TriMesh& mesh, double thickness);

/// shell -> UV -> bevel (wall-wall and base-wall edges) -> solidify.
TriMesh build_box(const BoxParams& params);

inline constexpr double kMinFlapLength = 1e-9;

}  // namespace boxsynth
