// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace boxsynth {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Triangle = std::array<std::uint32_t, 3>;

/// Face group ids. Panels are the flat pieces of the cardboard sheet; fillet
/// groups are created by bevel_edges; inner and rim groups by solidify.
namespace group {
inline constexpr std::uint32_t kBase = 0;
inline constexpr std::uint32_t kWall0 = 1;  // +X, +Y, -X, -Y
inline constexpr std::uint32_t kFlap0 = 5;  // same side order as walls
inline constexpr std::uint32_t kFilletBase = 1u << 12;
inline constexpr std::uint32_t kInnerFlag = 1u << 20;
inline constexpr std::uint32_t kRim = 1u << 21;

constexpr bool is_panel(std::uint32_t g) { return g < kFilletBase; }
constexpr bool is_fillet(std::uint32_t g) { return g >= kFilletBase && g < kInnerFlag; }
constexpr bool is_wall(std::uint32_t g) { return g >= kWall0 && g < kWall0 + 4; }
constexpr bool is_flap(std::uint32_t g) { return g >= kFlap0 && g < kFlap0 + 4; }
}  // namespace group

/// Indexed triangle mesh. `uv` and `normals` are either empty or sized to
/// the triangle count; `groups` is always sized to the triangle count.
struct TriMesh {
  std::vector<Vec3> positions;
  std::vector<Triangle> triangles;
  std::vector<std::array<Vec2, 3>> uv;  // per corner, meters in sheet space
  std::vector<std::uint32_t> groups;
  std::vector<Vec3> normals;  // per triangle, unit length

  std::size_t vertex_count() const { return positions.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
  bool has_uv() const { return !uv.empty(); }
};

struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  Vec3 extents() const { return max - min; }
  bool empty() const { return (min.array() > max.array()).any(); }
};

Aabb bounds(const TriMesh& mesh);

Vec3 triangle_normal(const TriMesh& mesh, std::size_t tri);  // unit, from winding
double triangle_area(const TriMesh& mesh, std::size_t tri);
double uv_area(const TriMesh& mesh, std::size_t tri);
double surface_area(const TriMesh& mesh);
double min_triangle_area(const TriMesh& mesh);

/// Sum of signed tetrahedron volumes against the origin. Positive for a
/// closed mesh with outward winding.
double signed_volume(const TriMesh& mesh);

struct TopologyReport {
  std::size_t vertices = 0;  // referenced vertices only
  std::size_t edges = 0;
  std::size_t faces = 0;
  std::size_t boundary_edges = 0;
  std::size_t nonmanifold_edges = 0;    // used by more than two triangles
  std::size_t misoriented_edges = 0;    // two triangles traverse it the same way
  long euler() const {
    return static_cast<long>(vertices) - static_cast<long>(edges) + static_cast<long>(faces);
  }
  bool closed_manifold() const {
    return boundary_edges == 0 && nonmanifold_edges == 0 && misoriented_edges == 0;
  }
};

TopologyReport analyze_topology(const TriMesh& mesh);

/// Throws Error(kInvalidArgument / kNonFinite) when index bounds, finiteness,
/// attribute sizes or the 1e-12 m^2 area floor are violated.
void validate(const TriMesh& mesh);

void compute_normals(TriMesh& mesh);

/// Applies p -> rotation * p + translation to positions and normals.
void transform(TriMesh& mesh, const Mat3& rotation, const Vec3& translation);

/// Wavefront OBJ with v/vt/f records and 9 significant digits.
void write_obj(std::ostream& os, const TriMesh& mesh);

inline constexpr double kMinTriangleArea = 1e-12;

}  // namespace boxsynth
