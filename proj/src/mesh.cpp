// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#include "boxsynth/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <utility>

#include <Eigen/Geometry>

#include "boxsynth/error.hpp"

namespace boxsynth {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParams: return "invalid-params";
    case ErrorCode::kRadiusTooLarge: return "radius-too-large";
    case ErrorCode::kUnsupportedBevel: return "unsupported-bevel";
    case ErrorCode::kSelfIntersection: return "self-intersection";
    case ErrorCode::kNotOrientable: return "not-orientable";
    case ErrorCode::kEmptyMesh: return "empty-mesh";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kNonFinite: return "non-finite";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kVersionMismatch: return "version-mismatch";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kMalformedPayload: return "malformed-payload";
    case ErrorCode::kMalformedJson: return "malformed-json";
    case ErrorCode::kConfigInvalid: return "config-invalid";
    case ErrorCode::kConfigNotFound: return "config-not-found";
    case ErrorCode::kMissingSample: return "missing-sample";
    case ErrorCode::kDuplicateIndex: return "duplicate-index";
    case ErrorCode::kInvalidRotation: return "invalid-rotation";
  }
  return "unknown";
}

namespace {

Vec3 raw_cross(const TriMesh& mesh, std::size_t tri) {
  const auto& t = mesh.triangles[tri];
  const Vec3& a = mesh.positions[t[0]];
  return (mesh.positions[t[1]] - a).cross(mesh.positions[t[2]] - a);
}

}  // namespace

Aabb bounds(const TriMesh& mesh) {
  Aabb box;
  for (const auto& t : mesh.triangles)
    for (auto v : t) box.extend(mesh.positions[v]);
  return box;
}

Vec3 triangle_normal(const TriMesh& mesh, std::size_t tri) {
  return raw_cross(mesh, tri).normalized();
}

double triangle_area(const TriMesh& mesh, std::size_t tri) {
  return 0.5 * raw_cross(mesh, tri).norm();
}

double uv_area(const TriMesh& mesh, std::size_t tri) {
  const auto& c = mesh.uv[tri];
  const Vec2 e1 = c[1] - c[0];
  const Vec2 e2 = c[2] - c[0];
  return 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x());
}

double surface_area(const TriMesh& mesh) {
  double sum = 0.0;
  for (std::size_t i = 0; i < mesh.triangle_count(); ++i) sum += triangle_area(mesh, i);
  return sum;
}

double min_triangle_area(const TriMesh& mesh) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mesh.triangle_count(); ++i) m = std::min(m, triangle_area(mesh, i));
  return m;
}

double signed_volume(const TriMesh& mesh) {
  double six_v = 0.0;
  for (const auto& t : mesh.triangles) {
    six_v += mesh.positions[t[0]].dot(mesh.positions[t[1]].cross(mesh.positions[t[2]]));
  }
  return six_v / 6.0;
}

TopologyReport analyze_topology(const TriMesh& mesh) {
  TopologyReport r;
  // Directed use count per undirected edge: first = uses as (lo->hi),
  // second = uses as (hi->lo).
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<int, int>> edges;
  std::vector<bool> used(mesh.vertex_count(), false);
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const auto a = t[k];
      const auto b = t[(k + 1) % 3];
      used[a] = true;
      auto& e = edges[{std::min(a, b), std::max(a, b)}];
      (a < b ? e.first : e.second)++;
    }
  }
  r.vertices = static_cast<std::size_t>(std::count(used.begin(), used.end(), true));
  r.edges = edges.size();
  r.faces = mesh.triangle_count();
  for (const auto& [key, uses] : edges) {
    const int total = uses.first + uses.second;
    if (total == 1) ++r.boundary_edges;
    else if (total > 2) ++r.nonmanifold_edges;
    else if (uses.first != 1) ++r.misoriented_edges;
  }
  return r;
}

void validate(const TriMesh& mesh) {
  const auto n = mesh.vertex_count();
  if (mesh.groups.size() != mesh.triangle_count())
    throw Error(ErrorCode::kInvalidArgument, "mesh: group count does not match triangle count");
  if (mesh.has_uv() && mesh.uv.size() != mesh.triangle_count())
    throw Error(ErrorCode::kInvalidArgument, "mesh: uv count does not match triangle count");
  if (!mesh.normals.empty() && mesh.normals.size() != mesh.triangle_count())
    throw Error(ErrorCode::kInvalidArgument, "mesh: normal count does not match triangle count");
  for (const auto& p : mesh.positions)
    if (!p.allFinite()) throw Error(ErrorCode::kNonFinite, "mesh: non-finite vertex position");
  for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
    for (auto v : mesh.triangles[i])
      if (v >= n) throw Error(ErrorCode::kInvalidArgument, "mesh: triangle index out of range");
    if (!(triangle_area(mesh, i) >= kMinTriangleArea))
      throw Error(ErrorCode::kInvalidArgument,
                  "mesh: degenerate triangle " + std::to_string(i));
  }
}

void compute_normals(TriMesh& mesh) {
  mesh.normals.resize(mesh.triangle_count());
  for (std::size_t i = 0; i < mesh.triangle_count(); ++i) mesh.normals[i] = triangle_normal(mesh, i);
}

void transform(TriMesh& mesh, const Mat3& rotation, const Vec3& translation) {
  for (auto& p : mesh.positions) p = rotation * p + translation;
  for (auto& nrm : mesh.normals) nrm = rotation * nrm;
}

void write_obj(std::ostream& os, const TriMesh& mesh) {
  const auto old_precision = os.precision(9);
  os << "# boxsynth mesh: " << mesh.vertex_count() << " vertices, " << mesh.triangle_count()
     << " triangles\n";
  for (const auto& p : mesh.positions) os << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  if (mesh.has_uv()) {
    for (const auto& corners : mesh.uv)
      for (const auto& c : corners) os << "vt " << c.x() << ' ' << c.y() << '\n';
  }
  for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
    const auto& t = mesh.triangles[i];
    os << 'f';
    for (int k = 0; k < 3; ++k) {
      os << ' ' << t[k] + 1;
      if (mesh.has_uv()) os << '/' << 3 * i + k + 1;
    }
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace boxsynth
