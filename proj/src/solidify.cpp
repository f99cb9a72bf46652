// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "boxsynth/box_model.hpp"
#include "boxsynth/error.hpp"
#include "polygon.hpp"

namespace boxsynth {

namespace {

using Index = std::uint32_t;

// Offsets longer than this many thicknesses indicate a fold too sharp to
// thicken without the inner sheet crossing itself.
constexpr double kMitreLimit = 10.0;

// Support planes of every face group. A vertex is pushed inward so that it
// sits `thickness` behind each support plane of its incident groups (least
// squares when over-determined). Panels support themselves; fillets are
// supported by the panels they round, so a fillet's inner sheet is a
// translated copy of the outer one and stays valid for any radius.
class SupportPlanes {
 public:
  explicit SupportPlanes(const TriMesh& mesh) : mesh_(mesh) {
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
      const Index g = mesh.groups[t];
      const double area = triangle_area(mesh, t);
      auto [it, fresh] = anchor_.emplace(g, std::pair{t, area});
      if (!fresh && area > it->second.second) it->second = {t, area};
    }
    // Edge adjacency between groups.
    std::map<std::pair<Index, Index>, std::vector<std::size_t>> edge_tris;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t)
      for (int k = 0; k < 3; ++k) {
        const Index a = mesh.triangles[t][k], b = mesh.triangles[t][(k + 1) % 3];
        edge_tris[{std::min(a, b), std::max(a, b)}].push_back(t);
      }
    std::map<Index, std::set<Index>> adjacent;
    for (const auto& [e, tris] : edge_tris)
      for (auto t0 : tris)
        for (auto t1 : tris)
          if (mesh.groups[t0] != mesh.groups[t1]) adjacent[mesh.groups[t0]].insert(mesh.groups[t1]);

    for (const auto& [g, anchor] : anchor_) {
      if (!group::is_fillet(g)) continue;
      std::set<Index> s;
      for (auto h : adjacent[g])
        if (group::is_panel(h)) s.insert(h);
      if (s.empty()) {
        for (auto h : adjacent[g])
          if (group::is_fillet(h))
            for (auto k : adjacent[h])
              if (group::is_panel(k)) s.insert(k);
      }
      fillet_support_[g] = std::move(s);
    }
  }

  // Support keys of triangle t: panel group ids, or the triangle itself
  // (offset by the group-id range) for faces outside the panel/fillet sets.
  void collect(std::size_t t, std::set<std::uint64_t>& keys) const {
    const Index g = mesh_.groups[t];
    if (group::is_panel(g)) {
      keys.insert(g);
    } else if (group::is_fillet(g) && !fillet_support_.at(g).empty()) {
      for (auto h : fillet_support_.at(g)) keys.insert(h);
    } else {
      keys.insert((std::uint64_t{1} << 32) + t);
    }
  }

  Vec3 normal(std::uint64_t key) const {
    if (key < (std::uint64_t{1} << 32)) return triangle_normal(mesh_, anchor_.at(static_cast<Index>(key)).first);
    return triangle_normal(mesh_, static_cast<std::size_t>(key - (std::uint64_t{1} << 32)));
  }

 private:
  const TriMesh& mesh_;
  std::map<Index, std::pair<std::size_t, double>> anchor_;
  std::map<Index, std::set<Index>> fillet_support_;
};

[[noreturn]] void self_intersection(const std::string& why) {
  throw Error(ErrorCode::kSelfIntersection, "solidify: " + why, "thickness");
}

}  // namespace

TriMesh solidify(const TriMesh& mesh, double thickness) {
  if (!std::isfinite(thickness) || !(thickness > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "solidify: thickness must be > 0", "thickness");
  if (mesh.triangles.empty()) throw Error(ErrorCode::kEmptyMesh, "solidify: empty mesh");
  validate(mesh);

  // Orientation: each directed edge at most once.
  std::map<std::pair<Index, Index>, std::size_t> directed;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t)
    for (int k = 0; k < 3; ++k)
      if (!directed.emplace(std::pair{mesh.triangles[t][k], mesh.triangles[t][(k + 1) % 3]}, t).second)
        throw Error(ErrorCode::kNotOrientable, "solidify: surface is not consistently oriented");

  const SupportPlanes supports(mesh);
  const std::size_t nv = mesh.vertex_count();
  std::vector<std::set<std::uint64_t>> keys(nv);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t)
    for (auto v : mesh.triangles[t]) supports.collect(t, keys[v]);

  TriMesh out;
  out.positions = mesh.positions;
  out.positions.resize(2 * nv);
  for (std::size_t v = 0; v < nv; ++v) {
    if (keys[v].empty()) {
      out.positions[nv + v] = mesh.positions[v];
      continue;
    }
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(keys[v].size()), 3);
    Eigen::Index r = 0;
    for (auto key : keys[v]) rows.row(r++) = -supports.normal(key).transpose();
    const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(rows.rows(), thickness);
    const Vec3 offset = rows.completeOrthogonalDecomposition().solve(rhs);
    if (!offset.allFinite() || offset.norm() > kMitreLimit * thickness)
      self_intersection("fold at vertex " + std::to_string(v) + " is too sharp for the thickness");
    // Panels folded back onto each other ask for opposite offsets; the
    // compromise then leaves one of them without material.
    if ((rows * offset).minCoeff() < 0.1 * thickness)
      self_intersection("panels at vertex " + std::to_string(v) + " fold back onto each other");
    out.positions[nv + v] = mesh.positions[v] + offset;
  }

  const bool with_uv = mesh.has_uv();
  // Outer sheet.
  out.triangles = mesh.triangles;
  out.groups = mesh.groups;
  if (with_uv) out.uv = mesh.uv;
  // Inner sheet, reversed winding. An inner face must keep the orientation
  // of its source; a flipped or collapsed face means the offset surface
  // folded through itself.
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& src = mesh.triangles[t];
    const Triangle inner{static_cast<Index>(src[0] + nv), static_cast<Index>(src[1] + nv),
                         static_cast<Index>(src[2] + nv)};
    const Vec3& p0 = out.positions[inner[0]];
    const Vec3 cross = (out.positions[inner[1]] - p0).cross(out.positions[inner[2]] - p0);
    if (0.5 * cross.norm() < kMinTriangleArea || cross.dot(triangle_normal(mesh, t)) <= 0.0)
      self_intersection("inner face " + std::to_string(t) + " inverts; thickness exceeds the local feature size");
    out.triangles.push_back({inner[0], inner[2], inner[1]});
    out.groups.push_back(mesh.groups[t] | group::kInnerFlag);
    if (with_uv) out.uv.push_back({mesh.uv[t][0], mesh.uv[t][2], mesh.uv[t][1]});
  }
  // Rim quads along boundary edges, in triangle order.
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const Index a = mesh.triangles[t][k], b = mesh.triangles[t][(k + 1) % 3];
      if (directed.count({b, a})) continue;
      const Index ai = static_cast<Index>(a + nv), bi = static_cast<Index>(b + nv);
      const std::vector<Index> quad{b, a, ai, bi};
      const Vec3 rim_normal = (out.positions[a] - out.positions[b])
                                  .cross(out.positions[ai] - out.positions[b])
                                  .normalized();
      std::array<Vec2, 2> uv_edge{}, uv_shift{};
      if (with_uv) {
        const Vec2 ua = mesh.uv[t][k], ub = mesh.uv[t][(k + 1) % 3], uc = mesh.uv[t][(k + 2) % 3];
        const Vec2 d = ub - ua;
        Vec2 perp(-d.y(), d.x());
        if (perp.norm() > 0.0) {
          perp.normalize();
          if (perp.dot(uc - ua) > 0.0) perp = -perp;
        }
        uv_edge = {ua, ub};
        uv_shift = {ua + thickness * perp, ub + thickness * perp};
      }
      for (const auto& tri : detail::triangulate_loop(out.positions, quad, rim_normal)) {
        out.triangles.push_back(tri);
        out.groups.push_back(group::kRim);
        if (with_uv) {
          std::array<Vec2, 3> c;
          for (int j = 0; j < 3; ++j) {
            const Index v = tri[j];
            c[j] = v == a ? uv_edge[0] : v == b ? uv_edge[1] : v == ai ? uv_shift[0] : uv_shift[1];
          }
          out.uv.push_back(c);
        }
      }
    }
  }
  try {
    validate(out);
  } catch (const Error& e) {
    self_intersection(std::string("offset produced an invalid mesh: ") + e.what());
  }
  return out;
}

}  // namespace boxsynth
