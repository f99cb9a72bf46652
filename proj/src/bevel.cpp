// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
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
using DirectedEdge = std::pair<Index, Index>;

[[noreturn]] void unsupported(const std::string& what) {
  throw Error(ErrorCode::kUnsupportedBevel, "bevel_edges: " + what);
}

// A flat panel: one face group with a single boundary loop.
struct Patch {
  Index group = 0;
  Vec3 normal = Vec3::Zero();
  std::vector<Index> loop;     // counter-clockwise about `normal`
  std::vector<std::size_t> triangles;
  std::size_t anchor = 0;      // largest triangle, defines the UV map
  bool planar = true;
};

// Affine sheet map of a panel, evaluated by projection onto the panel plane.
struct UvMap {
  Vec3 origin, e1, e2;
  Vec2 uv0, du1, du2;
  Eigen::Matrix2d gram_inv;

  Vec2 operator()(const Vec3& p) const {
    const Vec3 w = p - origin;
    const Eigen::Vector2d ab = gram_inv * Eigen::Vector2d(w.dot(e1), w.dot(e2));
    return uv0 + ab.x() * du1 + ab.y() * du2;
  }
};

UvMap make_uv_map(const TriMesh& mesh, std::size_t tri) {
  const auto& t = mesh.triangles[tri];
  UvMap m;
  m.origin = mesh.positions[t[0]];
  m.e1 = mesh.positions[t[1]] - m.origin;
  m.e2 = mesh.positions[t[2]] - m.origin;
  m.uv0 = mesh.uv[tri][0];
  m.du1 = mesh.uv[tri][1] - m.uv0;
  m.du2 = mesh.uv[tri][2] - m.uv0;
  Eigen::Matrix2d gram;
  gram << m.e1.dot(m.e1), m.e1.dot(m.e2), m.e1.dot(m.e2), m.e2.dot(m.e2);
  m.gram_inv = gram.inverse();
  return m;
}

Vec3 nlerp(const Vec3& a, const Vec3& b, double wa, double wb) { return (wa * a + wb * b).normalized(); }

struct SelectedEdge {
  Index x, y;   // patch `a` traverses x -> y, patch `b` traverses y -> x
  Index a, b;   // group ids
};

// Fillet cross-section at one end of a selected edge, ordered from the
// edge's `a` patch (s = 0) to its `b` patch (s = n).
using Arc = std::vector<Index>;

class Beveler {
 public:
  Beveler(const TriMesh& mesh, double radius, std::uint32_t segments, const EdgeSelector& select)
      : in_(mesh), r_(radius), n_(segments), select_(select) {}

  TriMesh run() {
    collect_patches();
    collect_selected_edges();
    if (selected_.empty()) return in_;
    check_radius();
    positions_ = in_.positions;
    for (Index v = 0; v < in_.vertex_count(); ++v) {
      const auto it = vertex_edges_.find(v);
      if (it == vertex_edges_.end()) continue;
      if (it->second.size() == 1) end_vertex(v, it->second.front());
      else if (it->second.size() == 3) corner_vertex(v, it->second);
      else unsupported("vertex " + std::to_string(v) + " joins " + std::to_string(it->second.size()) +
                       " selected edges (supported: 1 or 3)");
    }
    return assemble();
  }

 private:
  void collect_patches() {
    std::map<Index, std::vector<std::size_t>> by_group;
    for (std::size_t i = 0; i < in_.triangle_count(); ++i) {
      by_group[in_.groups[i]].push_back(i);
      for (int k = 0; k < 3; ++k) {
        const DirectedEdge e{in_.triangles[i][k], in_.triangles[i][(k + 1) % 3]};
        if (!directed_.emplace(e, i).second)
          throw Error(ErrorCode::kNotOrientable, "bevel_edges: edge used twice in the same direction");
      }
    }
    for (auto& [g, tris] : by_group) {
      if (!group::is_panel(g)) continue;
      Patch p;
      p.group = g;
      p.triangles = tris;
      double best = -1.0;
      for (auto t : tris) {
        const double area = triangle_area(in_, t);
        if (area > best) {
          best = area;
          p.anchor = t;
        }
      }
      p.normal = triangle_normal(in_, p.anchor);
      for (auto t : tris)
        if (triangle_normal(in_, t).dot(p.normal) < 1.0 - 1e-9) p.planar = false;
      // Boundary loop: directed edges whose reverse is not in the same group.
      std::map<Index, Index> next;
      for (auto t : tris) {
        for (int k = 0; k < 3; ++k) {
          const Index a = in_.triangles[t][k], b = in_.triangles[t][(k + 1) % 3];
          const auto rev = directed_.find({b, a});
          if (rev != directed_.end() && in_.groups[rev->second] == g) continue;
          if (!next.emplace(a, b).second) p.planar = false;  // pinched: not a simple loop
          owner_[{a, b}] = g;
        }
      }
      if (!next.empty()) {
        Index start = next.begin()->first;
        Index cur = start;
        do {
          p.loop.push_back(cur);
          const auto it = next.find(cur);
          if (it == next.end() || p.loop.size() > next.size()) {
            p.planar = false;
            break;
          }
          cur = it->second;
        } while (cur != start);
        if (p.loop.size() != next.size()) p.planar = false;
      }
      patches_.emplace(g, std::move(p));
    }
  }

  void collect_selected_edges() {
    for (const auto& [e, tri] : directed_) {
      const auto [x, y] = e;
      if (x > y) continue;
      const auto rev = directed_.find({y, x});
      if (rev == directed_.end()) continue;
      const Index ga = in_.groups[tri], gb = in_.groups[rev->second];
      if (ga == gb || !group::is_panel(ga) || !group::is_panel(gb)) continue;
      if (select_ ? !select_(std::min(ga, gb), std::max(ga, gb)) : false) continue;
      const Patch& pa = patches_.at(ga);
      const Patch& pb = patches_.at(gb);
      if (!pa.planar || !pb.planar)
        unsupported("selected edge borders a non-planar or non-simple panel");
      if (pa.normal.dot(pb.normal) > 1.0 - 1e-9) continue;  // flat, nothing to round
      // Convexity: patch b must fall behind the plane of patch a.
      const auto& tb = in_.triangles[rev->second];
      Index apex = tb[0];
      for (auto v : tb)
        if (v != x && v != y) apex = v;
      if (pa.normal.dot(in_.positions[apex] - in_.positions[x]) >= 0.0)
        unsupported("selected edge " + std::to_string(x) + "-" + std::to_string(y) + " is concave");
      const std::size_t id = selected_.size();
      selected_.push_back({x, y, ga, gb});
      vertex_edges_[x].push_back(id);
      vertex_edges_[y].push_back(id);
    }
  }

  void check_radius() {
    std::set<Index> touched;
    for (const auto& e : selected_) {
      touched.insert(e.x);
      touched.insert(e.y);
    }
    for (const auto& [e, tri] : directed_) {
      if (!touched.count(e.first) && !touched.count(e.second)) continue;
      const double len = (in_.positions[e.first] - in_.positions[e.second]).norm();
      if (!(r_ < 0.5 * len))
        throw Error(ErrorCode::kRadiusTooLarge,
                    "bevel_edges: radius " + std::to_string(r_) +
                        " is not below half the incident edge length " + std::to_string(len),
                    "bevel_radius");
    }
  }

  Index add_vertex(const Vec3& p) {
    positions_.push_back(p);
    return static_cast<Index>(positions_.size() - 1);
  }

  // Loop neighbours of v in a patch: (previous, next).
  std::pair<Index, Index> loop_neighbours(const Patch& p, Index v) const {
    const auto it = std::find(p.loop.begin(), p.loop.end(), v);
    if (it == p.loop.end()) unsupported("vertex missing from panel loop");
    const std::size_t i = static_cast<std::size_t>(it - p.loop.begin());
    const std::size_t n = p.loop.size();
    return {p.loop[(i + n - 1) % n], p.loop[(i + 1) % n]};
  }

  // Panel across edge {v, w} from panel g, if any.
  std::optional<Index> across(Index g, Index v, Index w) const {
    for (const DirectedEdge& e : {DirectedEdge{v, w}, DirectedEdge{w, v}}) {
      const auto it = owner_.find(e);
      if (it != owner_.end() && it->second != g) return it->second;
    }
    // Edge interior to a non-panel group, or a boundary.
    for (const DirectedEdge& e : {DirectedEdge{v, w}, DirectedEdge{w, v}}) {
      const auto it = directed_.find(e);
      if (it != directed_.end() && in_.groups[it->second] != g && !group::is_panel(in_.groups[it->second]))
        unsupported("fillet end touches a non-panel face");
    }
    return std::nullopt;
  }

  struct Walk {
    std::vector<Index> patches;
    bool closed = false;
  };

  // Rotates around v starting in `start`, which was entered across {v, from};
  // stops at a boundary or on reaching `stop`.
  Walk walk_fan(Index v, Index start, Index from, Index stop) const {
    Walk w;
    Index cur = start;
    for (std::size_t guard = 0; guard < patches_.size() + 1; ++guard) {
      const auto [prev, next] = loop_neighbours(patches_.at(cur), v);
      const Index exit = prev == from ? next : prev;
      const auto nb = across(cur, v, exit);
      if (!nb) return w;
      if (*nb == stop) {
        w.closed = true;
        return w;
      }
      if (!patches_.at(*nb).planar) unsupported("fan panel is not planar");
      w.patches.push_back(*nb);
      from = exit;
      cur = *nb;
    }
    unsupported("fan walk did not terminate");
  }

  void set_replacement(Index g, Index v, std::vector<Index> ids) {
    replace_[{g, v}] = std::move(ids);
  }

  Vec3 solve_center(const Vec3& n0, double d0, const Vec3& n1, double d1, const Vec3& n2, double d2) const {
    Mat3 m;
    m.row(0) = n0;
    m.row(1) = n1;
    m.row(2) = n2;
    const Eigen::FullPivLU<Mat3> lu(m);
    if (!lu.isInvertible()) unsupported("fillet center is undetermined");
    return lu.solve(Vec3(d0, d1, d2));
  }

  // One selected edge ends at v: the fillet stops in the plane through v
  // perpendicular to the edge.
  void end_vertex(Index v, std::size_t edge_id) {
    const SelectedEdge& e = selected_[edge_id];
    const Index u = e.x == v ? e.y : e.x;
    const Vec3& pv = in_.positions[v];
    const Vec3 dir = (in_.positions[u] - pv).normalized();
    const Vec3& na = patches_.at(e.a).normal;
    const Vec3& nb = patches_.at(e.b).normal;
    const Vec3 c = solve_center(na, na.dot(pv) - r_, nb, nb.dot(pv) - r_, dir, dir.dot(pv));
    Arc arc;
    for (std::uint32_t s = 0; s <= n_; ++s) arc.push_back(add_vertex(c + r_ * nlerp(na, nb, n_ - s, s)));
    arcs_[{edge_id, v}] = arc;

    // The end points must slide along the panels' other edge at v.
    for (const auto& [g, tip] : {std::pair{e.a, arc.front()}, std::pair{e.b, arc.back()}}) {
      const auto [prev, next] = loop_neighbours(patches_.at(g), v);
      const Index other = prev == u ? next : prev;
      const Vec3 along = in_.positions[other] - pv;
      const Vec3 off = positions_[tip] - pv;
      const double t = off.dot(along) / along.squaredNorm();
      if ((off - t * along).norm() > 1e-9 * (1.0 + along.norm()))
        unsupported("fillet end at vertex " + std::to_string(v) + " is not perpendicular to its panels");
      if (!(t > 0.0 && t < 0.5))
        throw Error(ErrorCode::kRadiusTooLarge, "bevel_edges: fillet end overruns a panel edge",
                    "bevel_radius");
      set_replacement(g, v, {tip});
    }

    const Walk from_a = walk_fan(v, e.a, u, e.b);
    if (from_a.closed) {
      if (from_a.patches.size() != 1)
        unsupported("closed fan at vertex " + std::to_string(v) + " needs exactly one cap panel");
      // The cap receives the whole cross-section, oriented to match its loop.
      const Index cap = from_a.patches.front();
      const auto [prev, next] = loop_neighbours(patches_.at(cap), v);
      const bool prev_on_a = owner_.count({v, prev}) && owner_.at({v, prev}) == e.a;
      Arc seq = arc;
      if (!prev_on_a) std::reverse(seq.begin(), seq.end());
      set_replacement(cap, v, seq);
      return;
    }
    for (auto g : from_a.patches) set_replacement(g, v, {arc.front()});
    const Walk from_b = walk_fan(v, e.b, u, e.a);
    for (auto g : from_b.patches) set_replacement(g, v, {arc.back()});
  }

  // Three selected edges meet at v: spherical corner patch.
  void corner_vertex(Index v, const std::vector<std::size_t>& edge_ids) {
    std::set<Index> groups;
    for (auto id : edge_ids) {
      groups.insert(selected_[id].a);
      groups.insert(selected_[id].b);
    }
    std::set<Index> incident;
    for (const auto& [g, p] : patches_)
      if (std::find(p.loop.begin(), p.loop.end(), v) != p.loop.end()) incident.insert(g);
    for (std::size_t t = 0; t < in_.triangle_count(); ++t) {
      const auto& tri = in_.triangles[t];
      if (std::find(tri.begin(), tri.end(), v) != tri.end() && !group::is_panel(in_.groups[t]))
        unsupported("corner touches a non-panel face");
    }
    if (groups.size() != 3 || incident != groups)
      unsupported("corner vertex " + std::to_string(v) + " is not a three-panel corner");

    const std::vector<Index> g(groups.begin(), groups.end());
    const Vec3& pv = in_.positions[v];
    const Vec3 n0 = patches_.at(g[0]).normal, n1 = patches_.at(g[1]).normal, n2 = patches_.at(g[2]).normal;
    const Vec3 c = solve_center(n0, n0.dot(pv) - r_, n1, n1.dot(pv) - r_, n2, n2.dot(pv) - r_);

    // Grid point with counts (n - j - k, j, k) toward panels g[0], g[1], g[2].
    std::map<std::pair<std::uint32_t, std::uint32_t>, Index> grid;
    for (std::uint32_t j = 0; j <= n_; ++j) {
      for (std::uint32_t k = 0; j + k <= n_; ++k) {
        const double i = n_ - j - k;
        grid[{j, k}] = add_vertex(c + r_ * (i * n0 + j * n1 + double(k) * n2).normalized());
      }
    }
    set_replacement(g[0], v, {grid.at({0, 0})});
    set_replacement(g[1], v, {grid.at({n_, 0})});
    set_replacement(g[2], v, {grid.at({0, n_})});

    auto key = [&](Index group_id, std::uint32_t count, Index other, std::uint32_t other_count) {
      std::uint32_t j = 0, k = 0;
      for (auto [gg, cnt] : {std::pair{group_id, count}, std::pair{other, other_count}}) {
        if (gg == g[1]) j = cnt;
        if (gg == g[2]) k = cnt;
      }
      return std::pair{j, k};
    };
    for (auto id : edge_ids) {
      const SelectedEdge& e = selected_[id];
      Arc arc;
      for (std::uint32_t s = 0; s <= n_; ++s) arc.push_back(grid.at(key(e.a, n_ - s, e.b, s)));
      arcs_[{id, v}] = arc;
    }

    const Index fillet = next_fillet_++;
    for (std::uint32_t j = 0; j < n_; ++j) {
      for (std::uint32_t k = 0; j + k < n_; ++k) {
        add_corner_triangle(c, {grid.at({j, k}), grid.at({j + 1, k}), grid.at({j, k + 1})}, fillet, g);
        if (j + k + 2 <= n_)
          add_corner_triangle(c, {grid.at({j + 1, k}), grid.at({j + 1, k + 1}), grid.at({j, k + 1})}, fillet, g);
      }
    }
  }

  void add_corner_triangle(const Vec3& center, Triangle t, Index fillet, const std::vector<Index>& g) {
    const Vec3 nrm = (positions_[t[1]] - positions_[t[0]]).cross(positions_[t[2]] - positions_[t[0]]);
    const Vec3 mid = (positions_[t[0]] + positions_[t[1]] + positions_[t[2]]) / 3.0;
    if (nrm.dot(mid - center) < 0.0) std::swap(t[1], t[2]);
    pending_.push_back({t, fillet, *std::min_element(g.begin(), g.end()), {}, false});
  }

  TriMesh assemble() {
    const bool with_uv = in_.has_uv();
    std::map<Index, UvMap> maps;
    if (with_uv)
      for (const auto& [g, p] : patches_) maps.emplace(g, make_uv_map(in_, p.anchor));

    // Strips along each selected edge.
    for (std::size_t id = 0; id < selected_.size(); ++id) {
      const SelectedEdge& e = selected_[id];
      const Arc& ax = arcs_.at({id, e.x});
      const Arc& ay = arcs_.at({id, e.y});
      const Index fillet = next_fillet_++;
      bool continuous = false;
      if (with_uv) {
        const auto& ma = maps.at(e.a);
        const auto& mb = maps.at(e.b);
        continuous = (ma(in_.positions[e.x]) - mb(in_.positions[e.x])).norm() < 1e-9 &&
                     (ma(in_.positions[e.y]) - mb(in_.positions[e.y])).norm() < 1e-9;
      }
      const Vec3& na = patches_.at(e.a).normal;
      const Vec3& nb = patches_.at(e.b).normal;
      for (std::uint32_t s = 0; s < n_; ++s) {
        const std::vector<Index> quad{ay[s], ax[s], ax[s + 1], ay[s + 1]};
        const Vec3 outward = nlerp(na, nb, n_ - s - 0.5, s + 0.5);
        for (const auto& t : detail::triangulate_loop(positions_, quad, outward)) {
          Pending p{t, fillet, std::min(e.a, e.b), {}, false};
          if (continuous) {
            // Interpolate across the fold so the strip joins both panels.
            const auto& ma = maps.at(e.a);
            const auto& mb = maps.at(e.b);
            p.explicit_uv = true;
            for (int k = 0; k < 3; ++k) {
              const Arc& arc = std::find(ax.begin(), ax.end(), t[k]) != ax.end() ? ax : ay;
              const std::size_t si = static_cast<std::size_t>(std::find(arc.begin(), arc.end(), t[k]) - arc.begin());
              const double w = static_cast<double>(si) / n_;
              p.uv[k] = (1.0 - w) * ma(positions_[arc.front()]) + w * mb(positions_[arc.back()]);
            }
          }
          pending_.push_back(p);
        }
      }
    }

    TriMesh out;
    out.positions = positions_;
    std::set<Index> rebuilt;
    for (const auto& [key, ids] : replace_) rebuilt.insert(key.first);

    for (std::size_t i = 0; i < in_.triangle_count(); ++i) {
      if (rebuilt.count(in_.groups[i])) continue;
      out.triangles.push_back(in_.triangles[i]);
      out.groups.push_back(in_.groups[i]);
      if (with_uv) out.uv.push_back(in_.uv[i]);
    }
    for (const Index g : rebuilt) {
      const Patch& p = patches_.at(g);
      if (!p.planar) unsupported("panel " + std::to_string(g) + " is not planar");
      std::vector<Index> loop;
      for (auto v : p.loop) {
        const auto it = replace_.find({g, v});
        if (it == replace_.end()) loop.push_back(v);
        else loop.insert(loop.end(), it->second.begin(), it->second.end());
      }
      for (const auto& t : detail::triangulate_loop(positions_, loop, p.normal)) {
        out.triangles.push_back(t);
        out.groups.push_back(g);
        if (with_uv) {
          const auto& m = maps.at(g);
          out.uv.push_back({m(positions_[t[0]]), m(positions_[t[1]]), m(positions_[t[2]])});
        }
      }
    }
    for (const auto& p : pending_) {
      out.triangles.push_back(p.tri);
      out.groups.push_back(p.group);
      if (with_uv) {
        if (p.explicit_uv) {
          out.uv.push_back(p.uv);
        } else {
          const auto& m = maps.at(p.uv_owner);
          out.uv.push_back({m(positions_[p.tri[0]]), m(positions_[p.tri[1]]), m(positions_[p.tri[2]])});
        }
      }
    }
    compact(out);
    validate(out);
    return out;
  }

  static void compact(TriMesh& mesh) {
    std::vector<Index> remap(mesh.vertex_count(), ~Index{0});
    for (const auto& t : mesh.triangles)
      for (auto v : t) remap[v] = 0;
    std::vector<Vec3> kept;
    for (std::size_t v = 0; v < remap.size(); ++v) {
      if (remap[v] == ~Index{0}) continue;
      remap[v] = static_cast<Index>(kept.size());
      kept.push_back(mesh.positions[v]);
    }
    for (auto& t : mesh.triangles)
      for (auto& v : t) v = remap[v];
    mesh.positions = std::move(kept);
  }

  struct Pending {
    Triangle tri;
    Index group;
    Index uv_owner;
    std::array<Vec2, 3> uv;
    bool explicit_uv;
  };

  const TriMesh& in_;
  double r_;
  std::uint32_t n_;
  const EdgeSelector& select_;

  std::map<DirectedEdge, std::size_t> directed_;  // directed edge -> triangle
  std::map<DirectedEdge, Index> owner_;           // panel boundary edge -> group
  std::map<Index, Patch> patches_;
  std::vector<SelectedEdge> selected_;
  std::map<Index, std::vector<std::size_t>> vertex_edges_;
  std::map<std::pair<std::size_t, Index>, Arc> arcs_;
  std::map<std::pair<Index, Index>, std::vector<Index>> replace_;  // (group, vertex)
  std::vector<Vec3> positions_;
  std::vector<Pending> pending_;
  Index next_fillet_ = group::kFilletBase;
};

}  // namespace

TriMesh bevel_edges(const TriMesh& mesh, double radius, std::uint32_t segments, const EdgeSelector& select) {
  if (!std::isfinite(radius) || radius < 0.0)
    throw Error(ErrorCode::kInvalidArgument, "bevel_edges: radius must be >= 0", "bevel_radius");
  if (segments < 1) throw Error(ErrorCode::kInvalidArgument, "bevel_edges: segments must be >= 1", "bevel_segments");
  if (radius == 0.0) return mesh;
  validate(mesh);
  Beveler b(mesh, radius, segments, select);
  TriMesh out = b.run();
  out.normals.clear();
  return out;
}

}  // namespace boxsynth
