// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#include "boxsynth/bvh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "boxsynth/error.hpp"

namespace boxsynth {

namespace {

constexpr std::uint32_t kLeafSize = 4;

bool better(const RayHit& candidate, const std::optional<RayHit>& best) {
  return !best || candidate.t < best->t || (candidate.t == best->t && candidate.triangle < best->triangle);
}

struct SlabRay {
  Vec3 origin, inv;
  std::array<bool, 3> flat;
};

SlabRay make_slab_ray(const Ray& ray) {
  SlabRay s;
  s.origin = ray.origin;
  for (int i = 0; i < 3; ++i) {
    s.flat[i] = ray.direction[i] == 0.0;
    s.inv[i] = s.flat[i] ? 0.0 : 1.0 / ray.direction[i];
  }
  return s;
}

// Entry distance of the ray into [lo, hi], or +inf on a miss.
double slab_entry(const SlabRay& r, const Vec3& lo, const Vec3& hi, double t_max) {
  double t0 = 0.0, t1 = t_max;
  for (int i = 0; i < 3; ++i) {
    if (r.flat[i]) {
      if (r.origin[i] < lo[i] || r.origin[i] > hi[i]) return std::numeric_limits<double>::infinity();
      continue;
    }
    double a = (lo[i] - r.origin[i]) * r.inv[i];
    double b = (hi[i] - r.origin[i]) * r.inv[i];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return std::numeric_limits<double>::infinity();
  }
  return t0;
}

}  // namespace

std::optional<RayHit> intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c,
                                         double t_max) {
  const Vec3& d = ray.direction;
  int kz = 0;
  d.cwiseAbs().maxCoeff(&kz);
  int kx = (kz + 1) % 3;
  int ky = (kx + 1) % 3;
  if (d[kz] < 0.0) std::swap(kx, ky);
  const double sx = d[kx] / d[kz];
  const double sy = d[ky] / d[kz];
  const double sz = 1.0 / d[kz];

  const Vec3 pa = a - ray.origin;
  const Vec3 pb = b - ray.origin;
  const Vec3 pc = c - ray.origin;
  const double ax = pa[kx] - sx * pa[kz], ay = pa[ky] - sy * pa[kz];
  const double bx = pb[kx] - sx * pb[kz], by = pb[ky] - sy * pb[kz];
  const double cx = pc[kx] - sx * pc[kz], cy = pc[ky] - sy * pc[kz];

  double u = cx * by - cy * bx;
  double v = ax * cy - ay * cx;
  double w = bx * ay - by * ax;
  if (u == 0.0 || v == 0.0 || w == 0.0) {
    using Wide = long double;
    u = static_cast<double>(Wide{cx} * Wide{by} - Wide{cy} * Wide{bx});
    v = static_cast<double>(Wide{ax} * Wide{cy} - Wide{ay} * Wide{cx});
    w = static_cast<double>(Wide{bx} * Wide{ay} - Wide{by} * Wide{ax});
  }
  if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) return std::nullopt;
  const double det = u + v + w;
  if (det == 0.0) return std::nullopt;
  const double t_scaled = u * (sz * pa[kz]) + v * (sz * pb[kz]) + w * (sz * pc[kz]);
  const double t = t_scaled / det;
  if (!(t > 0.0 && t < t_max)) return std::nullopt;
  RayHit hit;
  hit.t = t;
  hit.barycentrics = Vec2(v / det, w / det);
  return hit;
}

Bvh::Bvh(const TriMesh& mesh) {
  if (mesh.triangles.empty()) throw Error(ErrorCode::kEmptyMesh, "bvh: mesh has no triangles");
  const auto n = static_cast<std::uint32_t>(mesh.triangle_count());
  index_.resize(n);
  std::iota(index_.begin(), index_.end(), 0u);
  std::vector<Vec3> centroids(n);
  tri_.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto& t = mesh.triangles[i];
    tri_[i] = {mesh.positions[t[0]], mesh.positions[t[1]], mesh.positions[t[2]]};
    centroids[i] = (tri_[i].a + tri_[i].b + tri_[i].c) / 3.0;
  }
  nodes_.reserve(2 * (n / kLeafSize + 1));
  build(0, n, centroids);
  // Reorder triangle copies into leaf order.
  std::vector<Tri> ordered(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto& t = mesh.triangles[index_[i]];
    ordered[i] = {mesh.positions[t[0]], mesh.positions[t[1]], mesh.positions[t[2]]};
  }
  tri_ = std::move(ordered);
}

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  Vec3 clo = lo, chi = hi;
  for (std::uint32_t i = begin; i < end; ++i) {
    const Tri& t = tri_[index_[i]];
    for (const Vec3* p : {&t.a, &t.b, &t.c}) {
      lo = lo.cwiseMin(*p);
      hi = hi.cwiseMax(*p);
    }
    clo = clo.cwiseMin(centroids[index_[i]]);
    chi = chi.cwiseMax(centroids[index_[i]]);
  }
  // Pad so rounding in the slab test never culls a genuine hit.
  const double pad = 1e-9 * (1.0 + std::max(lo.cwiseAbs().maxCoeff(), hi.cwiseAbs().maxCoeff()));
  nodes_[id].lo = lo.array() - pad;
  nodes_[id].hi = hi.array() + pad;

  const std::uint32_t count = end - begin;
  int axis = 0;
  const double spread = (chi - clo).maxCoeff(&axis);
  if (count <= kLeafSize || spread <= 0.0) {
    nodes_[id].first = begin;
    nodes_[id].count = count;
    return id;
  }
  std::sort(index_.begin() + begin, index_.begin() + end, [&](std::uint32_t x, std::uint32_t y) {
    const double cx = centroids[x][axis], cy = centroids[y][axis];
    return cx < cy || (cx == cy && x < y);
  });
  const std::uint32_t mid = begin + count / 2;
  build(begin, mid, centroids);
  const std::uint32_t right = build(mid, end, centroids);
  nodes_[id].first = right;
  nodes_[id].count = 0;
  return id;
}

std::size_t Bvh::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.count > 0; }));
}

std::optional<RayHit> Bvh::intersect(const Ray& ray, double t_max) const {
  const SlabRay slab = make_slab_ray(ray);
  std::optional<RayHit> best;
  std::array<std::uint32_t, 128> stack;
  std::size_t top = 0;
  if (slab_entry(slab, nodes_[0].lo, nodes_[0].hi, t_max) == std::numeric_limits<double>::infinity()) return best;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const Tri& t = tri_[i];
        auto hit = intersect_triangle(ray, t.a, t.b, t.c, t_max);
        if (!hit) continue;
        hit->triangle = index_[i];
        if (better(*hit, best)) best = hit;
      }
      continue;
    }
    const std::uint32_t left = static_cast<std::uint32_t>(&node - nodes_.data()) + 1;
    const std::uint32_t right = node.first;
    const double limit = best ? best->t : t_max;
    const double tl = slab_entry(slab, nodes_[left].lo, nodes_[left].hi, t_max);
    const double tr = slab_entry(slab, nodes_[right].lo, nodes_[right].hi, t_max);
    const bool visit_l = tl <= limit;
    const bool visit_r = tr <= limit;
    if (visit_l && visit_r) {
      // Near child on top of the stack.
      stack[top++] = tl <= tr ? right : left;
      stack[top++] = tl <= tr ? left : right;
    } else if (visit_l) {
      stack[top++] = left;
    } else if (visit_r) {
      stack[top++] = right;
    }
  }
  return best;
}

std::optional<RayHit> intersect_brute_force(const TriMesh& mesh, const Ray& ray, double t_max) {
  std::optional<RayHit> best;
  for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
    const auto& t = mesh.triangles[i];
    auto hit = intersect_triangle(ray, mesh.positions[t[0]], mesh.positions[t[1]], mesh.positions[t[2]], t_max);
    if (!hit) continue;
    hit->triangle = static_cast<std::uint32_t>(i);
    if (better(*hit, best)) best = hit;
  }
  return best;
}

}  // namespace boxsynth
