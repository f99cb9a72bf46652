// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#include "boxsynth/scanner.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "boxsynth/sampling.hpp"

namespace boxsynth {

StructuredCloud::StructuredCloud(std::uint32_t w, std::uint32_t h)
    : width(w), height(h), points(std::size_t{w} * h, invalid_point()) {}

Point3f StructuredCloud::invalid_point() {
  const float nan = std::numeric_limits<float>::quiet_NaN();
  return {nan, nan, nan};
}

bool StructuredCloud::is_valid(const Point3f& p) { return !std::isnan(p[0]); }

std::size_t StructuredCloud::valid_count() const {
  std::size_t n = 0;
  for (const auto& p : points) n += is_valid(p) ? 1 : 0;
  return n;
}

bool StructuredCloud::identical(const StructuredCloud& other) const {
  return width == other.width && height == other.height && points.size() == other.points.size() &&
         (points.empty() || std::memcmp(points.data(), other.points.data(), points.size() * sizeof(Point3f)) == 0);
}

namespace {

template <typename Query>
ScanResult run_scan(const Intrinsics& intr, const RigidPose& pose, Query&& query) {
  validate(intr);
  ScanResult out;
  out.cloud = StructuredCloud(intr.width, intr.height);
  out.triangle.assign(out.cloud.points.size(), -1);
  out.t.assign(out.cloud.points.size(), std::numeric_limits<double>::quiet_NaN());
  std::size_t i = 0;
  for (std::uint32_t row = 0; row < intr.height; ++row) {
    for (std::uint32_t col = 0; col < intr.width; ++col, ++i) {
      const Vec3 dir_cam = pixel_direction(intr, col, row);
      const Ray ray{pose.translation, (pose.rotation * dir_cam).normalized()};
      const auto hit = query(ray);
      if (!hit) continue;
      const Vec3 p = hit->t * dir_cam;
      out.cloud.points[i] = {static_cast<float>(p.x()), static_cast<float>(p.y()), static_cast<float>(p.z())};
      out.triangle[i] = hit->triangle;
      out.t[i] = hit->t;
    }
  }
  return out;
}

}  // namespace

ScanResult scan_detailed(const Bvh& accel, const Intrinsics& intr, const RigidPose& camera_to_world) {
  return run_scan(intr, camera_to_world, [&](const Ray& r) { return accel.intersect(r); });
}

ScanResult scan_detailed(const TriMesh& mesh, const Intrinsics& intr, const RigidPose& camera_to_world,
                         ScanBackend backend) {
  if (backend == ScanBackend::kBruteForce)
    return run_scan(intr, camera_to_world, [&](const Ray& r) { return intersect_brute_force(mesh, r); });
  if (mesh.triangles.empty()) {
    return run_scan(intr, camera_to_world, [](const Ray&) { return std::optional<RayHit>{}; });
  }
  const Bvh accel(mesh);
  return scan_detailed(accel, intr, camera_to_world);
}

StructuredCloud scan(const TriMesh& mesh, const Intrinsics& intr, const RigidPose& camera_to_world) {
  return scan_detailed(mesh, intr, camera_to_world).cloud;
}

StructuredCloud projector_shadow_filter(const StructuredCloud& cloud, const TriMesh& mesh,
                                        const RigidPose& camera_to_world, const Vec3& projector_origin) {
  StructuredCloud out = cloud;
  if (mesh.triangles.empty()) return out;
  const Bvh accel(mesh);
  for (auto& p : out.points) {
    if (!StructuredCloud::is_valid(p)) continue;
    const Vec3 world = camera_to_world.apply(Vec3(p[0], p[1], p[2]));
    const Vec3 delta = world - projector_origin;
    const double length = delta.norm();
    if (!(length > 1e-6)) continue;
    const Ray ray{projector_origin, delta / length};
    if (accel.intersect(ray, length - 1e-6)) p = StructuredCloud::invalid_point();
  }
  return out;
}

void apply_range_noise(StructuredCloud& cloud, RngStream& stream, double std_dev) {
  if (!(std_dev > 0.0)) return;
  for (auto& p : cloud.points) {
    if (!StructuredCloud::is_valid(p)) continue;
    const Vec3 v(p[0], p[1], p[2]);
    const double range = v.norm();
    const double noisy = range + std_dev * stream.normal();
    if (!(noisy > 0.0)) {
      p = StructuredCloud::invalid_point();
      continue;
    }
    const Vec3 q = v * (noisy / range);
    p = {static_cast<float>(q.x()), static_cast<float>(q.y()), static_cast<float>(q.z())};
  }
}

}  // namespace boxsynth
