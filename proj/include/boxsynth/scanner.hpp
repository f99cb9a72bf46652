// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "boxsynth/bvh.hpp"
#include "boxsynth/camera.hpp"
#include "boxsynth/mesh.hpp"
#include "boxsynth/pose.hpp"

namespace boxsynth {

class RngStream;

using Point3f = std::array<float, 3>;

/// Organized point cloud: one camera-frame point per pixel, row-major.
/// Invalid pixels hold three quiet NaNs.
struct StructuredCloud {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<Point3f> points;

  StructuredCloud() = default;
  StructuredCloud(std::uint32_t w, std::uint32_t h);

  static Point3f invalid_point();
  static bool is_valid(const Point3f& p);

  const Point3f& at(std::uint32_t col, std::uint32_t row) const { return points[std::size_t{row} * width + col]; }
  Point3f& at(std::uint32_t col, std::uint32_t row) { return points[std::size_t{row} * width + col]; }
  std::size_t valid_count() const;
  bool valid(std::size_t i) const { return is_valid(points[i]); }

  /// Bitwise equality of the float payload (NaN == NaN).
  bool identical(const StructuredCloud& other) const;
};

/// Scan plus the per-pixel hit record (-1 for misses).
struct ScanResult {
  StructuredCloud cloud;
  std::vector<std::int64_t> triangle;
  std::vector<double> t;
};

enum class ScanBackend { kBvh, kBruteForce };

/// Casts one ray per pixel through the pinhole camera and records the
/// nearest hit in camera coordinates (X right, Y down, Z forward).
StructuredCloud scan(const TriMesh& mesh, const Intrinsics& intr, const RigidPose& camera_to_world);

ScanResult scan_detailed(const TriMesh& mesh, const Intrinsics& intr, const RigidPose& camera_to_world,
                         ScanBackend backend = ScanBackend::kBvh);

/// Same scan against a prebuilt hierarchy.
ScanResult scan_detailed(const Bvh& accel, const Intrinsics& intr, const RigidPose& camera_to_world);

/// Invalidates points the projector cannot see: a valid point is dropped
/// iff the segment from `projector_origin` (world frame) to the point,
/// shortened by 1e-6 m, hits the mesh.
StructuredCloud projector_shadow_filter(const StructuredCloud& cloud, const TriMesh& mesh,
                                        const RigidPose& camera_to_world, const Vec3& projector_origin);

/// Displaces every valid point along its viewing ray by N(0, std^2),
/// drawing in row-major pixel order.
void apply_range_noise(StructuredCloud& cloud, RngStream& stream, double std_dev);

}  // namespace boxsynth
