// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "boxsynth/mesh.hpp"
#include "boxsynth/pose.hpp"

namespace boxsynth {

/// Pinhole intrinsics with square pixels and the principal point at the
/// image center. The vertical field of view follows from the aspect ratio.
struct Intrinsics {
  std::uint32_t width = 640;
  std::uint32_t height = 480;
  double horizontal_fov = 1.0471975511965976;  // 60 degrees

  double focal_px() const;
  double cx() const { return 0.5 * width; }
  double cy() const { return 0.5 * height; }

  bool operator==(const Intrinsics&) const = default;
};

/// Throws Error(kInvalidArgument) for zero dimensions or fov outside (0, pi).
void validate(const Intrinsics& intr);

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
};

/// Unit camera-frame direction through the center of pixel (col, row).
Vec3 pixel_direction(const Intrinsics& intr, std::uint32_t col, std::uint32_t row);

/// One world-space ray per pixel in row-major order.
std::vector<Ray> generate_rays(const Intrinsics& intr, const RigidPose& camera_to_world);

/// Projects a camera-frame point to continuous pixel coordinates, where
/// pixel (c, r) covers [c, c+1) x [r, r+1).
Vec2 project(const Intrinsics& intr, const Vec3& camera_point);

}  // namespace boxsynth
