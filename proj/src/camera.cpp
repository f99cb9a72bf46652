// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#include "boxsynth/camera.hpp"

#include <cmath>
#include <numbers>

#include "boxsynth/error.hpp"

namespace boxsynth {

double Intrinsics::focal_px() const { return 0.5 * width / std::tan(0.5 * horizontal_fov); }

void validate(const Intrinsics& intr) {
  if (intr.width < 1 || intr.height < 1)
    throw Error(ErrorCode::kInvalidArgument, "intrinsics: width and height must be >= 1", "width");
  if (!(intr.horizontal_fov > 0.0 && intr.horizontal_fov < std::numbers::pi))
    throw Error(ErrorCode::kInvalidArgument, "intrinsics: horizontal_fov must lie in (0, pi)",
                "horizontal_fov");
}

Vec3 pixel_direction(const Intrinsics& intr, std::uint32_t col, std::uint32_t row) {
  const double f = intr.focal_px();
  return Vec3((col + 0.5 - intr.cx()) / f, (row + 0.5 - intr.cy()) / f, 1.0).normalized();
}

std::vector<Ray> generate_rays(const Intrinsics& intr, const RigidPose& camera_to_world) {
  validate(intr);
  std::vector<Ray> rays;
  rays.reserve(std::size_t{intr.width} * intr.height);
  for (std::uint32_t row = 0; row < intr.height; ++row) {
    for (std::uint32_t col = 0; col < intr.width; ++col) {
      rays.push_back({camera_to_world.translation,
                      (camera_to_world.rotation * pixel_direction(intr, col, row)).normalized()});
    }
  }
  return rays;
}

Vec2 project(const Intrinsics& intr, const Vec3& p) {
  const double f = intr.focal_px();
  return Vec2(f * p.x() / p.z() + intr.cx(), f * p.y() / p.z() + intr.cy());
}

}  // namespace boxsynth
