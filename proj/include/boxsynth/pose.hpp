// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include "boxsynth/mesh.hpp"

namespace boxsynth {

using Mat4 = Eigen::Matrix4d;

/// Rigid transform p -> rotation * p + translation. For cameras this is
/// camera-to-world: columns of `rotation` are the camera X (right),
/// Y (down) and Z (forward) axes in world coordinates.
struct RigidPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_inverse(const Vec3& p) const { return rotation.transpose() * (p - translation); }
  Vec3 forward() const { return rotation.col(2); }
  Mat4 matrix() const;

  static RigidPose from_matrix(const Mat4& m);
  bool operator==(const RigidPose&) const = default;
};

/// Camera pose at `eye` looking at `target`. Image Y points away from
/// `up_hint`; when forward is within 1e-6 of parallel to the hint, +Y is
/// used instead. Throws Error(kInvalidArgument) when eye == target.
RigidPose look_at(const Vec3& eye, const Vec3& target, const Vec3& up_hint = Vec3::UnitZ());

/// Rotation of `angle` radians about world +Z.
Mat3 yaw(double angle);

/// max(|R^T R - I|, |det R - 1|).
double orthonormality_error(const Mat3& r);

}  // namespace boxsynth
