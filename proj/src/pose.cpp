// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#include "boxsynth/pose.hpp"

#include <cmath>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "boxsynth/error.hpp"

namespace boxsynth {

Mat4 RigidPose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

RigidPose RigidPose::from_matrix(const Mat4& m) {
  RigidPose p;
  p.rotation = m.topLeftCorner<3, 3>();
  p.translation = m.topRightCorner<3, 1>();
  return p;
}

RigidPose look_at(const Vec3& eye, const Vec3& target, const Vec3& up_hint) {
  const Vec3 delta = target - eye;
  if (!delta.allFinite() || delta.norm() == 0.0)
    throw Error(ErrorCode::kInvalidArgument, "look_at: eye and target coincide");
  const Vec3 forward = delta.normalized();
  Vec3 up = up_hint.normalized();
  if (!up.allFinite() || std::abs(forward.dot(up)) > 1.0 - 1e-6) up = Vec3::UnitY();
  if (std::abs(forward.dot(up)) > 1.0 - 1e-6) up = Vec3::UnitX();  // hint was +Y itself
  const Vec3 right = forward.cross(up).normalized();
  const Vec3 down = forward.cross(right);
  RigidPose pose;
  pose.rotation.col(0) = right;
  pose.rotation.col(1) = down;
  pose.rotation.col(2) = forward;
  pose.translation = eye;
  return pose;
}

Mat3 yaw(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix(); }

double orthonormality_error(const Mat3& r) {
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  return std::max(ortho, std::abs(r.determinant() - 1.0));
}

}  // namespace boxsynth
