// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#include "boxsynth/box_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "boxsynth/error.hpp"
#include "polygon.hpp"

namespace boxsynth {

namespace {

// Side i in order +X, +Y, -X, -Y.
struct Side {
  Vec2 out;    // outward direction in the XY plane
  Vec2 along;  // hinge direction, z x out
  double half_out;
  double half_along;
};

Side side(const BoxParams& p, int i) {
  static constexpr double kOut[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Side s;
  s.out = Vec2(kOut[i][0], kOut[i][1]);
  s.along = Vec2(-s.out.y(), s.out.x());
  const bool x_side = (i % 2) == 0;
  s.half_out = 0.5 * (x_side ? p.size.x() : p.size.y());
  s.half_along = 0.5 * (x_side ? p.size.y() : p.size.x());
  return s;
}

Vec3 lift(const Vec2& v, double z = 0.0) { return Vec3(v.x(), v.y(), z); }

bool has_flaps(const BoxParams& p) { return p.flap_length >= kMinFlapLength; }

[[noreturn]] void reject(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kInvalidParams, "invalid box params: " + field + " " + why, field);
}

}  // namespace

void validate(const BoxParams& p) {
  const char* axes[3] = {"size.x", "size.y", "size.z"};
  for (int k = 0; k < 3; ++k) {
    if (!std::isfinite(p.size[k]) || !(p.size[k] > 0.0)) reject(axes[k], "must be > 0");
  }
  const double min_xy = std::min(p.size.x(), p.size.y());
  const double min_all = std::min(min_xy, p.size.z());
  if (!std::isfinite(p.thickness) || p.thickness < 0.0 || !(p.thickness < 0.5 * min_xy))
    reject("thickness", "must satisfy 0 <= thickness < min(size.x, size.y)/2");
  if (!std::isfinite(p.bevel_radius) || p.bevel_radius < 0.0 || !(p.bevel_radius < 0.5 * min_all))
    reject("bevel_radius", "must satisfy 0 <= bevel_radius < min(size)/2");
  if (!std::isfinite(p.flap_length) || p.flap_length < 0.0) reject("flap_length", "must be >= 0");
  if (!std::isfinite(p.flap_taper) || p.flap_taper < 0.0 || p.flap_taper > 0.5 * min_xy)
    reject("flap_taper", "must satisfy 0 <= flap_taper <= min(size.x, size.y)/2");
  for (int i = 0; i < 4; ++i) {
    if (!std::isfinite(p.open[i]) || p.open[i] < 0.0 || p.open[i] > std::numbers::pi)
      reject("open[" + std::to_string(i) + "]", "must lie in [0, pi]");
  }
  if (p.bevel_segments < 1) reject("bevel_segments", "must be >= 1");
}

TriMesh build_shell(const BoxParams& params) {
  validate(params);
  TriMesh mesh;
  auto& pos = mesh.positions;
  const double height = params.size.z();

  // Corner k sits between side k and side k+1; bottoms are 0..3, tops 4..7.
  for (int level = 0; level < 2; ++level) {
    for (int k = 0; k < 4; ++k) {
      const Side a = side(params, k);
      const Side b = side(params, (k + 1) % 4);
      pos.push_back(lift(a.out * a.half_out + b.out * b.half_out, level == 0 ? 0.0 : height));
    }
  }

  auto emit = [&](const std::vector<std::uint32_t>& loop, std::uint32_t g, const Vec3& normal) {
    for (const auto& t : detail::triangulate_loop(pos, loop, normal)) {
      mesh.triangles.push_back(t);
      mesh.groups.push_back(g);
    }
  };

  emit({3, 2, 1, 0}, group::kBase, Vec3(0, 0, -1));
  for (int i = 0; i < 4; ++i) {
    const auto a = static_cast<std::uint32_t>((i + 3) % 4);
    const auto b = static_cast<std::uint32_t>(i);
    emit({a, b, b + 4, a + 4}, group::kWall0 + i, lift(side(params, i).out));
  }

  if (!has_flaps(params)) return mesh;

  for (int i = 0; i < 4; ++i) {
    const Side s = side(params, i);
    const double theta = params.open[i];
    // Unit direction from the hinge toward the tip, and outward normal.
    const Vec3 dir = lift(s.out) * std::sin(theta) + Vec3::UnitZ() * std::cos(theta);
    const Vec3 normal = lift(s.out) * std::cos(theta) - Vec3::UnitZ() * std::sin(theta);
    const auto a = static_cast<std::uint32_t>((i + 3) % 4 + 4);
    const auto b = static_cast<std::uint32_t>(i + 4);
    const double tip_half = s.half_along - params.flap_taper;
    const Vec3 hinge_mid = lift(s.out * s.half_out, height);
    const Vec3 tip_mid = hinge_mid + params.flap_length * dir;
    const auto first = static_cast<std::uint32_t>(pos.size());
    if (tip_half * 2.0 < kMinFlapLength) {
      pos.push_back(tip_mid);
      emit({a, b, first}, group::kFlap0 + i, normal);
    } else {
      pos.push_back(tip_mid - tip_half * lift(s.along));
      pos.push_back(tip_mid + tip_half * lift(s.along));
      emit({a, b, first + 1, first}, group::kFlap0 + i, normal);
    }
  }
  return mesh;
}

TriMesh unwrap_uv(const BoxParams& params, TriMesh shell) {
  const double height = params.size.z();
  auto sheet = [&](std::uint32_t g, const Vec3& p) -> Vec2 {
    if (g == group::kBase) return Vec2(p.x(), p.y());
    if (group::is_wall(g)) {
      const Side s = side(params, static_cast<int>(g - group::kWall0));
      const Vec2 xy(p.x(), p.y());
      return s.out * (s.half_out + p.z()) + s.along * xy.dot(s.along);
    }
    if (group::is_flap(g)) {
      const int i = static_cast<int>(g - group::kFlap0);
      const Side s = side(params, i);
      const Vec2 xy(p.x(), p.y());
      const double theta = params.open[i];
      const double run = (xy.dot(s.out) - s.half_out) * std::sin(theta) + (p.z() - height) * std::cos(theta);
      return s.out * (s.half_out + height + run) + s.along * xy.dot(s.along);
    }
    throw Error(ErrorCode::kInvalidArgument,
                "unwrap_uv: triangle group " + std::to_string(g) + " is not a shell panel");
  };
  shell.uv.resize(shell.triangle_count());
  for (std::size_t i = 0; i < shell.triangle_count(); ++i) {
    for (int k = 0; k < 3; ++k) shell.uv[i][k] = sheet(shell.groups[i], shell.positions[shell.triangles[i][k]]);
  }
  return shell;
}

TriMesh build_box(const BoxParams& params) {
  TriMesh mesh = unwrap_uv(params, build_shell(params));
  if (params.bevel_radius > 0.0) {
    const auto body_edge = [](std::uint32_t a, std::uint32_t b) {
      return (a == group::kBase && group::is_wall(b)) || (group::is_wall(a) && group::is_wall(b));
    };
    mesh = bevel_edges(mesh, params.bevel_radius, params.bevel_segments, body_edge);
  }
  if (params.thickness > 0.0) mesh = solidify(mesh, params.thickness);
  validate(mesh);
  compute_normals(mesh);
  return mesh;
}

}  // namespace boxsynth
