// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "boxsynth/box_model.hpp"
#include "boxsynth/mesh.hpp"
#include "boxsynth/sampling.hpp"

namespace boxsynth::testing {

/// Axis-aligned unit cube [0,1]^3, one group per face, outward winding.
inline TriMesh unit_cube() {
  TriMesh m;
  for (int i = 0; i < 8; ++i) m.positions.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  const std::uint32_t faces[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                                     {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (std::uint32_t f = 0; f < 6; ++f) {
    const auto* q = faces[f];
    m.triangles.push_back({q[0], q[1], q[2]});
    m.triangles.push_back({q[0], q[2], q[3]});
    m.groups.push_back(f);
    m.groups.push_back(f);
  }
  return m;
}

/// Unit square in z = 0 facing +Z, two triangles, group 0.
inline TriMesh unit_quad() {
  TriMesh m;
  m.positions = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  m.groups = {0, 0};
  return m;
}

/// Square of half-size `h` in the plane z = `z`, facing -Z (towards a
/// camera on the negative side).
inline TriMesh plane_quad(double h, double z) {
  TriMesh m;
  m.positions = {Vec3(-h, -h, z), Vec3(h, -h, z), Vec3(h, h, z), Vec3(-h, h, z)};
  m.triangles = {{0, 2, 1}, {0, 3, 2}};
  m.groups = {0, 0};
  return m;
}

/// BoxParams drawn with the default generation config.
inline BoxParams random_box_params(std::uint64_t seed, std::uint64_t index) {
  RngStream s = derive_stream(seed, index);
  return sample_box_params(s, GenerationConfig{});
}

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Relative path -> file bytes for every regular file under `root`.
inline std::map<std::string, std::vector<std::uint8_t>> snapshot_tree(const std::filesystem::path& root) {
  std::map<std::string, std::vector<std::uint8_t>> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[std::filesystem::relative(e.path(), root).generic_string()] = read_bytes(e.path());
  }
  return out;
}

/// Fresh, empty scratch directory below the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("boxsynth_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

/// Rotation of `angle` about unit `axis` (Rodrigues), written out directly.
inline Mat3 axis_angle(const Vec3& axis, double angle) {
  const Vec3 a = axis.normalized();
  Mat3 k;
  k << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0;
  return Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0.0, 3.141592653589793);
  return axis_angle(Vec3(n(rng), n(rng), n(rng)), u(rng));
}

/// Bounds of build_box(p) for taper = 0 and bevel = 0. Outer vertices are
/// known in closed form; inner vertices sit at the least-squares offset over
/// the normals of the panels meeting there (solved here with an SVD).
inline Aabb closed_form_bounds(const BoxParams& p) {
  const double t = p.thickness;
  const Vec3 h(0.5 * p.size.x(), 0.5 * p.size.y(), p.size.z());
  const Vec3 outs[4] = {Vec3::UnitX(), Vec3::UnitY(), -Vec3::UnitX(), -Vec3::UnitY()};
  auto flap_normal = [&](int s) { return Vec3(std::cos(p.open[s]) * outs[s] - std::sin(p.open[s]) * Vec3::UnitZ()); };
  auto flap_dir = [&](int s) { return Vec3(std::sin(p.open[s]) * outs[s] + std::cos(p.open[s]) * Vec3::UnitZ()); };
  Aabb expected;
  for (int c = 0; c < 4; ++c) {
    const int s0 = c, s1 = (c + 1) % 4;  // corner c joins sides c and c+1
    const Vec3 xy = Vec3(h.x() * (outs[s0] + outs[s1]).x(), h.y() * (outs[s0] + outs[s1]).y(), 0.0);
    const Vec3 top = xy + Vec3(0, 0, h.z());
    expected.extend(xy);
    expected.extend(top);
    expected.extend(xy + t * (Vec3::UnitZ() - outs[s0] - outs[s1]));
    Eigen::Matrix<double, 4, 3> a;
    a.row(0) = -outs[s0];
    a.row(1) = -outs[s1];
    a.row(2) = -flap_normal(s0);
    a.row(3) = -flap_normal(s1);
    const Vec3 off = a.jacobiSvd(Eigen::ComputeFullU | Eigen::ComputeFullV).solve(Eigen::Vector4d::Constant(t));
    expected.extend(top + off);
    for (int s : {s0, s1}) {
      const Vec3 tip = top + p.flap_length * flap_dir(s);
      expected.extend(tip);
      expected.extend(tip - t * flap_normal(s));
    }
  }
  return expected;
}

}  // namespace boxsynth::testing
