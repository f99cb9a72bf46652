// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

#include "boxsynth/box_model.hpp"
#include "boxsynth/camera.hpp"
#include "boxsynth/pose.hpp"

namespace boxsynth {

/// Identifier of the stream derivation, recorded in dataset manifests.
inline constexpr std::string_view kRngId = "mt19937_64+seed_seq(seed_lo,seed_hi,index_lo,index_hi)/v1";

/// Per-sample random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the conversions to uniform and
/// normal variates are implemented here so they do not depend on the
/// standard library's distribution classes.
class RngStream {
 public:
  explicit RngStream(std::seed_seq& seq) : engine_(seq) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1): 52 random bits, offset by half a step.
  double uniform() { return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52; }

  /// Standard normal via Box-Muller; consumes exactly two engine outputs.
  double normal();

  bool operator==(const RngStream&) const = default;

 private:
  std::mt19937_64 engine_;
};

/// Stream for one sample: a pure function of (master_seed, sample_index).
RngStream derive_stream(std::uint64_t master_seed, std::uint64_t sample_index);

/// Truncated-normal parameter: base + clamp(N(mu, sigma^2), -sigma*gamma, sigma*gamma).
struct ParamSpec {
  double base = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  double gamma = 2.0;

  double lower() const { return base - sigma * gamma; }
  double upper() const { return base + sigma * gamma; }
  bool operator==(const ParamSpec&) const = default;
};

struct ScannerConfig {
  Intrinsics intrinsics;
  double noise_std = 0.0;  // meters along the ray
  /// Projector position in the camera frame; enables the projector shadow
  /// pass when set.
  std::optional<Vec3> projector_offset;

  bool operator==(const ScannerConfig&) const = default;
};

struct GenerationConfig {
  ParamSpec size_x{0.25, 0.0, 0.1, 2.0};
  ParamSpec size_y{0.25, 0.0, 0.1, 2.0};
  ParamSpec size_z{0.25, 0.0, 0.1, 2.0};
  ParamSpec flap_length{0.10, 0.0, 0.015, 2.0};
  ParamSpec flap_taper{0.010, 0.0, 0.005, 2.0};
  std::array<ParamSpec, 4> open{{{1.5707963267948966, 0.0, 0.5, 2.0},
                                 {1.5707963267948966, 0.0, 0.5, 2.0},
                                 {1.5707963267948966, 0.0, 0.5, 2.0},
                                 {1.5707963267948966, 0.0, 0.5, 2.0}}};
  ParamSpec thickness{0.003, 0.0, 0.0005, 2.0};
  ParamSpec bevel_radius{0.005, 0.0, 0.0015, 2.0};
  std::uint32_t bevel_segments = 3;
  double camera_distance_min = 1.0;
  double camera_distance_max = 1.7;
  std::uint64_t master_seed = 0;
  ScannerConfig scanner;
  bool randomize_box_yaw = false;

  bool operator==(const GenerationConfig&) const = default;
};

/// Widest flap opening a config may sample when boxes have thickness.
/// Flaps folded further back against the wall cannot be thickened.
inline constexpr double kMaxSolidOpenAngle = 2.9;

/// Throws Error(kConfigInvalid) naming the field when a spec is malformed or
/// when the spec ranges admit a BoxParams that violates its invariants.
void validate(const GenerationConfig& cfg);

/// The clamp step alone: base + clamp(raw_draw, -sigma*gamma, sigma*gamma).
double apply_truncation(double raw_draw, const ParamSpec& spec);

double sample_truncated(RngStream& stream, const ParamSpec& spec);

/// Draw order: size x, y, z, flap_length, flap_taper, open[0..3],
/// thickness, bevel_radius. Open angles are clamped to [0, pi].
BoxParams sample_box_params(RngStream& stream, const GenerationConfig& cfg);

/// Camera at distance * direction, looking at the origin.
RigidPose camera_pose_from(const Vec3& direction, double distance);

/// Direction: uniform on the sphere folded into the positive octant by
/// taking absolute values (two uniforms); distance: uniform in the
/// configured range (one uniform).
RigidPose sample_camera_pose(RngStream& stream, const GenerationConfig& cfg);

}  // namespace boxsynth
