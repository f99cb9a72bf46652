// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#include "boxsynth/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "boxsynth/error.hpp"

namespace boxsynth {

double RngStream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t sample_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(sample_index), static_cast<std::uint32_t>(sample_index >> 32)};
  return RngStream(seq);
}

namespace {

[[noreturn]] void bad_config(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kConfigInvalid, "config: " + field + " " + why, field);
}

void check_spec(const ParamSpec& s, const std::string& name) {
  if (!std::isfinite(s.base) || !std::isfinite(s.mu) || !std::isfinite(s.sigma) || !std::isfinite(s.gamma))
    bad_config(name, "has a non-finite value");
  if (s.sigma < 0.0) bad_config(name + ".sigma", "must be >= 0");
  if (!(s.gamma > 0.0)) bad_config(name + ".gamma", "must be > 0");
}

}  // namespace

void validate(const GenerationConfig& cfg) {
  check_spec(cfg.size_x, "size_x");
  check_spec(cfg.size_y, "size_y");
  check_spec(cfg.size_z, "size_z");
  check_spec(cfg.flap_length, "flap_length");
  check_spec(cfg.flap_taper, "flap_taper");
  for (int i = 0; i < 4; ++i) check_spec(cfg.open[i], "open[" + std::to_string(i) + "]");
  check_spec(cfg.thickness, "thickness");
  check_spec(cfg.bevel_radius, "bevel_radius");

  // Worst cases over the clamped ranges.
  if (!(cfg.size_x.lower() > 0.0)) bad_config("size_x", "range reaches zero");
  if (!(cfg.size_y.lower() > 0.0)) bad_config("size_y", "range reaches zero");
  if (!(cfg.size_z.lower() > 0.0)) bad_config("size_z", "range reaches zero");
  const double min_xy = std::min(cfg.size_x.lower(), cfg.size_y.lower());
  const double min_all = std::min(min_xy, cfg.size_z.lower());
  if (cfg.thickness.lower() < 0.0 || !(cfg.thickness.upper() < 0.5 * min_xy))
    bad_config("thickness", "range must stay within [0, min(size_x, size_y)/2)");
  if (cfg.bevel_radius.lower() < 0.0 || !(cfg.bevel_radius.upper() < 0.5 * min_all))
    bad_config("bevel_radius", "range must stay within [0, min(size)/2)");
  if (cfg.flap_length.lower() < 0.0) bad_config("flap_length", "range reaches below zero");
  if (cfg.flap_taper.lower() < 0.0 || cfg.flap_taper.upper() > 0.5 * min_xy)
    bad_config("flap_taper", "range must stay within [0, min(size_x, size_y)/2]");
  // Fillet ends slide along the flap hinge; flaps must be long enough.
  const bool flaps_possible = cfg.flap_length.upper() >= kMinFlapLength;
  if (cfg.bevel_radius.upper() > 0.0 && flaps_possible && !(cfg.flap_length.lower() > 2.0 * cfg.bevel_radius.upper()))
    bad_config("flap_length", "range must stay above twice the largest bevel_radius");
  if (cfg.thickness.upper() > 0.0 && flaps_possible) {
    for (int i = 0; i < 4; ++i) {
      if (std::min(cfg.open[i].upper(), std::numbers::pi) > kMaxSolidOpenAngle)
        bad_config("open[" + std::to_string(i) + "]", "range must stay at or below " +
                                                          std::to_string(kMaxSolidOpenAngle) +
                                                          " rad when thickness > 0");
    }
  }
  if (cfg.bevel_segments < 1) bad_config("bevel_segments", "must be >= 1");
  if (!(cfg.camera_distance_min > 0.0 && cfg.camera_distance_min < cfg.camera_distance_max) ||
      !std::isfinite(cfg.camera_distance_max))
    bad_config("camera_distance_min", "must satisfy 0 < camera_distance_min < camera_distance_max");
  try {
    validate(cfg.scanner.intrinsics);
  } catch (const Error& e) {
    bad_config("scanner." + e.field(), e.what());
  }
  if (!std::isfinite(cfg.scanner.noise_std) || cfg.scanner.noise_std < 0.0)
    bad_config("scanner.noise_std", "must be >= 0");
  if (cfg.scanner.projector_offset && !cfg.scanner.projector_offset->allFinite())
    bad_config("scanner.projector_offset", "must be finite");
}

double apply_truncation(double raw_draw, const ParamSpec& spec) {
  const double bound = spec.sigma * spec.gamma;
  return spec.base + std::min(std::max(-bound, raw_draw), bound);
}

double sample_truncated(RngStream& stream, const ParamSpec& spec) {
  return apply_truncation(spec.mu + spec.sigma * stream.normal(), spec);
}

BoxParams sample_box_params(RngStream& stream, const GenerationConfig& cfg) {
  BoxParams p;
  p.size.x() = sample_truncated(stream, cfg.size_x);
  p.size.y() = sample_truncated(stream, cfg.size_y);
  p.size.z() = sample_truncated(stream, cfg.size_z);
  p.flap_length = sample_truncated(stream, cfg.flap_length);
  p.flap_taper = sample_truncated(stream, cfg.flap_taper);
  for (int i = 0; i < 4; ++i) p.open[i] = std::clamp(sample_truncated(stream, cfg.open[i]), 0.0, std::numbers::pi);
  p.thickness = sample_truncated(stream, cfg.thickness);
  p.bevel_radius = sample_truncated(stream, cfg.bevel_radius);
  p.bevel_segments = cfg.bevel_segments;
  return p;
}

RigidPose camera_pose_from(const Vec3& direction, double distance) {
  return look_at(direction.normalized() * distance, Vec3::Zero());
}

RigidPose sample_camera_pose(RngStream& stream, const GenerationConfig& cfg) {
  const double z = 2.0 * stream.uniform() - 1.0;
  const double phi = 2.0 * std::numbers::pi * stream.uniform();
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  const Vec3 dir = Vec3(rho * std::cos(phi), rho * std::sin(phi), z).cwiseAbs();
  const double distance =
      cfg.camera_distance_min + (cfg.camera_distance_max - cfg.camera_distance_min) * stream.uniform();
  return camera_pose_from(dir, distance);
}

}  // namespace boxsynth
