// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Geometry>
#include <nlohmann/json.hpp>

#include "boxsynth/box_model.hpp"
#include "boxsynth/pose.hpp"
#include "boxsynth/sampling.hpp"
#include "boxsynth/scanner.hpp"

namespace boxsynth {

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr std::size_t kSpcdHeaderBytes = 13;

/// Oriented cuboid of the box body (outer size, flaps excluded).
struct VolumeBox {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Ones();
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();  // stored w, x, y, z

  bool operator==(const VolumeBox& o) const {
    return center == o.center && half_extents == o.half_extents && rotation.coeffs() == o.rotation.coeffs();
  }
};

VolumeBox ground_truth_volume_box(const BoxParams& params, const RigidPose& box_pose);

struct SampleRecord {
  StructuredCloud cloud;
  RigidPose camera_to_world;
  VolumeBox volume_box;
  BoxParams box_params;
  std::uint64_t sample_index = 0;
  std::uint64_t master_seed = 0;
};

// --- cloud.spcd -----------------------------------------------------------

/// Little-endian: "SPCD", u8 version, u32 width, u32 height, then
/// height*width*3 float32 in row-major pixel order.
std::vector<std::uint8_t> encode_spcd(const StructuredCloud& cloud);

/// Throws Error with kBadMagic, kVersionMismatch, kTruncated,
/// kDimensionMismatch or kMalformedPayload.
StructuredCloud decode_spcd(const std::vector<std::uint8_t>& bytes);

// --- meta.json / config ---------------------------------------------------

nlohmann::json to_json(const BoxParams& params);
/// Accepts `open` as one number or four. Throws Error(kInvalidParams).
BoxParams box_params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GenerationConfig& cfg);
/// Missing keys keep their defaults. Throws Error(kConfigInvalid).
GenerationConfig config_from_json(const nlohmann::json& j);
/// Throws Error(kConfigNotFound) / Error(kMalformedJson) / Error(kConfigInvalid).
GenerationConfig load_config(const std::filesystem::path& path);

nlohmann::json meta_to_json(const SampleRecord& rec);

/// Serialized JSON text: 2-space indent, shortest round-trip doubles,
/// trailing newline.
std::string dump_json(const nlohmann::json& j);

// --- sample directories ----------------------------------------------------

std::string sample_dir_name(std::uint64_t index);  // sample_000042

/// Writes cloud.spcd and meta.json into `dir` (created if needed). Files
/// are written to temporaries and renamed, so a present file is complete.
void write_sample(const std::filesystem::path& dir, const SampleRecord& rec);

SampleRecord read_sample(const std::filesystem::path& dir);

// --- generation ------------------------------------------------------------

/// Everything generated for one sample index, before serialization.
struct GeneratedSample {
  SampleRecord record;
  TriMesh mesh;  // world frame
  RigidPose box_pose;
};

/// Stream -> params -> camera -> (yaw) -> mesh -> scan -> shadow -> noise.
GeneratedSample generate_sample(const GenerationConfig& cfg, std::uint64_t index);

struct GenerateOptions {
  std::size_t count = 1;
  unsigned threads = 1;
  bool resume = false;
  /// Called after each finished sample with (done, count); serialized.
  std::function<void(std::size_t, std::size_t)> progress;
};

struct Manifest {
  std::size_t count = 0;
  GenerationConfig config;
  std::string tool_version;
  std::string rng_id;
  int format_version = 0;
};

Manifest generate_dataset(const GenerationConfig& cfg, const std::filesystem::path& out,
                          const GenerateOptions& options);

Manifest read_manifest(const std::filesystem::path& root);

}  // namespace boxsynth
