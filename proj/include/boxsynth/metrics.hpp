// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <nlohmann/json.hpp>

#include "boxsynth/mesh.hpp"
#include "boxsynth/pose.hpp"

namespace boxsynth {

/// Translation error in meters: |t_hat - t|.
double translation_error(const Vec3& t_hat, const Vec3& t);

/// Rotations the box is indistinguishable under: identity and a half turn
/// about its vertical axis.
std::vector<Mat3> default_symmetries();

/// Smallest geodesic angle between R_hat * S and R over S in `symmetry`,
/// in [0, pi]. Inputs must be rotations within 1e-6.
double rotation_error(const Mat3& r_hat, const Mat3& r, const std::vector<Mat3>& symmetry = default_symmetries());

/// Nearest rotation in the Frobenius sense (SVD projection). Throws
/// Error(kInvalidRotation) when `m` is further than `tolerance` from
/// orthonormal or the result would be a reflection.
Mat3 repair_rotation(const Mat3& m, double tolerance = 1e-3);

struct PosePrediction {
  std::uint64_t sample_index = 0;
  Vec3 translation = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
};

/// Parses a JSON array of {sample_index, translation[3], rotation[9]}
/// (row-major); rotations are repaired with repair_rotation.
std::vector<PosePrediction> predictions_from_json(const nlohmann::json& j);
std::vector<PosePrediction> load_predictions(const std::filesystem::path& path);
nlohmann::json to_json(const std::vector<PosePrediction>& predictions);

struct SampleError {
  std::uint64_t sample_index = 0;
  double te_mm = 0.0;
  double re_rad = 0.0;
};

struct EvalSummary {
  double mean_te_mm = 0.0;
  double mean_re_rad = 0.0;
  std::vector<SampleError> samples;  // in prediction order
};

/// Pairs each prediction with sample_{index}/meta.json under `ground_truth`.
/// Throws Error(kDuplicateIndex), Error(kMissingSample) or the reader's
/// error; nothing is summarized on failure.
EvalSummary evaluate(const std::vector<PosePrediction>& predictions, const std::filesystem::path& ground_truth,
                     const std::vector<Mat3>& symmetry = default_symmetries());

nlohmann::json to_json(const EvalSummary& summary);
void print_table(std::ostream& os, const EvalSummary& summary);

}  // namespace boxsynth
