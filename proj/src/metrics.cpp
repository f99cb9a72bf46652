// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#include "boxsynth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <Eigen/SVD>

#include "boxsynth/dataset.hpp"
#include "boxsynth/error.hpp"

namespace boxsynth {

namespace fs = std::filesystem;
using nlohmann::json;

double translation_error(const Vec3& t_hat, const Vec3& t) {
  if (!t_hat.allFinite() || !t.allFinite())
    throw Error(ErrorCode::kNonFinite, "translation_error: non-finite input");
  return (t_hat - t).norm();
}

std::vector<Mat3> default_symmetries() {
  Mat3 half_turn = Mat3::Zero();
  half_turn.diagonal() << -1.0, -1.0, 1.0;
  return {Mat3::Identity(), half_turn};
}

namespace {

void require_rotation(const Mat3& r, const char* what) {
  if (!r.allFinite()) throw Error(ErrorCode::kNonFinite, std::string("rotation_error: ") + what + " is not finite");
  if (orthonormality_error(r) > 1e-6)
    throw Error(ErrorCode::kInvalidRotation, std::string("rotation_error: ") + what + " is not a rotation");
}

// Angle of A * B^T. Both trig components come from the same products so
// that A == B yields an exactly symmetric M and an angle of exactly 0.
double relative_angle(const Mat3& a, const Mat3& b) {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = a(i, 0) * b(j, 0) + a(i, 1) * b(j, 1) + a(i, 2) * b(j, 2);
  const double cos_term = std::clamp(m.trace() - 1.0, -2.0, 2.0);
  const Vec3 axis(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  return std::atan2(axis.norm(), cos_term);
}

}  // namespace

double rotation_error(const Mat3& r_hat, const Mat3& r, const std::vector<Mat3>& symmetry) {
  if (symmetry.empty()) throw Error(ErrorCode::kInvalidArgument, "rotation_error: empty symmetry set");
  require_rotation(r_hat, "prediction");
  require_rotation(r, "ground truth");
  double best = std::numbers::pi;
  for (const Mat3& s : symmetry) best = std::min(best, relative_angle(r_hat * s, r));
  return best;
}

Mat3 repair_rotation(const Mat3& m, double tolerance) {
  if (!m.allFinite()) throw Error(ErrorCode::kInvalidRotation, "rotation has non-finite entries");
  const double err = orthonormality_error(m);
  if (err > tolerance)
    throw Error(ErrorCode::kInvalidRotation, "rotation deviates from orthonormal by " + std::to_string(err));
  if (err <= 1e-12) return m;
  const Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) throw Error(ErrorCode::kInvalidRotation, "rotation is a reflection");
  return r;
}

std::vector<PosePrediction> predictions_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kMalformedJson, "predictions: top level must be an array");
  std::vector<PosePrediction> out;
  out.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    const json& e = j[k];
    const std::string where = "predictions[" + std::to_string(k) + "]";
    auto bad = [&](const std::string& why) { throw Error(ErrorCode::kMalformedJson, where + ": " + why, where); };
    if (!e.is_object()) bad("must be an object");
    if (!e.contains("sample_index") || !e["sample_index"].is_number_unsigned())
      bad("sample_index must be a non-negative integer");
    auto numbers = [&](const char* key, std::size_t n) {
      if (!e.contains(key) || !e[key].is_array() || e[key].size() != n)
        bad(std::string(key) + " must be an array of " + std::to_string(n) + " numbers");
      std::vector<double> v;
      for (const auto& x : e[key]) {
        if (!x.is_number()) bad(std::string(key) + " must contain numbers");
        v.push_back(x.get<double>());
      }
      return v;
    };
    PosePrediction p;
    p.sample_index = e["sample_index"].get<std::uint64_t>();
    const auto t = numbers("translation", 3);
    const auto r = numbers("rotation", 9);
    p.translation = {t[0], t[1], t[2]};
    if (!p.translation.allFinite()) bad("translation must be finite");
    Mat3 m;
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = r[i];
    try {
      p.rotation = repair_rotation(m);
    } catch (const Error& err) {
      throw Error(err.code(), where + ": " + err.what(), where);
    }
    out.push_back(p);
  }
  return out;
}

std::vector<PosePrediction> load_predictions(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string(), path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedJson, path.string() + ": " + e.what(), path.string());
  }
  return predictions_from_json(j);
}

json to_json(const std::vector<PosePrediction>& predictions) {
  json out = json::array();
  for (const auto& p : predictions) {
    json r = json::array();
    for (int i = 0; i < 9; ++i) r.push_back(p.rotation(i / 3, i % 3));
    out.push_back({{"sample_index", p.sample_index},
                   {"translation", {p.translation.x(), p.translation.y(), p.translation.z()}},
                   {"rotation", r}});
  }
  return out;
}

EvalSummary evaluate(const std::vector<PosePrediction>& predictions, const fs::path& ground_truth,
                     const std::vector<Mat3>& symmetry) {
  std::unordered_set<std::uint64_t> seen;
  for (const auto& p : predictions) {
    if (!seen.insert(p.sample_index).second)
      throw Error(ErrorCode::kDuplicateIndex, "duplicate prediction for sample " + std::to_string(p.sample_index));
  }
  EvalSummary summary;
  summary.samples.reserve(predictions.size());
  for (const auto& p : predictions) {
    const fs::path dir = ground_truth / sample_dir_name(p.sample_index);
    if (!fs::is_directory(dir))
      throw Error(ErrorCode::kMissingSample, "no ground truth for sample " + std::to_string(p.sample_index),
                  dir.string());
    const SampleRecord rec = read_sample(dir);
    const Mat3 r = rec.volume_box.rotation.toRotationMatrix();
    SampleError e;
    e.sample_index = p.sample_index;
    e.te_mm = 1000.0 * translation_error(p.translation, rec.volume_box.center);
    e.re_rad = rotation_error(p.rotation, r, symmetry);
    summary.samples.push_back(e);
  }
  double te = 0.0, re = 0.0;
  for (const auto& e : summary.samples) {
    te += e.te_mm;
    re += e.re_rad;
  }
  if (!summary.samples.empty()) {
    summary.mean_te_mm = te / static_cast<double>(summary.samples.size());
    summary.mean_re_rad = re / static_cast<double>(summary.samples.size());
  }
  return summary;
}

json to_json(const EvalSummary& s) {
  json samples = json::array();
  for (const auto& e : s.samples)
    samples.push_back({{"sample_index", e.sample_index}, {"te_mm", e.te_mm}, {"re_rad", e.re_rad}});
  return {{"count", s.samples.size()}, {"mean_te_mm", s.mean_te_mm}, {"mean_re_rad", s.mean_re_rad},
          {"samples", samples}};
}

void print_table(std::ostream& os, const EvalSummary& s) {
  std::ostringstream buf;
  buf << std::fixed;
  buf << std::left << std::setw(14) << "samples" << std::right << std::setw(12) << s.samples.size() << '\n';
  buf << std::left << std::setw(14) << "mean e_TE" << std::right << std::setw(12) << std::setprecision(3)
      << s.mean_te_mm << " mm\n";
  buf << std::left << std::setw(14) << "mean e_RE" << std::right << std::setw(12) << std::setprecision(3)
      << s.mean_re_rad << " rad\n";
  os << buf.str();
}

}  // namespace boxsynth
