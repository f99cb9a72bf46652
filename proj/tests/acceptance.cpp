// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "boxsynth/box_model.hpp"
#include "boxsynth/dataset.hpp"
#include "boxsynth/error.hpp"
#include "boxsynth/metrics.hpp"
#include "boxsynth/sampling.hpp"
#include "boxsynth/scanner.hpp"
#include "support.hpp"

using namespace boxsynth;
using namespace boxsynth::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

class Criterion {
 public:
  explicit Criterion(std::string name) : name_(std::move(name)), start_(Clock::now()) {}

  /// Records a failed check; the first few are shown.
  void check(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_++ < 3) problems_ << (problems_.tellp() > 0 ? "; " : "") << what;
  }
  void note(const std::string& s) { notes_ << (notes_.tellp() > 0 ? ", " : "") << s; }
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }
  bool passed() const { return failures_ == 0; }

  void report() const {
    std::ostringstream line;
    line << (passed() ? "PASS" : "FAIL") << "  " << name_ << "  [" << notes_.str();
    if (!passed()) line << "; " << failures_ << " failed check(s): " << problems_.str();
    line << "]";
    std::cout << line.str() << std::endl;
  }

 private:
  std::string name_;
  Clock::time_point start_;
  std::size_t failures_ = 0;
  std::ostringstream problems_, notes_;
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

int run_cli(const std::string& args, std::string* output = nullptr) {
  const std::string cmd = std::string(BOXSYNTH_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return -1;
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int raw = pclose(pipe);
  if (output) *output = out;
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

void guarded(Criterion& c, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    c.check(false, std::string("exception: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

bool determinism(const fs::path& work) {
  Criterion c("determinism: generate --count 10 --seed 42, twice and 1 vs 8 threads, byte-identical, < 60 s");
  guarded(c, [&] {
    const std::string base = "generate --count 10 --seed 42 --out ";
    c.check(run_cli(base + q(work / "a")) == 0, "run a failed");
    c.check(run_cli(base + q(work / "b")) == 0, "run b failed");
    c.check(run_cli(base + q(work / "t1") + " --threads 1") == 0, "1-thread run failed");
    c.check(run_cli(base + q(work / "t8") + " --threads 8") == 0, "8-thread run failed");
    const auto a = snapshot_tree(work / "a");
    c.check(a.size() == 21, "expected 10 samples x 2 files + manifest, got " + std::to_string(a.size()));
    c.check(a == snapshot_tree(work / "b"), "repeat run differs");
    c.check(snapshot_tree(work / "t1") == snapshot_tree(work / "t8"), "1 vs 8 threads differ");
    c.check(a == snapshot_tree(work / "t1"), "default thread count differs from 1 thread");
    c.note(std::to_string(a.size()) + " files identical");
  });
  c.check(c.seconds() < 60.0, "took " + fmt(c.seconds()) + " s");
  c.note(fmt(c.seconds(), 3) + " s");
  c.report();
  return c.passed();
}

bool sampling_bounds() {
  Criterion c("sampling bounds: 1e5 size_x draws (base 0.25, sigma 0.1, gamma 2) in [0.05, 0.45], "
              "saturation 0.0455 +- 0.005, mean 0.25 +- 0.002");
  guarded(c, [&] {
    const GenerationConfig cfg;
    const ParamSpec& spec = cfg.size_x;
    c.check(spec == (ParamSpec{0.25, 0.0, 0.1, 2.0}), "default size_x spec changed");
    // The clamp interval is base -+ sigma*gamma evaluated in double; it equals
    // [0.05, 0.45] to within one ulp.
    c.check(std::abs(spec.lower() - 0.05) <= 1e-16 && std::abs(spec.upper() - 0.45) <= 1e-16,
            "clamp interval is not [0.05, 0.45]");
    const int n = 100000;
    int outside = 0, saturated = 0;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      RngStream s = derive_stream(2024, static_cast<std::uint64_t>(i));
      const double v = sample_box_params(s, cfg).size.x();
      outside += (v < spec.lower() || v > spec.upper());
      saturated += (v == spec.lower() || v == spec.upper());
      sum += v;
    }
    const double frac = static_cast<double>(saturated) / n;
    const double analytic = std::erfc(std::sqrt(2.0));  // 2 Phi(-2)
    const double mean = sum / n;
    c.check(outside == 0, std::to_string(outside) + " draws outside");
    c.check(std::abs(frac - 0.0455) <= 0.005, "saturation " + fmt(frac));
    c.check(std::abs(mean - 0.25) <= 0.002, "mean " + fmt(mean));
    c.note("saturation " + fmt(frac, 4) + " (2Phi(-2) = " + fmt(analytic, 4) + ")");
    c.note("mean " + fmt(mean, 6));
  });
  c.report();
  return c.passed();
}

bool camera_sampling() {
  Criterion c("camera sampling: 1e5 poses, distance in (1.0, 1.7), octant, mean 1.35 +- 0.01, orthonormal 1e-9");
  guarded(c, [&] {
    const GenerationConfig cfg;
    const int n = 100000;
    double sum = 0.0, worst_ortho = 0.0;
    int bad_distance = 0, bad_octant = 0;
    for (int i = 0; i < n; ++i) {
      RngStream s = derive_stream(77, static_cast<std::uint64_t>(i));
      sample_box_params(s, cfg);
      const RigidPose pose = sample_camera_pose(s, cfg);
      const double d = pose.translation.norm();
      bad_distance += !(d > 1.0 && d < 1.7);
      bad_octant += !(pose.translation.array() >= 0.0).all();
      worst_ortho = std::max(worst_ortho, orthonormality_error(pose.rotation));
      sum += d;
    }
    const double mean = sum / n;
    c.check(bad_distance == 0, std::to_string(bad_distance) + " distances out of range");
    c.check(bad_octant == 0, std::to_string(bad_octant) + " directions outside the octant");
    c.check(std::abs(mean - 1.35) <= 0.01, "mean distance " + fmt(mean));
    c.check(worst_ortho <= 1e-9, "orthonormality error " + fmt(worst_ortho));
    c.note("mean distance " + fmt(mean, 6));
    c.note("max orthonormality error " + fmt(worst_ortho, 3));
  });
  c.report();
  return c.passed();
}

bool mesh_topology() {
  Criterion c("mesh topology: 1000 sampled boxes closed 2-manifold, Euler 2, no degenerate triangles; "
              "closed-form AABB for taper = 0, bevel = 0 within 1e-12");
  guarded(c, [&] {
    std::size_t closed = 0;
    double min_area = std::numeric_limits<double>::infinity(), worst_aabb = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      const BoxParams p = random_box_params(1234, i);
      c.check(p.thickness > 0.0, "sampled thickness is zero");
      const TriMesh m = build_box(p);
      const auto topo = analyze_topology(m);
      const bool ok = topo.closed_manifold() && topo.euler() == 2;
      closed += ok;
      c.check(ok, "sample " + std::to_string(i) + " not a closed sphere");
      min_area = std::min(min_area, min_triangle_area(m));

      BoxParams sharp = p;
      sharp.flap_taper = 0.0;
      sharp.bevel_radius = 0.0;
      const Aabb got = bounds(build_box(sharp));
      const Aabb want = closed_form_bounds(sharp);
      worst_aabb = std::max({worst_aabb, (got.min - want.min).cwiseAbs().maxCoeff(),
                             (got.max - want.max).cwiseAbs().maxCoeff()});
    }
    c.check(min_area > 1e-12, "degenerate triangle, area " + fmt(min_area));
    c.check(worst_aabb <= 1e-12, "AABB deviation " + fmt(worst_aabb));
    c.note(std::to_string(closed) + "/1000 closed");
    c.note("min triangle area " + fmt(min_area, 3) + " m^2");
    c.note("max AABB deviation " + fmt(worst_aabb, 3) + " m");
  });
  c.report();
  return c.passed();
}

bool uv_isometry() {
  Criterion c("UV isometry: per-face UV area equals shell area within 1e-9 relative, 100 param sets");
  guarded(c, [&] {
    double worst = 0.0;
    std::size_t faces = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
      const BoxParams p = random_box_params(99, i);
      const TriMesh m = unwrap_uv(p, build_shell(p));
      for (std::size_t t = 0; t < m.triangle_count(); ++t, ++faces) {
        const double a = triangle_area(m, t);
        worst = std::max(worst, std::abs(uv_area(m, t) - a) / a);
      }
    }
    c.check(worst <= 1e-9, "relative deviation " + fmt(worst));
    c.note(std::to_string(faces) + " faces");
    c.note("max relative deviation " + fmt(worst, 3));
  });
  c.report();
  return c.passed();
}

bool scanner_oracle() {
  Criterion c("scanner oracle: 20 scenes at 64x64, BVH == brute force (mask, triangles, points < 1e-9 m), "
              "reprojection <= 0.5 px, < 120 s");
  guarded(c, [&] {
    GenerationConfig cfg;
    cfg.master_seed = 555;
    cfg.randomize_box_yaw = true;
    cfg.scanner.intrinsics.width = 64;
    cfg.scanner.intrinsics.height = 64;
    const Intrinsics& intr = cfg.scanner.intrinsics;
    double worst_delta = 0.0, worst_px = 0.0;
    std::size_t valid = 0;
    for (std::uint64_t i = 0; i < 20; ++i) {
      const GeneratedSample g = generate_sample(cfg, i);
      const RigidPose& cam = g.record.camera_to_world;
      const ScanResult fast = scan_detailed(g.mesh, intr, cam, ScanBackend::kBvh);
      const ScanResult slow = scan_detailed(g.mesh, intr, cam, ScanBackend::kBruteForce);
      c.check(fast.triangle == slow.triangle, "scene " + std::to_string(i) + " triangle indices differ");
      c.check(fast.cloud.identical(slow.cloud), "scene " + std::to_string(i) + " clouds differ");
      for (std::uint32_t row = 0; row < intr.height; ++row) {
        for (std::uint32_t col = 0; col < intr.width; ++col) {
          const std::size_t k = std::size_t{row} * intr.width + col;
          c.check(fast.cloud.valid(k) == slow.cloud.valid(k), "validity differs");
          if (!fast.cloud.valid(k) || !slow.cloud.valid(k)) continue;
          ++valid;
          const Vec3 dir = pixel_direction(intr, col, row);
          worst_delta = std::max(worst_delta, (fast.t[k] * dir - slow.t[k] * dir).norm());
          const auto& p = fast.cloud.points[k];
          const Vec2 uv = project(intr, Vec3(p[0], p[1], p[2]));
          worst_px = std::max({worst_px, std::abs(uv.x() - (col + 0.5)), std::abs(uv.y() - (row + 0.5))});
        }
      }
    }
    c.check(worst_delta < 1e-9, "point delta " + fmt(worst_delta));
    c.check(worst_px <= 0.5, "reprojection " + fmt(worst_px) + " px");
    c.check(valid > 1000, "only " + std::to_string(valid) + " valid pixels");
    c.note(std::to_string(valid) + " valid pixels");
    c.note("max point delta " + fmt(worst_delta, 3) + " m");
    c.note("max reprojection " + fmt(worst_px, 3) + " px");
  });
  c.check(c.seconds() < 120.0, "took " + fmt(c.seconds()) + " s");
  c.note(fmt(c.seconds(), 3) + " s");
  c.report();
  return c.passed();
}

bool metrics() {
  Criterion c("metrics: 1000 axis-angle cases within 1e-9, left-invariance within 1e-9, "
              "yaw-pi absorption exactly 0, 3-4-5 exact");
  guarded(c, [&] {
    std::mt19937_64 rng(4242);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    const std::vector<Mat3> identity_only{Mat3::Identity()};
    double worst_angle = 0.0, worst_invariance = 0.0, worst_symmetry = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double alpha = angle(rng);
      const Vec3 axis(normal(rng), normal(rng), normal(rng));
      const double e = rotation_error(axis_angle(axis, alpha), Mat3::Identity(), identity_only);
      worst_angle = std::max(worst_angle, std::abs(e - alpha));

      const Mat3 qr = random_rotation(rng), a = random_rotation(rng), b = random_rotation(rng);
      worst_invariance = std::max(worst_invariance, std::abs(rotation_error(qr * a, qr * b) - rotation_error(a, b)));

      for (const Mat3& s : default_symmetries()) worst_symmetry = std::max(worst_symmetry, rotation_error(a * s, a));
    }
    c.check(worst_angle < 1e-9, "axis-angle error " + fmt(worst_angle));
    c.check(worst_invariance <= 1e-9, "left-invariance error " + fmt(worst_invariance));
    c.check(worst_symmetry == 0.0, "symmetry absorption " + fmt(worst_symmetry));
    c.check(translation_error(Vec3(0, 0, 0), Vec3(3, 4, 0)) == 5.0, "3-4-5 not exact");
    c.check(translation_error(Vec3(1, 2, 3), Vec3(1, 2, 3)) == 0.0, "identical vectors nonzero");
    c.note("max |e_RE - alpha| " + fmt(worst_angle, 3));
    c.note("max invariance gap " + fmt(worst_invariance, 3));
  });
  c.report();
  return c.passed();
}

bool full_scale(const fs::path& work) {
  Criterion c("full scale: 496 samples at 640x480 in < 600 s, manifest verifies, "
              "100-sample self-evaluation 0 mm / 0 rad");
  const fs::path out = work / "full";
  guarded(c, [&] {
    const auto t0 = Clock::now();
    c.check(run_cli("generate --count 496 --seed 2026 --out " + q(out)) == 0, "generate failed");
    const double gen_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    c.check(gen_seconds < 600.0, "generation took " + fmt(gen_seconds) + " s");
    c.note("generation " + fmt(gen_seconds, 4) + " s on " + std::to_string(std::thread::hardware_concurrency()) +
           " core(s)");

    const Manifest m = read_manifest(out);
    GenerationConfig expected;
    expected.master_seed = 2026;
    c.check(m.count == 496, "manifest count " + std::to_string(m.count));
    c.check(m.config == expected, "manifest config differs from the defaults");
    c.check(m.tool_version == kToolVersion && m.rng_id == kRngId && m.format_version == kFormatVersion,
            "manifest provenance fields wrong");
    std::size_t dirs = 0;
    for (const auto& e : fs::directory_iterator(out)) dirs += e.is_directory();
    c.check(dirs == 496, std::to_string(dirs) + " sample directories");
    const SampleRecord last = read_sample(out / sample_dir_name(495));
    c.check(last.cloud.width == 640 && last.cloud.height == 480, "resolution is not 640x480");

    std::vector<PosePrediction> preds;
    for (std::uint64_t i = 396; i < 496; ++i) {
      const SampleRecord r = read_sample(out / sample_dir_name(i));
      preds.push_back({i, r.volume_box.center, r.volume_box.rotation.toRotationMatrix()});
    }
    std::ofstream(work / "self_pred.json") << dump_json(to_json(preds));
    std::string text;
    c.check(run_cli("evaluate --json --gt " + q(out) + " --pred " + q(work / "self_pred.json"), &text) == 0,
            "evaluate failed");
    const auto j = nlohmann::json::parse(text);
    c.check(j["count"] == 100, "evaluated " + j["count"].dump());
    c.check(j["mean_te_mm"].get<double>() == 0.0, "mean e_TE " + j["mean_te_mm"].dump());
    c.check(j["mean_re_rad"].get<double>() == 0.0, "mean e_RE " + j["mean_re_rad"].dump());
    c.note("manifest count " + std::to_string(m.count));
    c.note("self-eval " + j["mean_te_mm"].dump() + " mm / " + j["mean_re_rad"].dump() + " rad");
  });
  c.report();
  fs::remove_all(out);
  return c.passed();
}

bool format(const fs::path& work) {
  Criterion c("format: hand-built 2x2 golden file (13-byte header + 48-byte payload), bitwise round trip");
  guarded(c, [&] {
    std::vector<std::uint8_t> golden = {'S', 'P', 'C', 'D', 0x01, 0x02, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00};
    for (int i = 0; i < 12; ++i) golden.insert(golden.end(), {0x00, 0x00, 0xC0, 0x7F});
    c.check(golden.size() == 61, "golden size");
    c.check(encode_spcd(StructuredCloud(2, 2)) == golden, "encoder output differs from golden bytes");
    const StructuredCloud back = decode_spcd(golden);
    c.check(back.width == 2 && back.height == 2 && back.valid_count() == 0, "golden decode");

    GenerationConfig cfg;
    cfg.master_seed = 17;
    cfg.scanner.noise_std = 0.0005;
    const SampleRecord rec = generate_sample(cfg, 3).record;
    write_sample(work / "fmt", rec);
    const auto bytes = read_bytes(work / "fmt" / "cloud.spcd");
    c.check(bytes.size() == kSpcdHeaderBytes + 640 * 480 * 12, "cloud.spcd size");
    c.check(encode_spcd(decode_spcd(bytes)) == bytes, "re-encode differs");
    const SampleRecord r = read_sample(work / "fmt");
    c.check(r.cloud.identical(rec.cloud), "cloud floats differ after round trip");
    c.check(r.camera_to_world == rec.camera_to_world && r.volume_box == rec.volume_box &&
                r.box_params == rec.box_params && r.sample_index == rec.sample_index &&
                r.master_seed == rec.master_seed,
            "metadata differs after round trip");
    c.note(std::to_string(rec.cloud.valid_count()) + " valid points round-tripped");
  });
  c.report();
  return c.passed();
}

}  // namespace

int main() {
  const fs::path work = scratch_dir("acceptance");
  int failed = 0;
  failed += !determinism(work);
  failed += !sampling_bounds();
  failed += !camera_sampling();
  failed += !mesh_topology();
  failed += !uv_isometry();
  failed += !scanner_oracle();
  failed += !metrics();
  failed += !full_scale(work);
  failed += !format(work);
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << (9 - failed) << "/9 criteria" << std::endl;
  fs::remove_all(work);
  return failed ? 1 : 0;
}
