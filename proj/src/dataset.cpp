// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#include "boxsynth/dataset.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "boxsynth/error.hpp"

namespace boxsynth {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "spcd I/O assumes a little-endian host");
static_assert(sizeof(Point3f) == 12);

namespace {

constexpr char kMagic[4] = {'S', 'P', 'C', 'D'};
constexpr const char* kCloudFile = "cloud.spcd";
constexpr const char* kMetaFile = "meta.json";
constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kVolumeBoxDefinition =
    "oriented cuboid of the box body: outer size, flaps excluded; center at half height above the base";

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string(), path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_atomic(const fs::path& path, const void* data, std::size_t size) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot create " + tmp.string(), tmp.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string(), tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename " + tmp.string() + ": " + ec.message(), path.string());
}

void write_atomic(const fs::path& path, const std::string& text) { write_atomic(path, text.data(), text.size()); }

json parse_json_file(const fs::path& path) {
  const auto bytes = read_file(path);
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedJson, path.string() + ": " + e.what(), path.string());
  }
}

[[noreturn]] void bad_meta(const fs::path& path, const std::string& what) {
  throw Error(ErrorCode::kMalformedJson, path.string() + ": " + what, path.string());
}

std::vector<double> number_array(const json& j, std::size_t n, const fs::path& path, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != n)
    bad_meta(path, std::string(key) + " must be an array of " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) bad_meta(path, std::string(key) + " must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

VolumeBox ground_truth_volume_box(const BoxParams& params, const RigidPose& box_pose) {
  VolumeBox vb;
  vb.center = box_pose.apply(Vec3(0.0, 0.0, 0.5 * params.size.z()));
  vb.half_extents = 0.5 * params.size;
  vb.rotation = Eigen::Quaterniond(box_pose.rotation).normalized();
  if (vb.rotation.w() < 0.0) vb.rotation.coeffs() *= -1.0;
  return vb;
}

std::vector<std::uint8_t> encode_spcd(const StructuredCloud& cloud) {
  const std::size_t n = std::size_t{cloud.width} * cloud.height;
  if (cloud.points.size() != n)
    throw Error(ErrorCode::kDimensionMismatch, "cloud has " + std::to_string(cloud.points.size()) +
                                                   " points for " + std::to_string(cloud.width) + "x" +
                                                   std::to_string(cloud.height));
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.reserve(kSpcdHeaderBytes + n * 12);
  out.push_back(kFormatVersion);
  put_u32(out, cloud.width);
  put_u32(out, cloud.height);
  const auto* raw = reinterpret_cast<const std::uint8_t*>(cloud.points.data());
  out.insert(out.end(), raw, raw + n * sizeof(Point3f));
  return out;
}

StructuredCloud decode_spcd(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw Error(ErrorCode::kBadMagic, "spcd: bad magic");
  if (bytes.size() < kSpcdHeaderBytes) throw Error(ErrorCode::kTruncated, "spcd: header truncated");
  if (bytes[4] != kFormatVersion)
    throw Error(ErrorCode::kVersionMismatch, "spcd: unsupported version " + std::to_string(bytes[4]));
  StructuredCloud cloud;
  cloud.width = get_u32(bytes.data() + 5);
  cloud.height = get_u32(bytes.data() + 9);
  const std::uint64_t expected = std::uint64_t{cloud.width} * cloud.height * sizeof(Point3f);
  const std::uint64_t actual = bytes.size() - kSpcdHeaderBytes;
  if (actual < expected)
    throw Error(ErrorCode::kTruncated, "spcd: payload has " + std::to_string(actual) + " bytes, expected " +
                                           std::to_string(expected));
  if (actual > expected)
    throw Error(ErrorCode::kDimensionMismatch, "spcd: payload has " + std::to_string(actual) +
                                                   " bytes, header implies " + std::to_string(expected));
  cloud.points.resize(std::size_t{cloud.width} * cloud.height);
  if (expected > 0) std::memcpy(cloud.points.data(), bytes.data() + kSpcdHeaderBytes, expected);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto& p = cloud.points[i];
    const int nans = std::isnan(p[0]) + std::isnan(p[1]) + std::isnan(p[2]);
    if (nans != 0 && nans != 3)
      throw Error(ErrorCode::kMalformedPayload, "spcd: pixel " + std::to_string(i) + " is partially NaN");
    if (nans == 0 && !(std::isfinite(p[0]) && std::isfinite(p[1]) && std::isfinite(p[2])))
      throw Error(ErrorCode::kMalformedPayload, "spcd: pixel " + std::to_string(i) + " is infinite");
  }
  return cloud;
}

json meta_to_json(const SampleRecord& rec) {
  const Mat4 m = rec.camera_to_world.matrix();
  json c2w = json::array();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) c2w.push_back(m(r, c));
  const auto& vb = rec.volume_box;
  return {{"camera_to_world", c2w},
          {"volume_box",
           {{"center", {vb.center.x(), vb.center.y(), vb.center.z()}},
            {"half_extents", {vb.half_extents.x(), vb.half_extents.y(), vb.half_extents.z()}},
            {"rotation_wxyz", {vb.rotation.w(), vb.rotation.x(), vb.rotation.y(), vb.rotation.z()}}}},
          {"box_params", to_json(rec.box_params)},
          {"sample_index", rec.sample_index},
          {"master_seed", rec.master_seed}};
}

std::string sample_dir_name(std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sample_%06llu", static_cast<unsigned long long>(index));
  return buf;
}

void write_sample(const fs::path& dir, const SampleRecord& rec) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message(), dir.string());
  const auto bytes = encode_spcd(rec.cloud);
  write_atomic(dir / kCloudFile, bytes.data(), bytes.size());
  write_atomic(dir / kMetaFile, dump_json(meta_to_json(rec)));
}

SampleRecord read_sample(const fs::path& dir) {
  SampleRecord rec;
  const fs::path cloud_path = dir / kCloudFile;
  try {
    rec.cloud = decode_spcd(read_file(cloud_path));
  } catch (const Error& e) {
    throw Error(e.code(), cloud_path.string() + ": " + e.what(), cloud_path.string());
  }

  const fs::path meta_path = dir / kMetaFile;
  const json j = parse_json_file(meta_path);
  if (!j.is_object()) bad_meta(meta_path, "top level must be an object");
  const auto c2w = number_array(j, 16, meta_path, "camera_to_world");
  Mat4 m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = c2w[4 * r + c];
  rec.camera_to_world = RigidPose::from_matrix(m);

  if (!j.contains("volume_box") || !j["volume_box"].is_object()) bad_meta(meta_path, "volume_box missing");
  const json& vb = j["volume_box"];
  const auto center = number_array(vb, 3, meta_path, "center");
  const auto half = number_array(vb, 3, meta_path, "half_extents");
  const auto q = number_array(vb, 4, meta_path, "rotation_wxyz");
  rec.volume_box.center = {center[0], center[1], center[2]};
  rec.volume_box.half_extents = {half[0], half[1], half[2]};
  rec.volume_box.rotation = Eigen::Quaterniond(q[0], q[1], q[2], q[3]);
  if (!(rec.volume_box.half_extents.minCoeff() > 0.0)) bad_meta(meta_path, "half_extents must be positive");
  if (!(std::abs(rec.volume_box.rotation.norm() - 1.0) <= 1e-9)) bad_meta(meta_path, "rotation_wxyz is not unit");

  if (!j.contains("box_params")) bad_meta(meta_path, "box_params missing");
  try {
    rec.box_params = box_params_from_json(j["box_params"]);
  } catch (const Error& e) {
    bad_meta(meta_path, e.what());
  }
  if (!j.contains("sample_index") || !j["sample_index"].is_number_unsigned())
    bad_meta(meta_path, "sample_index must be a non-negative integer");
  if (!j.contains("master_seed") || !j["master_seed"].is_number_unsigned())
    bad_meta(meta_path, "master_seed must be a non-negative integer");
  rec.sample_index = j["sample_index"].get<std::uint64_t>();
  rec.master_seed = j["master_seed"].get<std::uint64_t>();
  return rec;
}

GeneratedSample generate_sample(const GenerationConfig& cfg, std::uint64_t index) {
  GeneratedSample out;
  RngStream stream = derive_stream(cfg.master_seed, index);
  const BoxParams params = sample_box_params(stream, cfg);
  const RigidPose camera = sample_camera_pose(stream, cfg);
  if (cfg.randomize_box_yaw) out.box_pose.rotation = yaw(2.0 * std::numbers::pi * stream.uniform());

  out.mesh = build_box(params);
  transform(out.mesh, out.box_pose.rotation, out.box_pose.translation);

  const auto& sc = cfg.scanner;
  StructuredCloud cloud = scan(out.mesh, sc.intrinsics, camera);
  if (sc.projector_offset)
    cloud = projector_shadow_filter(cloud, out.mesh, camera, camera.apply(*sc.projector_offset));
  apply_range_noise(cloud, stream, sc.noise_std);

  auto& rec = out.record;
  rec.cloud = std::move(cloud);
  rec.camera_to_world = camera;
  rec.volume_box = ground_truth_volume_box(params, out.box_pose);
  rec.box_params = params;
  rec.sample_index = index;
  rec.master_seed = cfg.master_seed;
  return out;
}

namespace {

json manifest_to_json(const Manifest& m) {
  return {{"count", m.count},
          {"config", to_json(m.config)},
          {"tool_version", m.tool_version},
          {"rng_id", m.rng_id},
          {"format_version", m.format_version},
          {"volume_box_definition", kVolumeBoxDefinition}};
}

// A sample counts as done when both files parse and carry the expected
// provenance. Leftover temporaries from an interrupted run are removed.
bool sample_complete(const fs::path& dir, std::uint64_t index, std::uint64_t seed) {
  std::error_code ec;
  for (const char* name : {kCloudFile, kMetaFile}) {
    fs::path tmp = dir / name;
    tmp += ".tmp";
    fs::remove(tmp, ec);
  }
  try {
    const SampleRecord rec = read_sample(dir);
    return rec.sample_index == index && rec.master_seed == seed;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

Manifest generate_dataset(const GenerationConfig& cfg, const fs::path& out, const GenerateOptions& options) {
  validate(cfg);
  if (options.count < 1) throw Error(ErrorCode::kInvalidArgument, "count must be >= 1", "count");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out.string() + ": " + ec.message(), out.string());

  const std::size_t count = options.count;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, options.threads), count));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mutex;  // guards done, error, progress
  std::size_t done = 0;
  std::exception_ptr error;

  auto work = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        const fs::path dir = out / sample_dir_name(i);
        if (!(options.resume && sample_complete(dir, i, cfg.master_seed)))
          write_sample(dir, generate_sample(cfg, i).record);
        std::lock_guard lock(mutex);
        ++done;
        if (options.progress) options.progress(done, count);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);

  Manifest m;
  m.count = count;
  m.config = cfg;
  m.tool_version = std::string(kToolVersion);
  m.rng_id = std::string(kRngId);
  m.format_version = kFormatVersion;
  write_atomic(out / kManifestFile, dump_json(manifest_to_json(m)));
  return m;
}

Manifest read_manifest(const fs::path& root) {
  const fs::path path = root / kManifestFile;
  const json j = parse_json_file(path);
  if (!j.is_object()) bad_meta(path, "top level must be an object");
  Manifest m;
  try {
    m.count = j.at("count").get<std::size_t>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.rng_id = j.at("rng_id").get<std::string>();
    m.format_version = j.at("format_version").get<int>();
  } catch (const json::exception& e) {
    bad_meta(path, e.what());
  }
  if (!j.contains("config")) bad_meta(path, "config missing");
  m.config = config_from_json(j["config"]);
  return m;
}

}  // namespace boxsynth
