// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

// boxsynth: generate, inspect and evaluate synthetic cardboard-box scans.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include <unistd.h>

#include <CLI11.hpp>

#include "boxsynth/box_model.hpp"
#include "boxsynth/dataset.hpp"
#include "boxsynth/error.hpp"
#include "boxsynth/metrics.hpp"

namespace fs = std::filesystem;
using namespace boxsynth;

namespace {

std::string vec_str(const Vec3& v, int precision = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << "(" << v.x() << ", " << v.y() << ", " << v.z() << ")";
  return os.str();
}

int cmd_generate(const std::string& config_path, const fs::path& out, std::size_t count,
                 std::optional<std::uint64_t> seed, unsigned threads, bool resume) {
  GenerationConfig cfg = config_path.empty() ? GenerationConfig{} : load_config(config_path);
  if (seed) cfg.master_seed = *seed;
  GenerateOptions opt;
  opt.count = count;
  opt.threads = threads;
  opt.resume = resume;
  const bool tty = isatty(fileno(stderr));
  opt.progress = [tty](std::size_t done, std::size_t total) {
    if (tty) {
      std::fprintf(stderr, "\rgenerated %zu/%zu", done, total);
      if (done == total) std::fputc('\n', stderr);
    } else if (done == total || done % 50 == 0) {
      std::fprintf(stderr, "generated %zu/%zu\n", done, total);
    }
  };
  const Manifest m = generate_dataset(cfg, out, opt);
  std::cout << "wrote " << m.count << " samples to " << out.string() << " (seed " << cfg.master_seed << ")\n";
  return 0;
}

int cmd_evaluate(const fs::path& gt, const fs::path& pred, bool as_json) {
  const auto predictions = load_predictions(pred);
  const EvalSummary summary = evaluate(predictions, gt);
  if (as_json) {
    std::cout << dump_json(to_json(summary));
  } else {
    print_table(std::cout, summary);
  }
  return 0;
}

int cmd_inspect(const fs::path& dir) {
  const SampleRecord rec = read_sample(dir);
  const auto& c = rec.cloud;
  const std::size_t total = c.points.size();
  const std::size_t valid = c.valid_count();
  std::cout << std::fixed;
  std::cout << "sample        " << rec.sample_index << " (seed " << rec.master_seed << ")\n";
  std::cout << "dimensions    " << c.width << " x " << c.height << "\n";
  std::cout << "valid pixels  " << valid << " / " << total << " (fraction " << std::setprecision(4)
            << (total ? static_cast<double>(valid) / static_cast<double>(total) : 0.0) << ")\n";
  if (valid > 0) {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
    for (const auto& p : c.points) {
      if (!StructuredCloud::is_valid(p)) continue;
      const Vec3 v(p[0], p[1], p[2]);
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    std::cout << "points min    " << vec_str(lo) << "  (camera frame, m)\n";
    std::cout << "points max    " << vec_str(hi) << "\n";
  } else {
    std::cout << "points        none valid\n";
  }
  const auto& p = rec.box_params;
  std::cout << "box size      " << vec_str(p.size) << "\n";
  std::cout << std::setprecision(6);
  std::cout << "flap length   " << p.flap_length << "  taper " << p.flap_taper << "\n";
  std::cout << "flap open     " << p.open[0] << " " << p.open[1] << " " << p.open[2] << " " << p.open[3] << "\n";
  std::cout << "thickness     " << p.thickness << "  bevel " << p.bevel_radius << " x" << p.bevel_segments << "\n";
  const auto& vb = rec.volume_box;
  std::cout << "volume center " << vec_str(vb.center) << "\n";
  std::cout << "volume half   " << vec_str(vb.half_extents) << "\n";
  std::cout << "volume quat   (" << vb.rotation.w() << ", " << vb.rotation.x() << ", " << vb.rotation.y() << ", "
            << vb.rotation.z() << ")  wxyz\n";
  std::cout << "camera pos    " << vec_str(rec.camera_to_world.translation) << "\n";
  return 0;
}

int cmd_export_mesh(const fs::path& params_path, const fs::path& out) {
  std::ifstream in(params_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + params_path.string(), params_path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kMalformedJson, params_path.string() + ": " + e.what(), params_path.string());
  }
  // A sample's meta.json works as well.
  if (j.is_object() && j.contains("box_params")) j = j["box_params"];
  const BoxParams params = box_params_from_json(j);
  validate(params);
  const TriMesh mesh = build_box(params);
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIo, "cannot create " + out.string(), out.string());
  write_obj(os, mesh);
  os.flush();
  if (!os) throw Error(ErrorCode::kIo, "write failed for " + out.string(), out.string());
  std::cout << "wrote " << mesh.positions.size() << " vertices, " << mesh.triangle_count() << " triangles to "
            << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic structured point clouds of cardboard boxes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string config_path;
  fs::path out_dir;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool resume = false;
  auto* gen = app.add_subcommand("generate", "Generate a dataset");
  gen->add_option("--config", config_path, "Generation config (JSON); built-in defaults when omitted");
  gen->add_option("--out", out_dir, "Output directory")->required();
  gen->add_option("--count", count, "Number of samples")->required()->check(CLI::PositiveNumber);
  auto* seed_opt = gen->add_option("--seed", seed, "Master seed, overrides the config");
  gen->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  gen->add_flag("--resume", resume, "Keep complete samples already on disk");

  fs::path gt_dir, pred_file;
  bool as_json = false;
  auto* eval = app.add_subcommand("evaluate", "Score pose predictions against a dataset");
  eval->add_option("--gt", gt_dir, "Dataset directory")->required();
  eval->add_option("--pred", pred_file, "Predictions JSON")->required();
  eval->add_flag("--json", as_json, "Print the summary as JSON");

  fs::path sample_dir;
  auto* inspect = app.add_subcommand("inspect", "Describe one sample");
  inspect->add_option("--sample", sample_dir, "Sample directory")->required();

  fs::path params_path, obj_path;
  auto* exp = app.add_subcommand("export-mesh", "Write the box mesh for a parameter set as OBJ");
  exp->add_option("--params", params_path, "BoxParams JSON (or a sample meta.json)")->required();
  exp->add_option("--out", obj_path, "Output .obj path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen) {
      std::optional<std::uint64_t> s;
      if (*seed_opt) s = seed;
      return cmd_generate(config_path, out_dir, count, s, threads, resume);
    }
    if (*eval) return cmd_evaluate(gt_dir, pred_file, as_json);
    if (*inspect) return cmd_inspect(sample_dir);
    if (*exp) return cmd_export_mesh(params_path, obj_path);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
