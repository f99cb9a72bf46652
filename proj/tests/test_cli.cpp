// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "boxsynth/dataset.hpp"
#include "boxsynth/metrics.hpp"
#include "support.hpp"

using namespace boxsynth;
using boxsynth::testing::scratch_dir;
using boxsynth::testing::snapshot_tree;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int status = -1;
  std::string output;  // stdout and stderr interleaved
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(BOXSYNTH_CLI) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

// Minimal OBJ reader: positions and triangle vertex indices.
TriMesh read_obj(const fs::path& p) {
  TriMesh m;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 v;
      ls >> v.x() >> v.y() >> v.z();
      m.positions.push_back(v);
    } else if (tag == "f") {
      std::array<std::uint32_t, 3> t{};
      for (auto& idx : t) {
        std::string corner;
        ls >> corner;
        idx = static_cast<std::uint32_t>(std::stoul(corner.substr(0, corner.find('/'))) - 1);
      }
      m.triangles.push_back(t);
      m.groups.push_back(0);
    }
  }
  return m;
}

fs::path small_config_file(const fs::path& dir) {
  const fs::path p = dir / "c.json";
  write_text(p, R"({"master_seed": 1, "scanner": {"width": 32, "height": 24}})");
  return p;
}

}  // namespace

TEST(Cli, GenerateWritesSamplesAndManifest) {
  const fs::path dir = scratch_dir("cli_gen");
  const CliRun r = run("generate --config " + q(small_config_file(dir)) + " --out " + q(dir / "d") +
                    " --count 2 --seed 7");
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_TRUE(fs::is_directory(dir / "d" / "sample_000000"));
  EXPECT_TRUE(fs::is_directory(dir / "d" / "sample_000001"));
  EXPECT_FALSE(fs::exists(dir / "d" / "sample_000002"));
  const Manifest m = read_manifest(dir / "d");
  EXPECT_EQ(m.count, 2u);
  EXPECT_EQ(m.config.master_seed, 7u);  // flag overrides the file
  EXPECT_EQ(m.config.scanner.intrinsics.width, 32u);
  EXPECT_NE(r.output.find("generated 2/2"), std::string::npos) << r.output;
}

TEST(Cli, GenerateResumeChangesNoBytes) {
  const fs::path dir = scratch_dir("cli_resume");
  const std::string base = "generate --config " + q(small_config_file(dir)) + " --out " + q(dir / "d") + " --count 3";
  ASSERT_EQ(run(base).status, 0);
  const auto before = snapshot_tree(dir / "d");
  ASSERT_EQ(run(base + " --resume --threads 2").status, 0);
  EXPECT_EQ(snapshot_tree(dir / "d"), before);
}

TEST(Cli, GenerateFailures) {
  const fs::path dir = scratch_dir("cli_gen_fail");
  CliRun r = run("generate --config " + q(dir / "nope.json") + " --out " + q(dir / "d") + " --count 2");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("config-not-found"), std::string::npos) << r.output;
  EXPECT_EQ(std::count(r.output.begin(), r.output.end(), '\n'), 1) << r.output;

  write_text(dir / "bad.json", R"({"thickness": {"base": 0.2, "mu": 0, "sigma": 0, "gamma": 2}})");
  r = run("generate --config " + q(dir / "bad.json") + " --out " + q(dir / "d") + " --count 2");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("config-invalid"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("thickness"), std::string::npos) << r.output;

  EXPECT_NE(run("generate --out " + q(dir / "d") + " --count 0").status, 0);
  EXPECT_NE(run("generate --count 2").status, 0);
  EXPECT_NE(run("").status, 0);
  EXPECT_NE(run("frobnicate").status, 0);
}

TEST(Cli, EvaluateTableAndJson) {
  const fs::path dir = scratch_dir("cli_eval");
  ASSERT_EQ(run("generate --config " + q(small_config_file(dir)) + " --out " + q(dir / "d") + " --count 3").status, 0);
  std::vector<PosePrediction> preds;
  for (std::uint64_t i = 0; i < 3; ++i) {
    const SampleRecord r = read_sample(dir / "d" / sample_dir_name(i));
    preds.push_back({i, r.volume_box.center, r.volume_box.rotation.toRotationMatrix()});
  }
  write_text(dir / "self.json", dump_json(to_json(preds)));
  CliRun r = run("evaluate --gt " + q(dir / "d") + " --pred " + q(dir / "self.json"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("0.000 mm"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("0.000 rad"), std::string::npos) << r.output;

  for (auto& p : preds) p.translation.x() += 0.010;
  write_text(dir / "offset.json", dump_json(to_json(preds)));
  r = run("evaluate --gt " + q(dir / "d") + " --pred " + q(dir / "offset.json"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("10.000 mm"), std::string::npos) << r.output;

  r = run("evaluate --json --gt " + q(dir / "d") + " --pred " + q(dir / "offset.json"));
  ASSERT_EQ(r.status, 0) << r.output;
  const auto j = nlohmann::json::parse(r.output);
  EXPECT_NEAR(j["mean_te_mm"].get<double>(), 10.0, 1e-9);
  EXPECT_EQ(j["samples"].size(), 3u);

  preds.push_back(preds[0]);
  write_text(dir / "dup.json", dump_json(to_json(preds)));
  r = run("evaluate --gt " + q(dir / "d") + " --pred " + q(dir / "dup.json"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("duplicate-index"), std::string::npos) << r.output;

  preds.pop_back();
  preds[1].sample_index = 9;
  write_text(dir / "missing.json", dump_json(to_json(preds)));
  r = run("evaluate --gt " + q(dir / "d") + " --pred " + q(dir / "missing.json"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("missing-sample"), std::string::npos) << r.output;
}

TEST(Cli, InspectReports) {
  const fs::path dir = scratch_dir("cli_inspect");
  ASSERT_EQ(run("generate --config " + q(small_config_file(dir)) + " --out " + q(dir / "d") + " --count 1").status, 0);
  CliRun r = run("inspect --sample " + q(dir / "d" / "sample_000000"));
  ASSERT_EQ(r.status, 0) << r.output;
  for (const char* key : {"dimensions    32 x 24", "valid pixels", "points min", "box size", "volume center"})
    EXPECT_NE(r.output.find(key), std::string::npos) << key << "\n" << r.output;

  SampleRecord rec = read_sample(dir / "d" / "sample_000000");
  rec.cloud = StructuredCloud(4, 3);
  write_sample(dir / "blank", rec);
  r = run("inspect --sample " + q(dir / "blank"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("fraction 0.0000"), std::string::npos) << r.output;

  const auto bytes = boxsynth::testing::read_bytes(dir / "blank" / "cloud.spcd");
  std::ofstream(dir / "blank" / "cloud.spcd", std::ios::binary)
      .write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size() - 7));
  r = run("inspect --sample " + q(dir / "blank"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("truncated"), std::string::npos) << r.output;
}

TEST(Cli, ExportMesh) {
  const fs::path dir = scratch_dir("cli_export");
  // Central values of the default generation config.
  const std::string nominal = R"({"size": [0.25, 0.25, 0.25], "flap_length": 0.1, "flap_taper": 0.01,
      "open": 1.5707963267948966, "thickness": 0.003, "bevel_radius": 0.005, "bevel_segments": 3})";
  write_text(dir / "nominal.json", nominal);
  CliRun r = run("export-mesh --params " + q(dir / "nominal.json") + " --out " + q(dir / "box.obj"));
  ASSERT_EQ(r.status, 0) << r.output;
  const TriMesh box = read_obj(dir / "box.obj");
  const auto topo = analyze_topology(box);
  EXPECT_TRUE(topo.closed_manifold());
  EXPECT_EQ(topo.euler(), 2);
  EXPECT_EQ(box.triangles.size(), build_box(box_params_from_json(nlohmann::json::parse(nominal))).triangles.size());

  write_text(dir / "thick.json", R"({"size": [0.2, 0.2, 0.2], "thickness": 0.15})");
  r = run("export-mesh --params " + q(dir / "thick.json") + " --out " + q(dir / "thick.obj"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("thickness"), std::string::npos) << r.output;

  write_text(dir / "flat.json",
             R"({"size": [0.3, 0.25, 0.2], "flap_length": 0, "thickness": 0, "bevel_radius": 0.01})");
  r = run("export-mesh --params " + q(dir / "flat.json") + " --out " + q(dir / "flat.obj"));
  ASSERT_EQ(r.status, 0) << r.output;
  const Aabb b = bounds(read_obj(dir / "flat.obj"));
  EXPECT_LE((b.min - Vec3(-0.15, -0.125, 0.0)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((b.max - Vec3(0.15, 0.125, 0.2)).cwiseAbs().maxCoeff(), 1e-9);

  // A sample's meta.json is accepted as a parameter file.
  ASSERT_EQ(run("generate --config " + q(small_config_file(dir)) + " --out " + q(dir / "d") + " --count 1").status, 0);
  r = run("export-mesh --params " + q(dir / "d" / "sample_000000" / "meta.json") + " --out " + q(dir / "s.obj"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_EQ(read_obj(dir / "s.obj").triangles.size(),
            build_box(read_sample(dir / "d" / "sample_000000").box_params).triangles.size());
}
