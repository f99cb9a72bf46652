// Copyright 2026 The boxsynth Authors.
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "boxsynth/dataset.hpp"
#include "boxsynth/error.hpp"

namespace boxsynth {

using nlohmann::json;

namespace {

[[noreturn]] void bad_config(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kConfigInvalid, "config: " + field + " " + why, field);
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) bad_config(where.empty() ? "<root>" : where, "must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) bad_config(where.empty() ? key : where + "." + key, "is not a recognized key");
  }
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) bad_config(field, "must be a number");
  return j.get<double>();
}

std::uint64_t get_unsigned(const json& j, const std::string& field) {
  if (!j.is_number_unsigned()) bad_config(field, "must be a non-negative integer");
  return j.get<std::uint64_t>();
}

bool get_bool(const json& j, const std::string& field) {
  if (!j.is_boolean()) bad_config(field, "must be true or false");
  return j.get<bool>();
}

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) bad_config(field, "must be an array of 3 numbers");
  return {get_number(j[0], field), get_number(j[1], field), get_number(j[2], field)};
}

json spec_to_json(const ParamSpec& s) {
  return {{"base", s.base}, {"mu", s.mu}, {"sigma", s.sigma}, {"gamma", s.gamma}};
}

ParamSpec spec_from_json(const json& j, ParamSpec s, const std::string& field) {
  reject_unknown(j, {"base", "mu", "sigma", "gamma"}, field);
  if (j.contains("base")) s.base = get_number(j["base"], field + ".base");
  if (j.contains("mu")) s.mu = get_number(j["mu"], field + ".mu");
  if (j.contains("sigma")) s.sigma = get_number(j["sigma"], field + ".sigma");
  if (j.contains("gamma")) s.gamma = get_number(j["gamma"], field + ".gamma");
  return s;
}

}  // namespace

json to_json(const BoxParams& p) {
  return {{"size", vec_to_json(p.size)},
          {"flap_length", p.flap_length},
          {"flap_taper", p.flap_taper},
          {"open", json::array({p.open[0], p.open[1], p.open[2], p.open[3]})},
          {"thickness", p.thickness},
          {"bevel_radius", p.bevel_radius},
          {"bevel_segments", p.bevel_segments}};
}

BoxParams box_params_from_json(const json& j) {
  try {
    reject_unknown(j, {"size", "flap_length", "flap_taper", "open", "thickness", "bevel_radius", "bevel_segments"},
                   "");
    BoxParams p;
    if (j.contains("size")) p.size = vec_from_json(j["size"], "size");
    if (j.contains("flap_length")) p.flap_length = get_number(j["flap_length"], "flap_length");
    if (j.contains("flap_taper")) p.flap_taper = get_number(j["flap_taper"], "flap_taper");
    if (j.contains("open")) {
      const json& o = j["open"];
      if (o.is_number()) {
        p.open.fill(o.get<double>());
      } else {
        if (!o.is_array() || o.size() != 4) bad_config("open", "must be a number or an array of 4 numbers");
        for (int i = 0; i < 4; ++i) p.open[i] = get_number(o[i], "open");
      }
    }
    if (j.contains("thickness")) p.thickness = get_number(j["thickness"], "thickness");
    if (j.contains("bevel_radius")) p.bevel_radius = get_number(j["bevel_radius"], "bevel_radius");
    if (j.contains("bevel_segments")) {
      const auto n = get_unsigned(j["bevel_segments"], "bevel_segments");
      if (n > 1024) bad_config("bevel_segments", "must be at most 1024");
      p.bevel_segments = static_cast<std::uint32_t>(n);
    }
    validate(p);
    return p;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kConfigInvalid) throw;
    std::string msg = e.what();
    msg.replace(0, std::string_view("config").size(), "params");
    throw Error(ErrorCode::kInvalidParams, msg, e.field());
  }
}

json to_json(const GenerationConfig& c) {
  const auto& s = c.scanner;
  json scanner = {{"width", s.intrinsics.width},
                  {"height", s.intrinsics.height},
                  {"horizontal_fov", s.intrinsics.horizontal_fov},
                  {"noise_std", s.noise_std},
                  {"projector_offset", s.projector_offset ? vec_to_json(*s.projector_offset) : json(nullptr)}};
  json open = json::array();
  for (const auto& o : c.open) open.push_back(spec_to_json(o));
  return {{"master_seed", c.master_seed},
          {"size_x", spec_to_json(c.size_x)},
          {"size_y", spec_to_json(c.size_y)},
          {"size_z", spec_to_json(c.size_z)},
          {"flap_length", spec_to_json(c.flap_length)},
          {"flap_taper", spec_to_json(c.flap_taper)},
          {"open", open},
          {"thickness", spec_to_json(c.thickness)},
          {"bevel_radius", spec_to_json(c.bevel_radius)},
          {"bevel_segments", c.bevel_segments},
          {"camera_distance", {{"min", c.camera_distance_min}, {"max", c.camera_distance_max}}},
          {"randomize_box_yaw", c.randomize_box_yaw},
          {"scanner", scanner}};
}

GenerationConfig config_from_json(const json& j) {
  reject_unknown(j,
                 {"master_seed", "size_x", "size_y", "size_z", "flap_length", "flap_taper", "open", "thickness",
                  "bevel_radius", "bevel_segments", "camera_distance", "randomize_box_yaw", "scanner", "notes"},
                 "");
  GenerationConfig c;
  if (j.contains("master_seed")) c.master_seed = get_unsigned(j["master_seed"], "master_seed");
  if (j.contains("size_x")) c.size_x = spec_from_json(j["size_x"], c.size_x, "size_x");
  if (j.contains("size_y")) c.size_y = spec_from_json(j["size_y"], c.size_y, "size_y");
  if (j.contains("size_z")) c.size_z = spec_from_json(j["size_z"], c.size_z, "size_z");
  if (j.contains("flap_length")) c.flap_length = spec_from_json(j["flap_length"], c.flap_length, "flap_length");
  if (j.contains("flap_taper")) c.flap_taper = spec_from_json(j["flap_taper"], c.flap_taper, "flap_taper");
  if (j.contains("open")) {
    const json& o = j["open"];
    if (o.is_object()) {
      const ParamSpec s = spec_from_json(o, c.open[0], "open");
      c.open.fill(s);
    } else if (o.is_array() && o.size() == 4) {
      for (int i = 0; i < 4; ++i) c.open[i] = spec_from_json(o[i], c.open[i], "open[" + std::to_string(i) + "]");
    } else {
      bad_config("open", "must be a spec object or an array of 4 spec objects");
    }
  }
  if (j.contains("thickness")) c.thickness = spec_from_json(j["thickness"], c.thickness, "thickness");
  if (j.contains("bevel_radius")) c.bevel_radius = spec_from_json(j["bevel_radius"], c.bevel_radius, "bevel_radius");
  if (j.contains("bevel_segments")) {
    const auto n = get_unsigned(j["bevel_segments"], "bevel_segments");
    if (n > 1024) bad_config("bevel_segments", "must be at most 1024");
    c.bevel_segments = static_cast<std::uint32_t>(n);
  }
  if (j.contains("camera_distance")) {
    const json& d = j["camera_distance"];
    reject_unknown(d, {"min", "max"}, "camera_distance");
    if (d.contains("min")) c.camera_distance_min = get_number(d["min"], "camera_distance.min");
    if (d.contains("max")) c.camera_distance_max = get_number(d["max"], "camera_distance.max");
  }
  if (j.contains("randomize_box_yaw")) c.randomize_box_yaw = get_bool(j["randomize_box_yaw"], "randomize_box_yaw");
  if (j.contains("scanner")) {
    const json& s = j["scanner"];
    reject_unknown(s, {"width", "height", "horizontal_fov", "noise_std", "projector_offset"}, "scanner");
    auto& intr = c.scanner.intrinsics;
    auto dim = [&](const char* key) {
      const auto v = get_unsigned(s[key], std::string("scanner.") + key);
      if (v > 65535) bad_config(std::string("scanner.") + key, "must be at most 65535");
      return static_cast<std::uint32_t>(v);
    };
    if (s.contains("width")) intr.width = dim("width");
    if (s.contains("height")) intr.height = dim("height");
    if (s.contains("horizontal_fov")) intr.horizontal_fov = get_number(s["horizontal_fov"], "scanner.horizontal_fov");
    if (s.contains("noise_std")) c.scanner.noise_std = get_number(s["noise_std"], "scanner.noise_std");
    if (s.contains("projector_offset") && !s["projector_offset"].is_null())
      c.scanner.projector_offset = vec_from_json(s["projector_offset"], "scanner.projector_offset");
  }
  if (j.contains("notes") && !j["notes"].is_string()) bad_config("notes", "must be a string");
  validate(c);
  return c;
}

GenerationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfigNotFound, "config not found: " + path.string(), path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedJson, "config " + path.string() + ": " + e.what(), path.string());
  }
  return config_from_json(j);
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace boxsynth
