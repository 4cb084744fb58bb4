#pragma once

// JSON manifests for problem sets. Shift/rotation are re-derived from the
// per-instance seed on load.

#include <fstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "evoforge/problems/instance.hpp"

namespace evoforge {

inline constexpr int kManifestSchemaVersion = 1;

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace detail

inline nlohmann::json instance_to_json(const ProblemInstance& inst) {
  nlohmann::json j;
  j["id"] = inst.id;
  j["seed"] = inst.seed;
  j["mode"] = to_string(inst.mode);
  j["dim"] = inst.dim;
  j["lb"] = inst.lb;
  j["ub"] = inst.ub;
  j["max_fes"] = inst.max_fes;
  j["f_star"] = inst.f_star;
  j["f_star_exact"] = inst.f_star_exact;
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : inst.components) {
    nlohmann::json jc;
    jc["fn"] = basic_fn_info(c.fn).name;
    if (inst.mode == ProblemMode::Composition) jc["weight"] = c.weight;
    if (inst.mode == ProblemMode::Hybrid) jc["segment"] = c.segment;
    comps.push_back(std::move(jc));
  }
  j["components"] = std::move(comps);
  return j;
}

inline ProblemInstance instance_from_json(const nlohmann::json& j) {
  ProblemInstance inst;
  inst.id = j.at("id").get<std::uint64_t>();
  inst.seed = j.at("seed").get<std::uint64_t>();
  inst.mode = problem_mode_from_string(j.at("mode").get<std::string>());
  inst.dim = j.at("dim").get<int>();
  inst.lb = j.at("lb").get<double>();
  inst.ub = j.at("ub").get<double>();
  inst.max_fes = j.at("max_fes").get<int>();
  inst.f_star = j.at("f_star").get<double>();
  inst.f_star_exact = j.at("f_star_exact").get<bool>();
  for (const auto& jc : j.at("components")) {
    ProblemComponent c;
    c.fn = basic_fn_from_name(jc.at("fn").get<std::string>());
    if (inst.mode == ProblemMode::Composition)
      c.weight = jc.at("weight").get<double>();
    if (inst.mode == ProblemMode::Hybrid)
      c.segment = jc.at("segment").get<std::vector<int>>();
    inst.components.push_back(std::move(c));
  }
  rederive_transforms(inst);
  return inst;
}

inline nlohmann::json set_to_json(const ProblemSet& set) {
  nlohmann::json j;
  j["schema_version"] = kManifestSchemaVersion;
  j["split"] = set.split;
  j["seed"] = set.seed;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& inst : set.instances) arr.push_back(instance_to_json(inst));
  j["instances"] = std::move(arr);
  j["content_hash"] = detail::fnv1a(j["instances"].dump());
  return j;
}

inline ProblemSet set_from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != kManifestSchemaVersion)
    throw std::runtime_error("unsupported manifest schema version");
  ProblemSet set;
  set.split = j.at("split").get<std::string>();
  set.seed = j.at("seed").get<std::uint64_t>();
  const auto& arr = j.at("instances");
  if (j.contains("content_hash") &&
      j.at("content_hash").get<std::uint64_t>() != detail::fnv1a(arr.dump()))
    throw std::runtime_error("manifest content hash mismatch");
  for (const auto& ji : arr) set.instances.push_back(instance_from_json(ji));
  return set;
}

inline void save_set(const ProblemSet& set, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << set_to_json(set).dump(2) << '\n';
}

inline ProblemSet load_set(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  nlohmann::json j;
  is >> j;
  return set_from_json(j);
}

}  // namespace evoforge
