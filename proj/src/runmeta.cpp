#include "engage/runmeta.hpp"

#include <filesystem>

#include <nlohmann/json.hpp>

#include "engage/dataset.hpp"
#include "engage/errors.hpp"

namespace engage::runmeta {

std::string fnv1a_hex(std::string_view data) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_digest(const std::string& path) {
  return fnv1a_hex(dataset::read_file(path));
}

RunManifest::RunManifest(std::string out_dir)
    : path_((std::filesystem::path(out_dir) / "run.json").string()) {
  if (std::filesystem::exists(path_)) {
    auto j = nlohmann::ordered_json::parse(dataset::read_file(path_), nullptr,
                                           false);
    if (!j.is_discarded() && j.contains("stages")) {
      for (auto& [stage, record] : j["stages"].items()) {
        stages_[stage] = record.dump();
      }
    }
  }
}

void RunManifest::record_stage(
    const std::string& stage, const std::string& config_hash, uint64_t seed,
    const std::map<std::string, std::string>& input_digests,
    const std::vector<std::string>& outputs) {
  nlohmann::ordered_json record;
  record["config_hash"] = config_hash;
  record["seed"] = seed;
  record["inputs"] = input_digests;
  record["outputs"] = outputs;
  stages_[stage] = record.dump();
}

std::string RunManifest::json_text() const {
  nlohmann::ordered_json j;
  j["stages"] = nlohmann::ordered_json::object();
  for (const auto& [stage, record] : stages_) {
    j["stages"][stage] = nlohmann::ordered_json::parse(record);
  }
  return j.dump(2) + "\n";
}

void RunManifest::save() const {
  dataset::write_file(path_, json_text());
}

}  // namespace engage::runmeta
