#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "engage/backend.hpp"
#include "engage/dataset.hpp"
#include "engage/filter.hpp"

namespace engage::config {

// Minimal INI-style reader: [section] headers, key = value lines,
// '#' and ';' comments. Keys are addressed as "section.key".
class IniFile {
 public:
  static IniFile parse(std::string_view data);
  static IniFile load(const std::string& path);

  std::optional<std::string> get(const std::string& dotted_key) const;
  std::string require(const std::string& dotted_key) const;  // ValidationError

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct PipelineConfig {
  std::string manifest_path;        // corpus.manifest
  std::string keyword_path;         // filter.keywords
  filter::MatchPolicy match_policy = filter::MatchPolicy::whole_word;
  dataset::DatasetConfig dataset;   // [dataset] section; seed mandatory
  backend::RemoteConfig remote;     // [backend] section
  std::string api_key_env = "ENGAGE_API_KEY";
  std::string out_dir = "out";

  // Raw config file bytes, kept for the run manifest hash.
  std::string raw_text;
};

// Parses and validates; referenced paths (manifest, keywords) must exist.
// Throws ValidationError naming the offending key.
PipelineConfig load_pipeline_config(const std::string& path);

}  // namespace engage::config
