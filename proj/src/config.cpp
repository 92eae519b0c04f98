#include "engage/config.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>

#include "engage/errors.hpp"
#include "engage/text.hpp"

namespace engage::config {

IniFile IniFile::parse(std::string_view data) {
  IniFile ini;
  std::string section;
  size_t start = 0;
  size_t lineno = 0;
  while (start <= data.size()) {
    size_t end = data.find('\n', start);
    if (end == std::string_view::npos) end = data.size();
    std::string line = text::trim(data.substr(start, end - start));
    ++lineno;
    if (!line.empty() && line[0] != '#' && line[0] != ';') {
      if (line.front() == '[' && line.back() == ']') {
        section = text::trim(line.substr(1, line.size() - 2));
        if (section.empty()) {
          throw ValidationError("config line " + std::to_string(lineno) +
                                ": empty section name");
        }
      } else {
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
          throw ValidationError("config line " + std::to_string(lineno) +
                                ": expected key = value");
        }
        std::string key = text::trim(line.substr(0, eq));
        std::string value = text::trim(line.substr(eq + 1));
        if (key.empty()) {
          throw ValidationError("config line " + std::to_string(lineno) +
                                ": empty key");
        }
        ini.values_[section.empty() ? key : section + "." + key] = value;
      }
    }
    if (end == data.size()) break;
    start = end + 1;
  }
  return ini;
}

IniFile IniFile::load(const std::string& path) {
  return parse(dataset::read_file(path));
}

std::optional<std::string> IniFile::get(const std::string& dotted_key) const {
  auto it = values_.find(dotted_key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string IniFile::require(const std::string& dotted_key) const {
  auto v = get(dotted_key);
  if (!v) throw ValidationError("config: missing key '" + dotted_key + "'");
  return *v;
}

namespace {

double parse_double(const std::string& key, const std::string& s) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config: bad number for '" + key + "': " + s);
  }
}

int parse_int(const std::string& key, const std::string& s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ValidationError("config: bad integer for '" + key + "': " + s);
  }
  return v;
}

uint64_t parse_u64(const std::string& key, const std::string& s) {
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ValidationError("config: bad seed for '" + key + "': " + s);
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ValidationError("config: bad boolean for '" + key + "': " + s);
}

}  // namespace

PipelineConfig load_pipeline_config(const std::string& path) {
  PipelineConfig cfg;
  cfg.raw_text = dataset::read_file(path);
  IniFile ini = IniFile::parse(cfg.raw_text);

  cfg.manifest_path = ini.require("corpus.manifest");
  cfg.keyword_path = ini.require("filter.keywords");
  if (auto policy = ini.get("filter.policy")) {
    if (*policy == "whole_word") {
      cfg.match_policy = filter::MatchPolicy::whole_word;
    } else if (*policy == "substring") {
      cfg.match_policy = filter::MatchPolicy::substring;
    } else {
      throw ValidationError("config: filter.policy must be whole_word or substring");
    }
  }

  if (auto v = ini.get("dataset.positive_fraction")) {
    cfg.dataset.positive_fraction = parse_double("dataset.positive_fraction", *v);
  }
  if (auto v = ini.get("dataset.split")) {
    // "0.8/0.1/0.1"
    std::string s = *v;
    size_t a = s.find('/');
    size_t b = a == std::string::npos ? std::string::npos : s.find('/', a + 1);
    if (a == std::string::npos || b == std::string::npos) {
      throw ValidationError("config: dataset.split must be train/val/test");
    }
    cfg.dataset.train_fraction = parse_double("dataset.split", s.substr(0, a));
    cfg.dataset.val_fraction = parse_double("dataset.split", s.substr(a + 1, b - a - 1));
    cfg.dataset.test_fraction = parse_double("dataset.split", s.substr(b + 1));
  }
  cfg.dataset.seed = parse_u64("dataset.seed", ini.require("dataset.seed"));
  if (auto v = ini.get("dataset.stratified")) {
    cfg.dataset.stratified = parse_bool("dataset.stratified", *v);
  }
  cfg.dataset.validate();

  if (auto v = ini.get("backend.endpoint")) cfg.remote.endpoint = *v;
  if (auto v = ini.get("backend.model")) cfg.remote.model = *v;
  if (auto v = ini.get("backend.parallelism")) {
    cfg.remote.parallelism = parse_int("backend.parallelism", *v);
  }
  if (auto v = ini.get("backend.retry_max_attempts")) {
    cfg.remote.retry.max_attempts = parse_int("backend.retry_max_attempts", *v);
  }
  if (auto v = ini.get("backend.retry_base_ms")) {
    cfg.remote.retry.base_delay_ms = parse_int("backend.retry_base_ms", *v);
  }
  if (auto v = ini.get("backend.retry_factor")) {
    cfg.remote.retry.factor = parse_double("backend.retry_factor", *v);
  }
  if (auto v = ini.get("backend.api_key_env")) cfg.api_key_env = *v;
  if (const char* key = std::getenv(cfg.api_key_env.c_str())) {
    cfg.remote.api_key = key;
  }

  if (auto v = ini.get("output.dir")) cfg.out_dir = *v;

  namespace fs = std::filesystem;
  if (!fs::exists(cfg.manifest_path)) {
    throw ValidationError("config: corpus.manifest path does not exist: " +
                          cfg.manifest_path);
  }
  if (!fs::exists(cfg.keyword_path)) {
    throw ValidationError("config: filter.keywords path does not exist: " +
                          cfg.keyword_path);
  }
  return cfg;
}

}  // namespace engage::config
