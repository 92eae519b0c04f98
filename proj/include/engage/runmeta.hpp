#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace engage::runmeta {

// FNV-1a 64 over the raw bytes, hex-encoded. Stable across platforms; used
// for run-manifest input digests, not security.
std::string fnv1a_hex(std::string_view data);
std::string file_digest(const std::string& path);  // IoError on failure

// `run.json` at the output-directory root: per-stage config hash, seed, and
// input digests. Deliberately timestamp-free so reruns with identical
// inputs produce identical bytes.
class RunManifest {
 public:
  explicit RunManifest(std::string out_dir);  // loads existing run.json

  void record_stage(const std::string& stage, const std::string& config_hash,
                    uint64_t seed,
                    const std::map<std::string, std::string>& input_digests,
                    const std::vector<std::string>& outputs);
  void save() const;

  std::string json_text() const;

 private:
  std::string path_;
  std::string serialized_;  // kept as ordered JSON text
  std::map<std::string, std::string> stages_;  // stage -> serialized record
};

}  // namespace engage::runmeta
