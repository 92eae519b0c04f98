#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "engage/backend.hpp"
#include "engage/config.hpp"

namespace engage::pipeline {

struct Flags {
  std::optional<uint64_t> seed;
  std::optional<std::string> out_dir;
  std::string backend_kind = "baseline";  // baseline | remote
  backend::Task task = backend::Task::identification;
  std::string coder_id;
  std::string input = "test";  // classify: test | candidates
  std::optional<std::string> pred_path;
  std::optional<std::string> gold_path;
  std::optional<std::string> coder_a;  // evaluate: agreement mode
  std::optional<std::string> coder_b;
};

// Loads the config and applies --seed / --out-dir overrides.
config::PipelineConfig prepare(const std::string& config_path,
                               const Flags& flags);

void run_ingest(const config::PipelineConfig& cfg);
void run_filter(const config::PipelineConfig& cfg);
void run_review(const config::PipelineConfig& cfg, const Flags& flags,
                std::istream& in, std::ostream& out);
void run_build_dataset(const config::PipelineConfig& cfg, const Flags& flags);
void run_finetune(const config::PipelineConfig& cfg, const Flags& flags);
void run_classify(const config::PipelineConfig& cfg, const Flags& flags);
void run_evaluate(const config::PipelineConfig& cfg, const Flags& flags);
void run_report(const config::PipelineConfig& cfg, const Flags& flags);

// Artifact path helpers (all under cfg.out_dir).
std::string lessons_path(const config::PipelineConfig& cfg);
std::string candidates_path(const config::PipelineConfig& cfg);
std::string decisions_path(const config::PipelineConfig& cfg,
                           backend::Task task, const std::string& coder_id);
std::string dataset_dir(const config::PipelineConfig& cfg, backend::Task task);
std::string baseline_model_path(const config::PipelineConfig& cfg,
                                backend::Task task);

}  // namespace engage::pipeline
