#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "engage/corpus.hpp"
#include "engage/dataset.hpp"
#include "engage/filter.hpp"

namespace engage::backend {

enum class Task { identification, frame };

const char* task_name(Task t);
Task parse_task(const std::string& name);

struct Hyperparameters {
  int batch_size = 16;
  double learning_rate_multiplier = 0.1;
  int epochs = 20;
  bool compute_classification_metrics = true;
};

struct CompletionParams {
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 1;
};

enum class JobStatus { pending, running, succeeded, failed };

const char* job_status_name(JobStatus s);
JobStatus parse_job_status(const std::string& name);
bool is_terminal(JobStatus s);

struct FineTuneJob {
  Task task = Task::identification;
  std::string train_file;
  std::string val_file;
  Hyperparameters hyperparameters;
  std::string job_id;  // assigned on submit
  JobStatus status = JobStatus::pending;
};

struct RetryPolicy {
  int max_attempts = 5;
  int base_delay_ms = 1000;
  double factor = 2.0;
};

struct RemoteConfig {
  std::string endpoint;  // http://host:port
  std::string model;
  std::string api_key;  // from environment, never from the config file
  RetryPolicy retry;
  int parallelism = 4;
};

// Append-only JSONL of {job_id, status, timestamp, attempt}; single writer.
class JobLedger {
 public:
  explicit JobLedger(std::string path);

  void append(const std::string& job_id, const std::string& status,
              int attempt);
  // Last recorded status for a job, or nullopt when unknown.
  std::optional<std::string> last_status(const std::string& job_id) const;
  size_t entry_count() const;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct Prediction {
  enum class Status { ok, parse_error, transport_error };
  corpus::SentenceRef ref;
  std::string raw_completion;
  int label = 0;  // valid only when status == ok
  Status status = Status::ok;
};

// Trim whitespace; accept exactly "0" or "1". Returns nullopt otherwise.
std::optional<int> parse_completion_label(const std::string& raw);

// Throws ValidationError naming the first malformed line.
void validate_jsonl_file(const std::string& path);

// Deterministic token log-odds scorer with add-one smoothing over
// case/diacritic-folded tokens; decision threshold 0.
class BaselineModel {
 public:
  // Throws BackendError unless both labels are present.
  static BaselineModel train(const std::vector<dataset::LabeledExample>& data);

  double score(const std::string& text) const;
  int classify(const std::string& text) const { return score(text) > 0.0; }

  // std::map keys keep serialization byte-stable across retrains.
  std::string to_json() const;
  static BaselineModel from_json(const std::string& json_text);
  void save(const std::string& path) const;
  static BaselineModel load(const std::string& path);

 private:
  std::map<std::string, long> pos_counts_;
  std::map<std::string, long> neg_counts_;
  long pos_total_ = 0;  // token totals
  long neg_total_ = 0;
  long pos_docs_ = 0;
  long neg_docs_ = 0;
};

struct ClassifierModel {
  enum class Kind { remote, baseline };
  Kind kind = Kind::baseline;
  Task task = Task::identification;
  std::string handle;  // remote model id, or baseline parameter file path
  std::optional<BaselineModel> baseline;

  static ClassifierModel make_baseline(Task task, BaselineModel model,
                                       std::string handle = "baseline");
  static ClassifierModel make_remote(Task task, std::string model_id);
};

// HTTP client against the fine-tune/completion contract. The same contract
// is implemented by the in-tree stub server used in tests.
class RemoteClient {
 public:
  explicit RemoteClient(RemoteConfig config);

  // Validates the JSONL files locally, then registers the job remotely with
  // retry/backoff; every attempt is appended to the ledger. Returns the job
  // with job_id and status filled in.
  FineTuneJob submit_finetune(FineTuneJob job, JobLedger& ledger);

  // Throws BackendError for unknown job ids; terminal statuses are sticky
  // and do not touch the network.
  JobStatus poll_job(const std::string& job_id, JobLedger& ledger);

  std::vector<Prediction> classify_batch(
      const std::vector<filter::Sentence>& sentences,
      const CompletionParams& params);

 private:
  RemoteConfig config_;
};

// One prediction per input, order preserved. Remote models use the client's
// bounded parallelism and retry policy; the baseline runs locally.
std::vector<Prediction> classify_batch(
    const ClassifierModel& model, const std::vector<filter::Sentence>& sentences,
    const CompletionParams& params, const RemoteConfig* remote_config = nullptr);

}  // namespace engage::backend
