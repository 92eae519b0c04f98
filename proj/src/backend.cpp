#include "engage/backend.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "engage/errors.hpp"
#include "engage/text.hpp"

namespace engage::backend {

namespace {

using nlohmann::json;

std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void backoff_sleep(const RetryPolicy& retry, int attempt) {
  double ms = retry.base_delay_ms * std::pow(retry.factor, attempt - 1);
  std::this_thread::sleep_for(
      std::chrono::milliseconds(static_cast<long>(ms)));
}

bool is_transient_status(int http_status) {
  return http_status == 429 || http_status >= 500;
}

bool is_auth_status(int http_status) {
  return http_status == 401 || http_status == 403;
}

}  // namespace

const char* task_name(Task t) {
  return t == Task::identification ? "identification" : "frame";
}

Task parse_task(const std::string& name) {
  if (name == "identification") return Task::identification;
  if (name == "frame") return Task::frame;
  throw ValidationError("unknown task: " + name);
}

const char* job_status_name(JobStatus s) {
  switch (s) {
    case JobStatus::pending: return "pending";
    case JobStatus::running: return "running";
    case JobStatus::succeeded: return "succeeded";
    case JobStatus::failed: return "failed";
  }
  return "unknown";
}

JobStatus parse_job_status(const std::string& name) {
  if (name == "pending") return JobStatus::pending;
  if (name == "running") return JobStatus::running;
  if (name == "succeeded") return JobStatus::succeeded;
  if (name == "failed") return JobStatus::failed;
  throw BackendError("unknown job status: " + name);
}

bool is_terminal(JobStatus s) {
  return s == JobStatus::succeeded || s == JobStatus::failed;
}

JobLedger::JobLedger(std::string path) : path_(std::move(path)) {}

void JobLedger::append(const std::string& job_id, const std::string& status,
                       int attempt) {
  nlohmann::ordered_json entry;
  entry["job_id"] = job_id;
  entry["status"] = status;
  entry["timestamp"] = iso_timestamp();
  entry["attempt"] = attempt;
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot append to job ledger: " + path_);
  out << entry.dump() << "\n";
}

std::optional<std::string> JobLedger::last_status(
    const std::string& job_id) const {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return std::nullopt;
  std::optional<std::string> last;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    if (j.value("job_id", "") == job_id) last = j.value("status", "");
  }
  return last;
}

size_t JobLedger::entry_count() const {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return 0;
  size_t n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++n;
  }
  return n;
}

std::optional<int> parse_completion_label(const std::string& raw) {
  std::string trimmed = text::trim(raw);
  if (trimmed == "0") return 0;
  if (trimmed == "1") return 1;
  return std::nullopt;
}

void validate_jsonl_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read JSONL file: " + path);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("prompt") ||
        !j.contains("completion")) {
      throw ValidationError(path + ": malformed JSONL at line " +
                            std::to_string(lineno));
    }
  }
}

BaselineModel BaselineModel::train(
    const std::vector<dataset::LabeledExample>& data) {
  BaselineModel m;
  for (const auto& e : data) {
    auto tokens = text::tokenize_folded(text::fold(e.text));
    if (e.label == 1) {
      ++m.pos_docs_;
      for (auto& t : tokens) {
        ++m.pos_counts_[t];
        ++m.pos_total_;
      }
    } else {
      ++m.neg_docs_;
      for (auto& t : tokens) {
        ++m.neg_counts_[t];
        ++m.neg_total_;
      }
    }
  }
  if (m.pos_docs_ == 0 || m.neg_docs_ == 0) {
    throw BackendError("baseline_train: both labels must be present");
  }
  return m;
}

double BaselineModel::score(const std::string& text_in) const {
  // vocabulary = union of both class vocabularies
  std::map<std::string, long> vocab = pos_counts_;
  for (const auto& [t, c] : neg_counts_) vocab.emplace(t, 0);
  double v = static_cast<double>(vocab.size());
  double s = std::log(static_cast<double>(pos_docs_)) -
             std::log(static_cast<double>(neg_docs_));
  for (const auto& token : text::tokenize_folded(text::fold(text_in))) {
    auto pit = pos_counts_.find(token);
    auto nit = neg_counts_.find(token);
    double pc = pit == pos_counts_.end() ? 0.0 : static_cast<double>(pit->second);
    double nc = nit == neg_counts_.end() ? 0.0 : static_cast<double>(nit->second);
    s += std::log((pc + 1.0) / (static_cast<double>(pos_total_) + v));
    s -= std::log((nc + 1.0) / (static_cast<double>(neg_total_) + v));
  }
  return s;
}

std::string BaselineModel::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = "token_log_odds";
  j["pos_docs"] = pos_docs_;
  j["neg_docs"] = neg_docs_;
  j["pos_total"] = pos_total_;
  j["neg_total"] = neg_total_;
  j["pos_counts"] = pos_counts_;
  j["neg_counts"] = neg_counts_;
  return j.dump(2) + "\n";
}

BaselineModel BaselineModel::from_json(const std::string& json_text) {
  auto j = json::parse(json_text);
  BaselineModel m;
  m.pos_docs_ = j.at("pos_docs").get<long>();
  m.neg_docs_ = j.at("neg_docs").get<long>();
  m.pos_total_ = j.at("pos_total").get<long>();
  m.neg_total_ = j.at("neg_total").get<long>();
  m.pos_counts_ = j.at("pos_counts").get<std::map<std::string, long>>();
  m.neg_counts_ = j.at("neg_counts").get<std::map<std::string, long>>();
  return m;
}

void BaselineModel::save(const std::string& path) const {
  dataset::write_file(path, to_json());
}

BaselineModel BaselineModel::load(const std::string& path) {
  return from_json(dataset::read_file(path));
}

ClassifierModel ClassifierModel::make_baseline(Task task, BaselineModel model,
                                               std::string handle) {
  ClassifierModel m;
  m.kind = Kind::baseline;
  m.task = task;
  m.handle = std::move(handle);
  m.baseline = std::move(model);
  return m;
}

ClassifierModel ClassifierModel::make_remote(Task task, std::string model_id) {
  if (model_id.empty()) {
    throw ValidationError("remote classifier requires a model id");
  }
  ClassifierModel m;
  m.kind = Kind::remote;
  m.task = task;
  m.handle = std::move(model_id);
  return m;
}

RemoteClient::RemoteClient(RemoteConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) {
    throw ValidationError("remote backend: endpoint not configured");
  }
}

FineTuneJob RemoteClient::submit_finetune(FineTuneJob job, JobLedger& ledger) {
  validate_jsonl_file(job.train_file);
  validate_jsonl_file(job.val_file);

  nlohmann::ordered_json body;
  body["task"] = task_name(job.task);
  body["training_file"] = job.train_file;
  body["validation_file"] = job.val_file;
  body["hyperparameters"] = {
      {"batch_size", job.hyperparameters.batch_size},
      {"learning_rate_multiplier", job.hyperparameters.learning_rate_multiplier},
      {"epochs", job.hyperparameters.epochs},
      {"compute_classification_metrics",
       job.hyperparameters.compute_classification_metrics}};
  std::string payload = body.dump();

  httplib::Client client(config_.endpoint);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    auto res = client.Post("/v1/finetunes", headers, payload,
                           "application/json");
    if (res && res->status == 200) {
      auto j = json::parse(res->body);
      job.job_id = j.at("job_id").get<std::string>();
      job.status = parse_job_status(j.value("status", "pending"));
      ledger.append(job.job_id, job_status_name(job.status), attempt);
      return job;
    }
    if (res && !is_transient_status(res->status)) {
      // server rejected the request; not retryable
      ledger.append("", "submit_rejected", attempt);
      throw ValidationError("fine-tune submission rejected (HTTP " +
                            std::to_string(res->status) + "): " + res->body);
    }
    ledger.append("", "submit_retry", attempt);
    if (attempt < config_.retry.max_attempts) {
      backoff_sleep(config_.retry, attempt);
    }
  }
  throw BackendError("fine-tune submission failed after " +
                     std::to_string(config_.retry.max_attempts) + " attempts");
}

JobStatus RemoteClient::poll_job(const std::string& job_id, JobLedger& ledger) {
  auto last = ledger.last_status(job_id);
  if (!last) throw BackendError("poll_job: unknown job_id " + job_id);
  // terminal statuses are sticky
  if (*last == "succeeded" || *last == "failed") {
    return parse_job_status(*last);
  }
  httplib::Client client(config_.endpoint);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  auto res = client.Get("/v1/finetunes/" + job_id, headers);
  if (!res || res->status != 200) {
    throw BackendError("poll_job: endpoint unreachable or error for " +
                       job_id);
  }
  auto j = json::parse(res->body);
  JobStatus status = parse_job_status(j.at("status").get<std::string>());
  ledger.append(job_id, job_status_name(status), 1);
  return status;
}

std::vector<Prediction> RemoteClient::classify_batch(
    const std::vector<filter::Sentence>& sentences,
    const CompletionParams& params) {
  std::vector<Prediction> out(sentences.size());
  std::atomic<size_t> next{0};
  std::atomic<bool> abort{false};
  std::string abort_reason;
  std::mutex abort_mutex;

  auto worker = [&] {
    httplib::Client client(config_.endpoint);
    httplib::Headers headers;
    if (!config_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + config_.api_key);
    }
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= out.size() || abort.load()) return;
      const auto& sentence = sentences[i];
      nlohmann::ordered_json body;
      body["model"] = config_.model;
      body["prompt"] = sentence.text + dataset::kPromptSeparator;
      body["temperature"] = params.temperature;
      body["top_p"] = params.top_p;
      body["max_tokens"] = params.max_tokens;
      std::string payload = body.dump();

      Prediction pred;
      pred.ref = sentence.ref;
      pred.status = Prediction::Status::transport_error;
      for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
        auto res = client.Post("/v1/completions", headers, payload,
                               "application/json");
        if (res && res->status == 200) {
          auto j = json::parse(res->body, nullptr, false);
          pred.raw_completion =
              j.is_discarded() ? res->body : j.value("completion", "");
          if (auto label = parse_completion_label(pred.raw_completion)) {
            pred.label = *label;
            pred.status = Prediction::Status::ok;
          } else {
            pred.status = Prediction::Status::parse_error;
          }
          break;
        }
        if (res && is_auth_status(res->status)) {
          std::lock_guard<std::mutex> lock(abort_mutex);
          abort_reason = "authentication error (HTTP " +
                         std::to_string(res->status) + ")";
          abort.store(true);
          return;
        }
        if (attempt < config_.retry.max_attempts) {
          backoff_sleep(config_.retry, attempt);
        }
      }
      out[i] = std::move(pred);
    }
  };

  size_t n_threads = std::min<size_t>(
      std::max(1, config_.parallelism), std::max<size_t>(1, sentences.size()));
  std::vector<std::thread> threads;
  for (size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (abort.load()) {
    throw BackendError("classify_batch aborted: " + abort_reason);
  }
  return out;
}

std::vector<Prediction> classify_batch(const ClassifierModel& model,
                                       const std::vector<filter::Sentence>& sentences,
                                       const CompletionParams& params,
                                       const RemoteConfig* remote_config) {
  if (model.kind == ClassifierModel::Kind::baseline) {
    if (!model.baseline) {
      throw BackendError("baseline model has no parameters loaded");
    }
    std::vector<Prediction> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) {
      Prediction p;
      p.ref = s.ref;
      p.label = model.baseline->classify(s.text);
      p.raw_completion = p.label == 1 ? " 1" : " 0";
      p.status = Prediction::Status::ok;
      out.push_back(std::move(p));
    }
    return out;
  }
  if (!remote_config) {
    throw ValidationError("remote classification requires backend config");
  }
  RemoteConfig cfg = *remote_config;
  if (cfg.model.empty()) cfg.model = model.handle;
  RemoteClient client(cfg);
  return client.classify_batch(sentences, params);
}

}  // namespace engage::backend
