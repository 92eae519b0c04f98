#include "engage/review.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "engage/errors.hpp"
#include "engage/text.hpp"

namespace engage::review {

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

// RAII lock file; one review session per log at a time.
class LockFile {
 public:
  explicit LockFile(std::string path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) {
      throw IoError("review log locked (another session?): " + path_);
    }
    std::ofstream out(path_);
    if (!out) throw IoError("cannot create lock file: " + path_);
  }
  ~LockFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  LockFile(const LockFile&) = delete;
  LockFile& operator=(const LockFile&) = delete;

 private:
  std::string path_;
};

}  // namespace

std::vector<ReviewDecision> load_decisions(const std::string& path) {
  std::vector<ReviewDecision> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;  // no log yet is not an error
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("ref") ||
        !j.contains("coder_id") || !j.contains("label")) {
      throw ValidationError(path + ": corrupt decision at line " +
                            std::to_string(lineno));
    }
    ReviewDecision d;
    d.ref = corpus::SentenceRef::parse(j.at("ref").get<std::string>());
    d.coder_id = j.at("coder_id").get<std::string>();
    d.label = j.at("label").get<std::string>();
    if (j.contains("corrected_text") && !j.at("corrected_text").is_null()) {
      d.corrected_text = j.at("corrected_text").get<std::string>();
    }
    d.timestamp = j.value("timestamp", "");
    out.push_back(std::move(d));
  }
  return out;
}

void append_decision(const std::string& path, const ReviewDecision& decision) {
  nlohmann::ordered_json j;
  j["ref"] = decision.ref.to_string();
  j["coder_id"] = decision.coder_id;
  j["label"] = decision.label;
  if (decision.corrected_text) j["corrected_text"] = *decision.corrected_text;
  j["timestamp"] =
      decision.timestamp.empty() ? iso_timestamp() : decision.timestamp;
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot append to decisions log: " + path);
  out << j.dump() << "\n";
  out.flush();
}

std::map<corpus::SentenceRef, ReviewDecision> latest_decisions(
    const std::vector<ReviewDecision>& log, const std::string& coder_id) {
  std::map<corpus::SentenceRef, ReviewDecision> out;
  for (const auto& d : log) {
    if (d.coder_id == coder_id) out[d.ref] = d;  // last wins
  }
  return out;
}

SessionResult run_session(const std::vector<filter::CandidateSentence>& queue,
                          const std::string& coder_id,
                          const std::string& log_path, ReviewMode mode,
                          std::istream& in, std::ostream& out) {
  // a corrupt log refuses to start (load throws with the line number)
  auto decided = latest_decisions(load_decisions(log_path), coder_id);
  LockFile lock(log_path + ".lock");

  SessionResult result;
  const char* prompt = mode == ReviewMode::identification
                           ? "[k]eep / [d]iscard / [q]uit"
                           : "[g]ain / [l]oss / [q]uit";
  for (size_t i = 0; i < queue.size(); ++i) {
    const auto& cand = queue[i];
    if (decided.count(cand.sentence.ref)) continue;
    ++result.presented;
    out << "[" << (i + 1) << "/" << queue.size() << "] "
        << cand.sentence.ref.to_string() << "\n  " << cand.sentence.text
        << "\n" << prompt << " (append |text to correct): " << std::flush;
    std::string line;
    for (;;) {
      if (!std::getline(in, line)) {
        result.quit_early = true;
        return result;
      }
      std::string correction;
      size_t bar = line.find('|');
      if (bar != std::string::npos) {
        correction = text::trim(line.substr(bar + 1));
        line = line.substr(0, bar);
      }
      std::string cmd = text::trim(line);
      std::string label;
      if (cmd == "q" || cmd == "quit") {
        result.quit_early = true;
        return result;
      }
      if (mode == ReviewMode::identification) {
        if (cmd == "k" || cmd == "keep") label = "engaging";
        if (cmd == "d" || cmd == "discard") label = "not_engaging";
      } else {
        if (cmd == "g" || cmd == "gain") label = "gain";
        if (cmd == "l" || cmd == "loss") label = "loss";
      }
      if (label.empty()) {
        out << "unrecognized input, " << prompt << ": " << std::flush;
        continue;
      }
      ReviewDecision d;
      d.ref = cand.sentence.ref;
      d.coder_id = coder_id;
      d.label = label;
      if (!correction.empty()) d.corrected_text = correction;
      append_decision(log_path, d);
      ++result.decided;
      break;
    }
  }
  return result;
}

}  // namespace engage::review
