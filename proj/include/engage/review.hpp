#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "engage/corpus.hpp"
#include "engage/filter.hpp"

namespace engage::review {

// One coder decision over one sentence. The log is append-only JSONL;
// later entries for the same (ref, coder) supersede earlier ones.
struct ReviewDecision {
  corpus::SentenceRef ref;
  std::string coder_id;
  std::string label;  // engaging | not_engaging | gain | loss
  std::optional<std::string> corrected_text;
  std::string timestamp;
};

// Throws ValidationError pointing at the first corrupt line.
std::vector<ReviewDecision> load_decisions(const std::string& path);

void append_decision(const std::string& path, const ReviewDecision& decision);

// Last-wins collapse of the log for one coder.
std::map<corpus::SentenceRef, ReviewDecision> latest_decisions(
    const std::vector<ReviewDecision>& log, const std::string& coder_id);

enum class ReviewMode { identification, frame };

struct SessionResult {
  size_t presented = 0;
  size_t decided = 0;
  bool quit_early = false;
};

// Presents undecided candidates in order, one command line per item:
//   identification: k[eep] / d[iscard] / q[uit]
//   frame:          g[ain] / l[oss] / q[uit]
// An optional text correction follows after '|': e.g. "k|fixed text".
// Each confirmed decision is appended to the log immediately. Resuming
// skips refs already decided by this coder. A `<log>.lock` file guards
// against concurrent sessions (IoError when held).
SessionResult run_session(const std::vector<filter::CandidateSentence>& queue,
                          const std::string& coder_id,
                          const std::string& log_path, ReviewMode mode,
                          std::istream& in, std::ostream& out);

}  // namespace engage::review
