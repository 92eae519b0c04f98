#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "engage/corpus.hpp"

namespace engage::filter {

struct Sentence {
  std::string text;  // trimmed, non-empty
  corpus::SentenceRef ref;
};

enum class MatchPolicy { whole_word, substring };

class KeywordList {
 public:
  KeywordList() = default;
  // Terms are de-duplicated after case/diacritic folding; empty terms
  // rejected.
  KeywordList(std::vector<std::string> terms, MatchPolicy policy);

  // Keyword file: one term per line, '#' comments and blank lines skipped.
  static KeywordList load(const std::string& path, MatchPolicy policy);
  static KeywordList parse(std::string_view data, MatchPolicy policy);

  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::string>& folded_terms() const {
    return folded_terms_;
  }
  MatchPolicy policy() const { return policy_; }
  bool empty() const { return terms_.empty(); }

 private:
  std::vector<std::string> terms_;
  std::vector<std::string> folded_terms_;
  MatchPolicy policy_ = MatchPolicy::whole_word;
};

struct CandidateSentence {
  Sentence sentence;
  std::vector<std::string> matched_terms;  // non-empty, original spelling
};

// Splits a line on terminal punctuation (. ! ? and ellipsis, with runs of
// terminals grouped) keeping the delimiter on the preceding sentence.
// Whitespace-only fragments are dropped; a line with no terminal yields one
// sentence. `ref.sentence_index` is assigned 0..n-1.
std::vector<Sentence> segment(std::string_view line,
                              const corpus::SentenceRef& context);

// Segments an entire corpus in lesson/line order.
std::vector<Sentence> segment_corpus(const corpus::Corpus& corpus);

// Retains sentences with >=1 matching term after case/diacritic folding.
// Input order preserved.
std::vector<CandidateSentence> keyword_filter(
    const std::vector<Sentence>& sentences, const KeywordList& keywords);

// Candidate CSV: lesson_id,line_index,sentence_index,matched_terms,text
// (matched_terms ';'-joined).
std::string candidates_to_csv(const std::vector<CandidateSentence>& cands);
std::vector<CandidateSentence> candidates_from_csv(std::string_view data);

}  // namespace engage::filter
