#include "engage/filter.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "engage/csv.hpp"
#include "engage/errors.hpp"
#include "engage/text.hpp"

namespace engage::filter {

namespace {

constexpr std::string_view kEllipsis = "\xE2\x80\xA6";

// Length in bytes of the terminal starting at position i, or 0.
size_t terminal_len(std::string_view s, size_t i) {
  char c = s[i];
  if (c == '.' || c == '!' || c == '?') return 1;
  if (s.compare(i, kEllipsis.size(), kEllipsis) == 0) return kEllipsis.size();
  return 0;
}

bool whole_word_match(const std::string& folded_text,
                      const std::string& folded_term) {
  auto is_word_byte = [](unsigned char c) {
    return std::isalnum(c) || c >= 0x80;
  };
  size_t pos = 0;
  while ((pos = folded_text.find(folded_term, pos)) != std::string::npos) {
    bool left_ok =
        pos == 0 ||
        !is_word_byte(static_cast<unsigned char>(folded_text[pos - 1]));
    size_t end = pos + folded_term.size();
    bool right_ok =
        end == folded_text.size() ||
        !is_word_byte(static_cast<unsigned char>(folded_text[end]));
    if (left_ok && right_ok) return true;
    ++pos;
  }
  return false;
}

}  // namespace

KeywordList::KeywordList(std::vector<std::string> terms, MatchPolicy policy)
    : policy_(policy) {
  std::set<std::string> seen;
  for (auto& t : terms) {
    if (t.empty()) throw ValidationError("keyword list: empty term");
    std::string folded = text::fold(t);
    if (seen.insert(folded).second) {
      terms_.push_back(std::move(t));
      folded_terms_.push_back(std::move(folded));
    }
  }
}

KeywordList KeywordList::parse(std::string_view data, MatchPolicy policy) {
  std::vector<std::string> terms;
  size_t start = 0;
  while (start <= data.size()) {
    size_t end = data.find('\n', start);
    if (end == std::string_view::npos) end = data.size();
    std::string line = text::trim(data.substr(start, end - start));
    if (!line.empty() && line[0] != '#') terms.push_back(std::move(line));
    if (end == data.size()) break;
    start = end + 1;
  }
  return KeywordList(std::move(terms), policy);
}

KeywordList KeywordList::load(const std::string& path, MatchPolicy policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read keyword file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), policy);
}

std::vector<Sentence> segment(std::string_view line,
                              const corpus::SentenceRef& context) {
  std::vector<Sentence> out;
  auto emit = [&](std::string_view frag) {
    std::string trimmed = text::trim(frag);
    if (trimmed.empty()) return;
    corpus::SentenceRef ref = context;
    ref.sentence_index = static_cast<int>(out.size());
    out.push_back(Sentence{std::move(trimmed), ref});
  };
  size_t start = 0;
  size_t i = 0;
  while (i < line.size()) {
    size_t len = terminal_len(line, i);
    if (len == 0) {
      ++i;
      continue;
    }
    // absorb a run of adjacent terminals ("...", "?!", "!!") as one
    i += len;
    while (i < line.size()) {
      size_t more = terminal_len(line, i);
      if (more == 0) break;
      i += more;
    }
    emit(line.substr(start, i - start));
    start = i;
  }
  if (start < line.size()) emit(line.substr(start));
  return out;
}

std::vector<Sentence> segment_corpus(const corpus::Corpus& corpus) {
  std::vector<Sentence> out;
  for (const auto& [id, lesson] : corpus.lessons()) {
    for (size_t li = 0; li < lesson.lines.size(); ++li) {
      corpus::SentenceRef ctx{id, static_cast<int>(li), 0};
      auto sentences = segment(lesson.lines[li], ctx);
      out.insert(out.end(), sentences.begin(), sentences.end());
    }
  }
  return out;
}

std::vector<CandidateSentence> keyword_filter(
    const std::vector<Sentence>& sentences, const KeywordList& keywords) {
  std::vector<CandidateSentence> out;
  if (keywords.empty()) return out;
  for (const auto& sentence : sentences) {
    std::string folded = text::fold(sentence.text);
    std::vector<std::string> matched;
    for (size_t t = 0; t < keywords.terms().size(); ++t) {
      const std::string& folded_term = keywords.folded_terms()[t];
      bool hit = keywords.policy() == MatchPolicy::whole_word
                     ? whole_word_match(folded, folded_term)
                     : folded.find(folded_term) != std::string::npos;
      if (hit) matched.push_back(keywords.terms()[t]);
    }
    if (!matched.empty()) {
      out.push_back(CandidateSentence{sentence, std::move(matched)});
    }
  }
  return out;
}

std::string candidates_to_csv(const std::vector<CandidateSentence>& cands) {
  std::string out = "lesson_id,line_index,sentence_index,matched_terms,text\n";
  for (const auto& c : cands) {
    std::string joined;
    for (size_t i = 0; i < c.matched_terms.size(); ++i) {
      if (i) joined.push_back(';');
      joined += c.matched_terms[i];
    }
    out += csv::write_row({c.sentence.ref.lesson_id,
                           std::to_string(c.sentence.ref.line_index),
                           std::to_string(c.sentence.ref.sentence_index),
                           joined, c.sentence.text});
  }
  return out;
}

std::vector<CandidateSentence> candidates_from_csv(std::string_view data) {
  auto rows = csv::parse(data);
  if (rows.empty()) throw ValidationError("candidates: empty file");
  std::vector<CandidateSentence> out;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 5) {
      throw ValidationError("candidates row " + std::to_string(r + 1) +
                            ": expected 5 fields");
    }
    CandidateSentence c;
    c.sentence.ref.lesson_id = row[0];
    c.sentence.ref.line_index = std::stoi(row[1]);
    c.sentence.ref.sentence_index = std::stoi(row[2]);
    std::string_view terms = row[3];
    size_t start = 0;
    while (start <= terms.size() && !terms.empty()) {
      size_t end = terms.find(';', start);
      if (end == std::string_view::npos) end = terms.size();
      if (end > start)
        c.matched_terms.emplace_back(terms.substr(start, end - start));
      if (end == terms.size()) break;
      start = end + 1;
    }
    c.sentence.text = row[4];
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace engage::filter
