#include "engage/corpus.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "engage/csv.hpp"
#include "engage/errors.hpp"
#include "engage/filter.hpp"
#include "engage/text.hpp"

namespace engage::corpus {

void LessonMetadata::validate() const {
  if (lesson_id.empty()) {
    throw ValidationError("lesson metadata: empty lesson_id");
  }
  if (grade < 9 || grade > 12) {
    throw ValidationError("lesson " + lesson_id + ": grade " +
                          std::to_string(grade) + " outside {9..12}");
  }
  if (trimester < 1 || trimester > 3) {
    throw ValidationError("lesson " + lesson_id + ": trimester " +
                          std::to_string(trimester) + " outside {1..3}");
  }
}

std::string SentenceRef::to_string() const {
  return lesson_id + ":" + std::to_string(line_index) + ":" +
         std::to_string(sentence_index);
}

SentenceRef SentenceRef::parse(std::string_view s) {
  auto second = s.rfind(':');
  if (second == std::string_view::npos) {
    throw ValidationError("bad sentence ref: " + std::string(s));
  }
  auto first = s.rfind(':', second - 1);
  if (first == std::string_view::npos) {
    throw ValidationError("bad sentence ref: " + std::string(s));
  }
  SentenceRef ref;
  ref.lesson_id = std::string(s.substr(0, first));
  auto parse_int = [&](std::string_view part, int& out) {
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    if (ec != std::errc{} || p != part.data() + part.size()) {
      throw ValidationError("bad sentence ref: " + std::string(s));
    }
  };
  parse_int(s.substr(first + 1, second - first - 1), ref.line_index);
  parse_int(s.substr(second + 1), ref.sentence_index);
  return ref;
}

void Corpus::add(LessonRecord lesson) {
  const std::string& id = lesson.metadata.lesson_id;
  if (lessons_.count(id)) {
    throw ValidationError("duplicate lesson_id: " + id);
  }
  lessons_.emplace(id, std::move(lesson));
}

const LessonRecord* Corpus::find(const std::string& lesson_id) const {
  auto it = lessons_.find(lesson_id);
  return it == lessons_.end() ? nullptr : &it->second;
}

LessonRecord ingest_lesson(std::string_view source_text,
                           const LessonMetadata& metadata) {
  metadata.validate();
  LessonRecord record;
  record.metadata = metadata;
  if (source_text.empty()) return record;
  size_t start = 0;
  for (size_t i = 0; i < source_text.size(); ++i) {
    if (source_text[i] == '\n') {
      size_t end = i;
      if (end > start && source_text[end - 1] == '\r') --end;
      record.lines.push_back(
          text::normalize(source_text.substr(start, end - start)));
      start = i + 1;
    }
  }
  if (start < source_text.size()) {
    std::string_view tail = source_text.substr(start);
    if (!tail.empty() && tail.back() == '\r') tail.remove_suffix(1);
    record.lines.push_back(text::normalize(tail));
  }
  return record;
}

LessonRecord ingest_lesson_file(const std::string& path,
                                const LessonMetadata& metadata) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read transcript: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ingest_lesson(buf.str(), metadata);
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.lesson_count = corpus.lesson_count();
  for (const auto& [id, lesson] : corpus.lessons()) {
    stats.line_count += lesson.lines.size();
    for (size_t li = 0; li < lesson.lines.size(); ++li) {
      SentenceRef ctx{id, static_cast<int>(li), 0};
      stats.sentence_count += filter::segment(lesson.lines[li], ctx).size();
    }
  }
  return stats;
}

std::vector<ManifestRow> parse_manifest(std::string_view csv_text) {
  auto rows = csv::parse(csv_text);
  if (rows.empty()) throw ValidationError("manifest: empty file");
  const std::vector<std::string> expected{
      "lesson_id", "teacher_id", "group_id", "grade", "trimester", "date",
      "path"};
  if (rows[0] != expected) {
    throw ValidationError(
        "manifest: bad header, expected "
        "lesson_id,teacher_id,group_id,grade,trimester,date,path");
  }
  std::vector<ManifestRow> out;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    if (row.size() != expected.size()) {
      throw ValidationError("manifest row " + std::to_string(r + 1) +
                            ": expected 7 fields, got " +
                            std::to_string(row.size()));
    }
    ManifestRow m;
    m.metadata.lesson_id = row[0];
    m.metadata.teacher_id = row[1];
    m.metadata.group_id = row[2];
    auto parse_int = [&](const std::string& s, const char* what) {
      int v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || p != s.data() + s.size()) {
        throw ValidationError("manifest row " + std::to_string(r + 1) +
                              ": bad " + what + " '" + s + "'");
      }
      return v;
    };
    m.metadata.grade = parse_int(row[3], "grade");
    m.metadata.trimester = parse_int(row[4], "trimester");
    if (!row[5].empty()) m.metadata.recorded_date = row[5];
    m.path = row[6];
    m.metadata.validate();
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<ManifestRow> load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read manifest: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

}  // namespace engage::corpus
