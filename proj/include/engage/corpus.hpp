#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace engage::corpus {

struct LessonMetadata {
  std::string lesson_id;
  std::string teacher_id;
  std::string group_id;
  int grade = 0;      // 9..12
  int trimester = 0;  // 1..3
  std::optional<std::string> recorded_date;

  // Throws ValidationError when grade/trimester are out of range or the
  // lesson id is empty.
  void validate() const;
};

struct LessonRecord {
  LessonMetadata metadata;
  std::vector<std::string> lines;  // order preserved, empties retained
};

struct SentenceRef {
  std::string lesson_id;
  int line_index = 0;      // 0-based
  int sentence_index = 0;  // 0-based within line

  auto operator<=>(const SentenceRef&) const = default;
  std::string to_string() const;
  static SentenceRef parse(std::string_view s);  // "lesson:line:sentence"
};

class Corpus {
 public:
  // Throws ValidationError on duplicate lesson_id.
  void add(LessonRecord lesson);

  const LessonRecord* find(const std::string& lesson_id) const;
  const std::map<std::string, LessonRecord>& lessons() const {
    return lessons_;
  }
  size_t lesson_count() const { return lessons_.size(); }

 private:
  std::map<std::string, LessonRecord> lessons_;
};

struct CorpusStats {
  size_t lesson_count = 0;
  size_t line_count = 0;
  size_t sentence_count = 0;
};

// Splits source text on line terminators (\n, \r\n), preserving order and
// empty lines; text is canonically normalized. Throws ValidationError on
// bad metadata.
LessonRecord ingest_lesson(std::string_view source_text,
                           const LessonMetadata& metadata);

// Reads the transcript file at `path`. Throws IoError with the path on
// failure.
LessonRecord ingest_lesson_file(const std::string& path,
                                const LessonMetadata& metadata);

CorpusStats corpus_stats(const Corpus& corpus);

struct ManifestRow {
  LessonMetadata metadata;
  std::string path;  // empty -> skipped (no transcript available)
};

// Manifest CSV: header `lesson_id,teacher_id,group_id,grade,trimester,date,path`.
// Throws ValidationError on malformed rows (with row number).
std::vector<ManifestRow> parse_manifest(std::string_view csv_text);
std::vector<ManifestRow> load_manifest(const std::string& path);

}  // namespace engage::corpus
