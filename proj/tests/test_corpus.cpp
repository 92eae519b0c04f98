#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "engage/corpus.hpp"
#include "engage/errors.hpp"
#include "engage/filter.hpp"

using namespace engage;

namespace {

corpus::LessonMetadata meta(const std::string& id, int grade = 10,
                            int trimester = 1) {
  corpus::LessonMetadata m;
  m.lesson_id = id;
  m.teacher_id = "t1";
  m.group_id = "g1";
  m.grade = grade;
  m.trimester = trimester;
  return m;
}

std::string tmpdir() {
  const char* env = std::getenv("ENGAGE_TEST_TMPDIR");
  std::filesystem::path base = env ? env : std::filesystem::temp_directory_path();
  auto dir = base / "corpus_test";
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("ingest empty input") {
  auto lesson = corpus::ingest_lesson("", meta("l1"));
  CHECK(lesson.lines.empty());
}

TEST_CASE("ingest splits lines in order") {
  auto lesson = corpus::ingest_lesson("hola clase\nabrid el libro", meta("l1"));
  REQUIRE(lesson.lines.size() == 2);
  CHECK(lesson.lines[0] == "hola clase");
  CHECK(lesson.lines[1] == "abrid el libro");
}

TEST_CASE("empty lines retained for provenance") {
  auto lesson = corpus::ingest_lesson("a\n\nb\n", meta("l1"));
  REQUIRE(lesson.lines.size() == 3);
  CHECK(lesson.lines[1] == "");
}

TEST_CASE("metadata validation") {
  CHECK_THROWS_AS(corpus::ingest_lesson("x", meta("l1", 8)), ValidationError);
  CHECK_THROWS_AS(corpus::ingest_lesson("x", meta("l1", 10, 4)),
                  ValidationError);
  CHECK_THROWS_AS(corpus::ingest_lesson_file("/nonexistent/file", meta("l1")),
                  IoError);
}

TEST_CASE("600-line fixture") {
  // fixture written with an independent line construction; the oracle is
  // the count of newline-joined records
  std::string path = tmpdir() + "/lesson600.txt";
  {
    std::ofstream out(path);
    for (int i = 0; i < 600; ++i) out << "linea numero " << i << "\n";
  }
  auto lesson = corpus::ingest_lesson_file(path, meta("l600"));
  REQUIRE(lesson.lines.size() == 600);
  CHECK(lesson.lines[599] == "linea numero 599");
}

TEST_CASE("ingestion is lossless for line content") {
  std::string src = "uno\ndos con ñ\n\ntres";
  auto lesson = corpus::ingest_lesson(src, meta("l1"));
  std::string rejoined;
  for (size_t i = 0; i < lesson.lines.size(); ++i) {
    if (i) rejoined += "\n";
    rejoined += lesson.lines[i];
  }
  CHECK(rejoined == src);
}

TEST_CASE("corpus rejects duplicate lesson ids") {
  corpus::Corpus c;
  c.add(corpus::ingest_lesson("x", meta("l1")));
  CHECK_THROWS_AS(c.add(corpus::ingest_lesson("y", meta("l1"))),
                  ValidationError);
}

TEST_CASE("corpus_stats basics") {
  corpus::Corpus empty;
  auto s0 = corpus::corpus_stats(empty);
  CHECK(s0.lesson_count == 0);
  CHECK(s0.line_count == 0);
  CHECK(s0.sentence_count == 0);

  corpus::Corpus c;
  c.add(corpus::ingest_lesson("una frase\notra frase", meta("l1")));
  auto s1 = corpus::corpus_stats(c);
  CHECK(s1.lesson_count == 1);
  CHECK(s1.line_count == 2);
  CHECK(s1.sentence_count == 2);
}

TEST_CASE("corpus_stats equals hand count on mixed fixture") {
  // hand-counted oracle: sentences marked below
  corpus::Corpus c;
  // 2 sentences; 1 sentence
  c.add(corpus::ingest_lesson("Hola. ¿Todo bien?\nsin puntuacion",
                              meta("a")));
  // 3 sentences on one line
  c.add(corpus::ingest_lesson("Uno. Dos! Tres?", meta("b")));
  // ellipsis is one terminal: 2 sentences; empty line contributes 0
  c.add(corpus::ingest_lesson("espera… ya\n", meta("c")));
  auto s = corpus::corpus_stats(c);
  CHECK(s.lesson_count == 3);
  CHECK(s.line_count == 4);
  CHECK(s.sentence_count == 2 + 1 + 3 + 2);
}

TEST_CASE("corpus_stats is additive over disjoint corpora") {
  corpus::Corpus a, b, both;
  a.add(corpus::ingest_lesson("Uno. Dos.", meta("l1")));
  b.add(corpus::ingest_lesson("Tres", meta("l2")));
  both.add(corpus::ingest_lesson("Uno. Dos.", meta("l1")));
  both.add(corpus::ingest_lesson("Tres", meta("l2")));
  auto sa = corpus::corpus_stats(a);
  auto sb = corpus::corpus_stats(b);
  auto sboth = corpus::corpus_stats(both);
  CHECK(sboth.lesson_count == sa.lesson_count + sb.lesson_count);
  CHECK(sboth.line_count == sa.line_count + sb.line_count);
  CHECK(sboth.sentence_count == sa.sentence_count + sb.sentence_count);
}

TEST_CASE("manifest parsing") {
  std::string csv =
      "lesson_id,teacher_id,group_id,grade,trimester,date,path\n"
      "l1,t1,g1,10,1,2024-09-10,lessons/l1.txt\n"
      "l2,t2,g2,11,2,,\n";
  auto rows = corpus::parse_manifest(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].metadata.lesson_id == "l1");
  CHECK(rows[0].metadata.recorded_date == "2024-09-10");
  CHECK(rows[1].path.empty());  // skipped row allowed

  CHECK_THROWS_AS(corpus::parse_manifest("bad,header\n"), ValidationError);
  CHECK_THROWS_AS(
      corpus::parse_manifest(
          "lesson_id,teacher_id,group_id,grade,trimester,date,path\n"
          "l1,t1,g1,eight,1,,x\n"),
      ValidationError);
}

TEST_CASE("sentence ref round trip") {
  corpus::SentenceRef ref{"lesson:a", 12, 3};
  auto parsed = corpus::SentenceRef::parse(ref.to_string());
  CHECK(parsed == ref);
  CHECK_THROWS_AS(corpus::SentenceRef::parse("nocolons"), ValidationError);
}
