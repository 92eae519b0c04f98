#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "engage/errors.hpp"
#include "engage/pipeline.hpp"
#include "engage/review.hpp"

using namespace engage;

namespace {

std::string tmpdir() {
  const char* env = std::getenv("ENGAGE_TEST_TMPDIR");
  std::filesystem::path base =
      env ? env : std::filesystem::temp_directory_path();
  auto dir = base / "pipeline_test";
  std::filesystem::create_directories(dir);
  return dir.string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workspace {
  std::string dir;
  std::string config_path;
};

// Synthetic separable corpus: per lesson, 5 gain-framed and 5 loss-framed
// engaging sentences (all containing "examen") plus 10 fillers.
Workspace make_workspace(const std::string& name) {
  std::string dir = tmpdir() + "/" + name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto lesson = [](int base) {
    std::string s;
    for (int i = base; i < base + 5; ++i) {
      s += "si estudiais mucho aprobareis el examen numero " +
           std::to_string(i) + ".\n";
    }
    for (int i = base; i < base + 5; ++i) {
      s += "si no estudiais suspendereis el examen numero " +
           std::to_string(i) + ".\n";
    }
    for (int i = base; i < base + 10; ++i) {
      s += "abrid el libro por la pagina " + std::to_string(i) +
           " y leed en silencio.\n";
    }
    return s;
  };
  write_file(dir + "/a.txt", lesson(0));
  write_file(dir + "/b.txt", lesson(5));
  write_file(dir + "/manifest.csv",
             "lesson_id,teacher_id,group_id,grade,trimester,date,path\n"
             "a,t1,g1,10,1,2026-01-10,a.txt\n"
             "b,t2,g2,11,2,2026-02-10,b.txt\n"
             "c,t3,g3,12,3,,\n");  // transcript never delivered
  write_file(dir + "/keywords.txt", "examen\n");
  write_file(dir + "/config.ini",
             "[corpus]\nmanifest = " + dir + "/manifest.csv\n" +
             "[filter]\nkeywords = " + dir + "/keywords.txt\n" +
             "[dataset]\nseed = 7\npositive_fraction = 0.5\n" +
             "[output]\ndir = " + dir + "/out\n");
  return {dir, dir + "/config.ini"};
}

std::string repeat_cmd(const std::string& cmd, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += cmd + "\n";
  return s;
}

// Runs ingest through identification review for one workspace/out dir.
config::PipelineConfig run_front_half(const Workspace& ws,
                                      pipeline::Flags& flags) {
  auto cfg = pipeline::prepare(ws.config_path, flags);
  pipeline::run_ingest(cfg);
  pipeline::run_filter(cfg);
  std::istringstream in(repeat_cmd("k", 20));
  std::ostringstream out;
  pipeline::run_review(cfg, flags, in, out);
  return cfg;
}

}  // namespace

TEST_CASE("prepare applies seed and out-dir overrides") {
  auto ws = make_workspace("prepare");
  pipeline::Flags flags;
  flags.seed = 123;
  flags.out_dir = ws.dir + "/elsewhere";
  auto cfg = pipeline::prepare(ws.config_path, flags);
  CHECK(cfg.dataset.seed == 123);
  CHECK(cfg.out_dir == ws.dir + "/elsewhere");
  pipeline::Flags none;
  auto cfg2 = pipeline::prepare(ws.config_path, none);
  CHECK(cfg2.dataset.seed == 7);
  CHECK(cfg2.out_dir == ws.dir + "/out");
}

TEST_CASE("missing artifacts raise DependencyError") {
  auto ws = make_workspace("deps");
  pipeline::Flags flags;
  flags.coder_id = "c1";
  auto cfg = pipeline::prepare(ws.config_path, flags);
  CHECK_THROWS_AS(pipeline::run_filter(cfg), DependencyError);
  CHECK_THROWS_AS(pipeline::run_build_dataset(cfg, flags), DependencyError);
  CHECK_THROWS_AS(pipeline::run_classify(cfg, flags), DependencyError);
  CHECK_THROWS_AS(pipeline::run_finetune(cfg, flags), DependencyError);
  pipeline::run_ingest(cfg);
  CHECK_THROWS_AS(pipeline::run_build_dataset(cfg, flags), DependencyError);
  CHECK_THROWS_AS(pipeline::run_report(cfg, flags), DependencyError);
}

TEST_CASE("end-to-end identification, frame, and report") {
  auto ws = make_workspace("e2e");
  pipeline::Flags flags;
  flags.coder_id = "c1";
  auto cfg = run_front_half(ws, flags);

  // ingest artifacts
  auto stats = nlohmann::json::parse(
      read_all(ws.dir + "/out/corpus/stats.json"));
  CHECK(stats["lessons"] == 2);
  CHECK(stats["lines"] == 40);
  CHECK(stats["sentences"] == 40);
  CHECK(stats["skipped_manifest_rows"] == 1);

  // filter keeps exactly the 20 engaging sentences
  auto cands = filter::candidates_from_csv(
      read_all(pipeline::candidates_path(cfg)));
  CHECK(cands.size() == 20);

  // identification: dataset, baseline model, classification, metrics
  pipeline::run_build_dataset(cfg, flags);
  auto djson = nlohmann::json::parse(
      read_all(pipeline::dataset_dir(cfg, backend::Task::identification) +
               "/dataset.json"));
  CHECK(djson["examples"].size() == 40);  // 20 positives + 20 sampled
  pipeline::run_finetune(cfg, flags);
  CHECK(std::filesystem::exists(
      pipeline::baseline_model_path(cfg, backend::Task::identification)));
  pipeline::run_classify(cfg, flags);
  pipeline::run_evaluate(cfg, flags);
  auto metrics = nlohmann::json::parse(
      read_all(ws.dir + "/out/evaluate/identification-metrics.json"));
  // 20/20 split under the floor rule holds out 2+2 for test
  CHECK(metrics["confusion"]["tp"] == 2);
  CHECK(metrics["confusion"]["tn"] == 2);
  CHECK(metrics["metrics"]["sensitivity"] == 1.0);
  CHECK(metrics["metrics"]["specificity"] == 1.0);
  CHECK(metrics["metrics"]["precision"] == 1.0);
  CHECK(metrics["metrics"]["f1"] == 1.0);
  CHECK(metrics["unscored"] == 0);

  // frame pass over the kept messages
  pipeline::Flags fflags = flags;
  fflags.task = backend::Task::frame;
  {
    std::string script = repeat_cmd("g", 5) + repeat_cmd("l", 5) +
                         repeat_cmd("g", 5) + repeat_cmd("l", 5);
    std::istringstream in(script);
    std::ostringstream out;
    pipeline::run_review(cfg, fflags, in, out);
  }
  pipeline::run_build_dataset(cfg, fflags);
  pipeline::run_finetune(cfg, fflags);
  pipeline::run_classify(cfg, fflags);
  pipeline::run_evaluate(cfg, fflags);
  auto fmetrics = nlohmann::json::parse(
      read_all(ws.dir + "/out/evaluate/frame-metrics.json"));
  CHECK(fmetrics["confusion"]["tp"] == 1);
  CHECK(fmetrics["confusion"]["tn"] == 1);
  CHECK(fmetrics["metrics"]["f1"] == 1.0);

  // analytics report from the frame decisions
  pipeline::run_report(cfg, fflags);
  std::string report = read_all(ws.dir + "/out/report/report.csv");
  CHECK(report.find("overall,all,gain,10,10.00,50.00") != std::string::npos);
  CHECK(report.find("overall,all,loss,10,10.00,50.00") != std::string::npos);
  CHECK(report.find("grade,10,gain,5,5.00,50.00") != std::string::npos);
  CHECK(report.find("trimester,1,gain,5,5.00,25.00") != std::string::npos);
  auto rjson = nlohmann::json::parse(
      read_all(ws.dir + "/out/report/report.json"));
  CHECK(rjson["by_grade"]["11"]["loss"]["count"] == 5);

  // the run manifest records every stage without timestamps
  auto run = nlohmann::json::parse(read_all(ws.dir + "/out/run.json"));
  for (const char* stage :
       {"ingest", "filter", "build-dataset-identification",
        "finetune-identification", "classify-identification",
        "evaluate-identification", "report"}) {
    CHECK(run["stages"].contains(stage));
  }
  CHECK(read_all(ws.dir + "/out/run.json").find("timestamp") ==
        std::string::npos);
}

TEST_CASE("rerunning stages leaves artifacts byte-identical") {
  auto ws = make_workspace("rerun");
  pipeline::Flags flags;
  flags.coder_id = "c1";
  auto cfg = run_front_half(ws, flags);
  pipeline::run_build_dataset(cfg, flags);
  pipeline::run_finetune(cfg, flags);
  pipeline::run_classify(cfg, flags);
  pipeline::run_evaluate(cfg, flags);

  std::vector<std::string> artifacts{
      pipeline::candidates_path(cfg),
      pipeline::dataset_dir(cfg, backend::Task::identification) + "/dataset.json",
      pipeline::dataset_dir(cfg, backend::Task::identification) + "/train.jsonl",
      pipeline::dataset_dir(cfg, backend::Task::identification) + "/train.csv",
      pipeline::baseline_model_path(cfg, backend::Task::identification),
      ws.dir + "/out/classify/identification-predictions.csv",
      ws.dir + "/out/evaluate/identification-metrics.json",
      ws.dir + "/out/run.json",
  };
  std::map<std::string, std::string> before;
  for (const auto& p : artifacts) before[p] = read_all(p);

  // full rerun over the already-decided review log
  pipeline::run_ingest(cfg);
  pipeline::run_filter(cfg);
  pipeline::run_build_dataset(cfg, flags);
  pipeline::run_finetune(cfg, flags);
  pipeline::run_classify(cfg, flags);
  pipeline::run_evaluate(cfg, flags);
  for (const auto& p : artifacts) {
    CHECK(read_all(p) == before[p]);
  }
}

TEST_CASE("independent runs with the same seed agree bytewise") {
  auto ws = make_workspace("twin");
  auto run_into = [&](const std::string& out_dir) {
    pipeline::Flags flags;
    flags.coder_id = "c1";
    flags.out_dir = out_dir;
    auto cfg = run_front_half(ws, flags);
    pipeline::run_build_dataset(cfg, flags);
    pipeline::run_finetune(cfg, flags);
    pipeline::run_classify(cfg, flags);
    return cfg;
  };
  auto cfg1 = run_into(ws.dir + "/out1");
  auto cfg2 = run_into(ws.dir + "/out2");
  // content-only artifacts match across output directories
  for (const char* leaf : {"/train.jsonl", "/train.csv", "/val.jsonl",
                           "/test.jsonl"}) {
    CHECK(read_all(pipeline::dataset_dir(cfg1, backend::Task::identification) +
                   leaf) ==
          read_all(pipeline::dataset_dir(cfg2, backend::Task::identification) +
                   leaf));
  }
  CHECK(read_all(pipeline::baseline_model_path(
            cfg1, backend::Task::identification)) ==
        read_all(pipeline::baseline_model_path(
            cfg2, backend::Task::identification)));
  CHECK(read_all(ws.dir + "/out1/classify/identification-predictions.csv") ==
        read_all(ws.dir + "/out2/classify/identification-predictions.csv"));
}

TEST_CASE("evaluate agreement mode over two coder logs") {
  auto ws = make_workspace("agree");
  pipeline::Flags flags;
  auto cfg = pipeline::prepare(ws.config_path, flags);
  std::string log_a = ws.dir + "/coder_a.jsonl";
  std::string log_b = ws.dir + "/coder_b.jsonl";
  for (int i = 0; i < 10; ++i) {
    review::ReviewDecision d;
    d.ref = {"a", i, 0};
    d.timestamp = "2026-03-01T00:00:00Z";
    d.coder_id = "c1";
    d.label = "engaging";
    review::append_decision(log_a, d);
    d.coder_id = "c2";
    d.label = i < 8 ? "engaging" : "not_engaging";  // two disagreements
    review::append_decision(log_b, d);
  }
  flags.coder_a = log_a;
  flags.coder_b = log_b;
  pipeline::run_evaluate(cfg, flags);
  auto j = nlohmann::json::parse(
      read_all(ws.dir + "/out/evaluate/agreement.json"));
  CHECK(j["items"] == 10);
  CHECK(j["agreements"] == 8);
  CHECK(j["percent"] == doctest::Approx(80.0));
  CHECK(j["disagreements"].size() == 2);
}
