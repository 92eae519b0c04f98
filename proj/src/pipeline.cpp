#include "engage/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <set>

#include <nlohmann/json.hpp>

#include "engage/analytics.hpp"
#include "engage/csv.hpp"
#include "engage/errors.hpp"
#include "engage/rng.hpp"
#include "engage/eval.hpp"
#include "engage/review.hpp"
#include "engage/runmeta.hpp"

namespace engage::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string join(const std::string& dir, const std::string& leaf) {
  return (fs::path(dir) / leaf).string();
}

void ensure_dir(const std::string& path) {
  fs::create_directories(path);
}

void require_artifact(const std::string& path, const std::string& stage) {
  if (!fs::exists(path)) {
    throw DependencyError("missing artifact '" + path + "': run the '" +
                          stage + "' stage first");
  }
}

std::string config_hash(const config::PipelineConfig& cfg) {
  return runmeta::fnv1a_hex(cfg.raw_text);
}

// Resolves a manifest-relative transcript path.
std::string resolve_path(const std::string& base_file,
                         const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(base_file).parent_path() / p).string();
}

corpus::Corpus load_corpus_artifact(const config::PipelineConfig& cfg) {
  require_artifact(lessons_path(cfg), "ingest");
  corpus::Corpus corpus;
  std::string data = dataset::read_file(lessons_path(cfg));
  size_t start = 0;
  while (start < data.size()) {
    size_t end = data.find('\n', start);
    if (end == std::string::npos) end = data.size();
    std::string_view line(data.data() + start, end - start);
    if (!line.empty()) {
      auto j = ordered_json::parse(line);
      corpus::LessonRecord lesson;
      lesson.metadata.lesson_id = j.at("lesson_id").get<std::string>();
      lesson.metadata.teacher_id = j.at("teacher_id").get<std::string>();
      lesson.metadata.group_id = j.at("group_id").get<std::string>();
      lesson.metadata.grade = j.at("grade").get<int>();
      lesson.metadata.trimester = j.at("trimester").get<int>();
      if (j.contains("date") && !j.at("date").is_null()) {
        lesson.metadata.recorded_date = j.at("date").get<std::string>();
      }
      lesson.lines = j.at("lines").get<std::vector<std::string>>();
      corpus.add(std::move(lesson));
    }
    start = end + 1;
  }
  return corpus;
}

std::map<corpus::SentenceRef, std::string> sentence_text_map(
    const corpus::Corpus& corpus) {
  std::map<corpus::SentenceRef, std::string> out;
  for (const auto& s : filter::segment_corpus(corpus)) {
    out[s.ref] = s.text;
  }
  return out;
}

// Finds the decisions log for (task, coder); when coder is empty and exactly
// one log exists for the task, uses it.
std::string find_decisions_log(const config::PipelineConfig& cfg,
                               backend::Task task,
                               const std::string& coder_id) {
  if (!coder_id.empty()) return decisions_path(cfg, task, coder_id);
  std::string dir = join(cfg.out_dir, "review");
  std::string prefix =
      std::string("decisions-") + backend::task_name(task) + "-";
  std::vector<std::string> hits;
  if (fs::exists(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      std::string name = entry.path().filename().string();
      if (name.rfind(prefix, 0) == 0 && name.size() > prefix.size() &&
          name.find(".jsonl") != std::string::npos &&
          name.find(".lock") == std::string::npos) {
        hits.push_back(entry.path().string());
      }
    }
  }
  if (hits.size() == 1) return hits[0];
  if (hits.empty()) return decisions_path(cfg, task, "gold");
  throw ValidationError(
      "multiple decision logs found; pass --coder-id to pick one");
}

struct DatasetArtifact {
  dataset::ExampleDataset dataset;
  dataset::SplitAssignment split;
};

std::string dataset_json_path(const config::PipelineConfig& cfg,
                              backend::Task task) {
  return join(dataset_dir(cfg, task), "dataset.json");
}

void save_dataset_artifact(const config::PipelineConfig& cfg,
                           backend::Task task, const DatasetArtifact& art) {
  std::string dir = dataset_dir(cfg, task);
  ensure_dir(dir);
  ordered_json j;
  j["task"] = backend::task_name(task);
  j["provenance"] = art.dataset.provenance;
  j["config"] = {{"positive_fraction", art.dataset.config.positive_fraction},
                 {"train_fraction", art.dataset.config.train_fraction},
                 {"val_fraction", art.dataset.config.val_fraction},
                 {"test_fraction", art.dataset.config.test_fraction},
                 {"seed", art.dataset.config.seed},
                 {"stratified", art.dataset.config.stratified}};
  j["examples"] = ordered_json::array();
  static const char* subset_names[] = {"train", "val", "test"};
  for (size_t i = 0; i < art.dataset.examples.size(); ++i) {
    const auto& e = art.dataset.examples[i];
    ordered_json ej;
    ej["text"] = e.text;
    ej["label"] = e.label;
    if (e.ref) {
      ej["ref"] = e.ref->to_string();
    } else {
      ej["ref"] = nullptr;
    }
    ej["subset"] = subset_names[static_cast<int>(art.split.assignment[i])];
    j["examples"].push_back(std::move(ej));
  }
  dataset::write_file(dataset_json_path(cfg, task), j.dump(2) + "\n");

  for (auto subset : {dataset::Subset::train, dataset::Subset::val,
                      dataset::Subset::test}) {
    auto rows = dataset::subset_examples(art.dataset, art.split, subset);
    const char* name = subset_names[static_cast<int>(subset)];
    dataset::write_file(join(dir, std::string(name) + ".csv"),
                        dataset::to_csv(rows));
    dataset::write_file(join(dir, std::string(name) + ".jsonl"),
                        dataset::to_jsonl(rows));
  }
}

DatasetArtifact load_dataset_artifact(const config::PipelineConfig& cfg,
                                      backend::Task task) {
  require_artifact(dataset_json_path(cfg, task), "build-dataset");
  auto j = ordered_json::parse(dataset::read_file(dataset_json_path(cfg, task)));
  DatasetArtifact art;
  art.dataset.provenance = j.value("provenance", "");
  const auto& cj = j.at("config");
  art.dataset.config.positive_fraction = cj.at("positive_fraction").get<double>();
  art.dataset.config.train_fraction = cj.at("train_fraction").get<double>();
  art.dataset.config.val_fraction = cj.at("val_fraction").get<double>();
  art.dataset.config.test_fraction = cj.at("test_fraction").get<double>();
  art.dataset.config.seed = cj.at("seed").get<uint64_t>();
  art.dataset.config.stratified = cj.at("stratified").get<bool>();
  for (const auto& ej : j.at("examples")) {
    dataset::LabeledExample e;
    e.text = ej.at("text").get<std::string>();
    e.label = ej.at("label").get<int>();
    if (!ej.at("ref").is_null()) {
      e.ref = corpus::SentenceRef::parse(ej.at("ref").get<std::string>());
    }
    art.dataset.examples.push_back(std::move(e));
    std::string subset = ej.at("subset").get<std::string>();
    art.split.assignment.push_back(subset == "train" ? dataset::Subset::train
                                   : subset == "val" ? dataset::Subset::val
                                                     : dataset::Subset::test);
  }
  return art;
}

int label_of(const std::string& decision_label) {
  if (decision_label == "engaging" || decision_label == "gain") return 1;
  return 0;
}

}  // namespace

std::string lessons_path(const config::PipelineConfig& cfg) {
  return join(join(cfg.out_dir, "corpus"), "lessons.jsonl");
}

std::string candidates_path(const config::PipelineConfig& cfg) {
  return join(join(cfg.out_dir, "filter"), "candidates.csv");
}

std::string decisions_path(const config::PipelineConfig& cfg,
                           backend::Task task, const std::string& coder_id) {
  return join(join(cfg.out_dir, "review"),
              std::string("decisions-") + backend::task_name(task) + "-" +
                  coder_id + ".jsonl");
}

std::string dataset_dir(const config::PipelineConfig& cfg,
                        backend::Task task) {
  return join(join(cfg.out_dir, "dataset"), backend::task_name(task));
}

std::string baseline_model_path(const config::PipelineConfig& cfg,
                                backend::Task task) {
  return join(join(cfg.out_dir, "models"),
              std::string(backend::task_name(task)) + "-baseline.json");
}

config::PipelineConfig prepare(const std::string& config_path,
                               const Flags& flags) {
  config::PipelineConfig cfg = config::load_pipeline_config(config_path);
  if (flags.seed) cfg.dataset.seed = *flags.seed;
  if (flags.out_dir) cfg.out_dir = *flags.out_dir;
  return cfg;
}

void run_ingest(const config::PipelineConfig& cfg) {
  auto manifest = corpus::load_manifest(cfg.manifest_path);
  corpus::Corpus corpus;
  size_t skipped = 0;
  std::map<std::string, std::string> inputs;
  inputs[cfg.manifest_path] = runmeta::file_digest(cfg.manifest_path);
  for (const auto& row : manifest) {
    if (row.path.empty()) {
      ++skipped;  // transcript never arrived; flagged, not fatal
      continue;
    }
    std::string path = resolve_path(cfg.manifest_path, row.path);
    corpus.add(corpus::ingest_lesson_file(path, row.metadata));
    inputs[path] = runmeta::file_digest(path);
  }

  ensure_dir(join(cfg.out_dir, "corpus"));
  std::string lessons;
  for (const auto& [id, lesson] : corpus.lessons()) {
    ordered_json j;
    j["lesson_id"] = lesson.metadata.lesson_id;
    j["teacher_id"] = lesson.metadata.teacher_id;
    j["group_id"] = lesson.metadata.group_id;
    j["grade"] = lesson.metadata.grade;
    j["trimester"] = lesson.metadata.trimester;
    if (lesson.metadata.recorded_date) {
      j["date"] = *lesson.metadata.recorded_date;
    } else {
      j["date"] = nullptr;
    }
    j["lines"] = lesson.lines;
    lessons += j.dump() + "\n";
  }
  dataset::write_file(lessons_path(cfg), lessons);

  auto stats = corpus::corpus_stats(corpus);
  ordered_json sj;
  sj["lessons"] = stats.lesson_count;
  sj["lines"] = stats.line_count;
  sj["sentences"] = stats.sentence_count;
  sj["skipped_manifest_rows"] = skipped;
  dataset::write_file(join(join(cfg.out_dir, "corpus"), "stats.json"),
                      sj.dump(2) + "\n");

  runmeta::RunManifest run(cfg.out_dir);
  run.record_stage("ingest", config_hash(cfg), cfg.dataset.seed, inputs,
                   {lessons_path(cfg)});
  run.save();
}

void run_filter(const config::PipelineConfig& cfg) {
  auto corpus = load_corpus_artifact(cfg);
  auto keywords = filter::KeywordList::load(cfg.keyword_path, cfg.match_policy);
  auto sentences = filter::segment_corpus(corpus);
  auto candidates = filter::keyword_filter(sentences, keywords);

  ensure_dir(join(cfg.out_dir, "filter"));
  dataset::write_file(candidates_path(cfg),
                      filter::candidates_to_csv(candidates));

  runmeta::RunManifest run(cfg.out_dir);
  run.record_stage("filter", config_hash(cfg), cfg.dataset.seed,
                   {{lessons_path(cfg), runmeta::file_digest(lessons_path(cfg))},
                    {cfg.keyword_path, runmeta::file_digest(cfg.keyword_path)}},
                   {candidates_path(cfg)});
  run.save();
}

void run_review(const config::PipelineConfig& cfg, const Flags& flags,
                std::istream& in, std::ostream& out) {
  require_artifact(candidates_path(cfg), "filter");
  if (flags.coder_id.empty()) {
    throw ValidationError("review requires --coder-id");
  }
  auto candidates =
      filter::candidates_from_csv(dataset::read_file(candidates_path(cfg)));

  std::vector<filter::CandidateSentence> queue;
  if (flags.task == backend::Task::identification) {
    queue = candidates;
  } else {
    // frame review runs over the messages this coder kept as engaging
    std::string id_log =
        find_decisions_log(cfg, backend::Task::identification, flags.coder_id);
    require_artifact(id_log, "review (identification)");
    auto kept = review::latest_decisions(review::load_decisions(id_log),
                                         flags.coder_id);
    for (const auto& cand : candidates) {
      auto it = kept.find(cand.sentence.ref);
      if (it == kept.end() || it->second.label != "engaging") continue;
      filter::CandidateSentence c = cand;
      if (it->second.corrected_text) {
        c.sentence.text = *it->second.corrected_text;
      }
      queue.push_back(std::move(c));
    }
  }

  ensure_dir(join(cfg.out_dir, "review"));
  std::string log = decisions_path(cfg, flags.task, flags.coder_id);
  auto mode = flags.task == backend::Task::identification
                  ? review::ReviewMode::identification
                  : review::ReviewMode::frame;
  auto result = review::run_session(queue, flags.coder_id, log, mode, in, out);
  out << "\nreview: " << result.decided << " decided, "
      << (result.quit_early ? "stopped early" : "queue complete") << "\n";
}

void run_build_dataset(const config::PipelineConfig& cfg, const Flags& flags) {
  auto corpus = load_corpus_artifact(cfg);
  require_artifact(candidates_path(cfg), "filter");
  std::string log = find_decisions_log(cfg, flags.task, flags.coder_id);
  require_artifact(log, "review");

  auto decisions_log = review::load_decisions(log);
  std::string coder =
      flags.coder_id.empty()
          ? (decisions_log.empty() ? "" : decisions_log.front().coder_id)
          : flags.coder_id;
  auto decisions = review::latest_decisions(decisions_log, coder);
  auto texts = sentence_text_map(corpus);

  DatasetArtifact art;
  if (flags.task == backend::Task::identification) {
    std::vector<dataset::LabeledExample> positives;
    std::set<corpus::SentenceRef> positive_refs;
    for (const auto& [ref, d] : decisions) {
      if (d.label != "engaging") continue;
      auto it = texts.find(ref);
      std::string text =
          d.corrected_text ? *d.corrected_text
                           : (it != texts.end() ? it->second : std::string());
      if (text.empty()) continue;
      positives.push_back(dataset::LabeledExample{text, 1, ref});
      positive_refs.insert(ref);
    }
    std::vector<dataset::LabeledExample> pool;
    for (const auto& [ref, text] : texts) {
      if (positive_refs.count(ref)) continue;
      pool.push_back(dataset::LabeledExample{text, 0, ref});
    }
    art.dataset = dataset::build_examples(positives, pool, cfg.dataset);
    art.dataset.provenance = "corpus=" + cfg.manifest_path + " gold=" + log;
  } else {
    // frame task: the full reviewed message set, gain=1 / loss=0
    std::vector<dataset::LabeledExample> examples;
    for (const auto& [ref, d] : decisions) {
      if (d.label != "gain" && d.label != "loss") continue;
      auto it = texts.find(ref);
      std::string text =
          d.corrected_text ? *d.corrected_text
                           : (it != texts.end() ? it->second : std::string());
      if (text.empty()) continue;
      examples.push_back(
          dataset::LabeledExample{text, d.label == "gain" ? 1 : 0, ref});
    }
    rng::SplitMix64 gen(cfg.dataset.seed);
    rng::shuffle(examples, gen);
    art.dataset.examples = std::move(examples);
    art.dataset.config = cfg.dataset;
    art.dataset.provenance = "frames=" + log;
  }
  art.split = dataset::split(art.dataset);
  save_dataset_artifact(cfg, flags.task, art);

  runmeta::RunManifest run(cfg.out_dir);
  run.record_stage(
      std::string("build-dataset-") + backend::task_name(flags.task),
      config_hash(cfg), cfg.dataset.seed,
      {{candidates_path(cfg), runmeta::file_digest(candidates_path(cfg))},
       {log, runmeta::file_digest(log)}},
      {dataset_json_path(cfg, flags.task)});
  run.save();
}

void run_finetune(const config::PipelineConfig& cfg, const Flags& flags) {
  std::string dir = dataset_dir(cfg, flags.task);
  require_artifact(dataset_json_path(cfg, flags.task), "build-dataset");

  if (flags.backend_kind == "baseline") {
    auto art = load_dataset_artifact(cfg, flags.task);
    auto train =
        dataset::subset_examples(art.dataset, art.split, dataset::Subset::train);
    auto model = backend::BaselineModel::train(train);
    ensure_dir(join(cfg.out_dir, "models"));
    model.save(baseline_model_path(cfg, flags.task));
  } else {
    backend::FineTuneJob job;
    job.task = flags.task;
    job.train_file = join(dir, "train.jsonl");
    job.val_file = join(dir, "val.jsonl");
    ensure_dir(join(cfg.out_dir, "finetune"));
    backend::JobLedger ledger(join(join(cfg.out_dir, "finetune"), "jobs.jsonl"));
    backend::RemoteClient client(cfg.remote);
    job = client.submit_finetune(job, ledger);
    ordered_json j;
    j["job_id"] = job.job_id;
    j["status"] = backend::job_status_name(job.status);
    j["task"] = backend::task_name(job.task);
    dataset::write_file(
        join(join(cfg.out_dir, "finetune"),
             std::string(backend::task_name(flags.task)) + "-job.json"),
        j.dump(2) + "\n");
  }

  runmeta::RunManifest run(cfg.out_dir);
  run.record_stage(
      std::string("finetune-") + backend::task_name(flags.task),
      config_hash(cfg), cfg.dataset.seed,
      {{join(dir, "train.jsonl"), runmeta::file_digest(join(dir, "train.jsonl"))},
       {join(dir, "val.jsonl"), runmeta::file_digest(join(dir, "val.jsonl"))}},
      {});
  run.save();
}

void run_classify(const config::PipelineConfig& cfg, const Flags& flags) {
  backend::ClassifierModel model;
  if (flags.backend_kind == "baseline") {
    std::string path = baseline_model_path(cfg, flags.task);
    require_artifact(path, "finetune");
    model = backend::ClassifierModel::make_baseline(
        flags.task, backend::BaselineModel::load(path), path);
  } else {
    model = backend::ClassifierModel::make_remote(flags.task, cfg.remote.model);
  }

  std::vector<filter::Sentence> inputs;
  std::vector<int> gold_labels;
  std::map<std::string, std::string> run_inputs;
  if (flags.input == "candidates") {
    require_artifact(candidates_path(cfg), "filter");
    auto candidates =
        filter::candidates_from_csv(dataset::read_file(candidates_path(cfg)));
    for (const auto& c : candidates) inputs.push_back(c.sentence);
    run_inputs[candidates_path(cfg)] =
        runmeta::file_digest(candidates_path(cfg));
  } else {
    auto art = load_dataset_artifact(cfg, flags.task);
    size_t idx = 0;
    for (size_t i = 0; i < art.dataset.examples.size(); ++i) {
      if (art.split.assignment[i] != dataset::Subset::test) continue;
      const auto& e = art.dataset.examples[i];
      corpus::SentenceRef ref =
          e.ref ? *e.ref
                : corpus::SentenceRef{"example-" + std::to_string(idx), 0, 0};
      inputs.push_back(filter::Sentence{e.text, ref});
      gold_labels.push_back(e.label);
      ++idx;
    }
    run_inputs[dataset_json_path(cfg, flags.task)] =
        runmeta::file_digest(dataset_json_path(cfg, flags.task));
  }

  backend::CompletionParams params;  // temperature 0, top_p 1, max_tokens 1
  auto predictions = backend::classify_batch(model, inputs, params,
                                             flags.backend_kind == "remote"
                                                 ? &cfg.remote
                                                 : nullptr);

  ensure_dir(join(cfg.out_dir, "classify"));
  std::string task = backend::task_name(flags.task);
  std::vector<eval::ScoredLabel> ok_rows;
  std::string unscored = "ref,status\n";
  for (const auto& p : predictions) {
    if (p.status == backend::Prediction::Status::ok) {
      ok_rows.push_back(eval::ScoredLabel{p.ref, p.label});
    } else {
      unscored += csv::write_row(
          {p.ref.to_string(),
           p.status == backend::Prediction::Status::parse_error
               ? "parse_error"
               : "transport_error"});
    }
  }
  std::string pred_path = join(join(cfg.out_dir, "classify"),
                               task + "-predictions.csv");
  dataset::write_file(pred_path, eval::labels_to_csv(ok_rows));
  dataset::write_file(
      join(join(cfg.out_dir, "classify"), task + "-unscored.csv"), unscored);

  if (!gold_labels.empty()) {
    std::vector<eval::ScoredLabel> gold;
    for (size_t i = 0; i < inputs.size(); ++i) {
      gold.push_back(eval::ScoredLabel{inputs[i].ref, gold_labels[i]});
    }
    dataset::write_file(
        join(join(cfg.out_dir, "classify"), task + "-gold.csv"),
        eval::labels_to_csv(gold));
  }

  runmeta::RunManifest run(cfg.out_dir);
  run.record_stage(std::string("classify-") + task, config_hash(cfg),
                   cfg.dataset.seed, run_inputs, {pred_path});
  run.save();
}

void run_evaluate(const config::PipelineConfig& cfg, const Flags& flags) {
  ensure_dir(join(cfg.out_dir, "evaluate"));
  if (flags.coder_a && flags.coder_b) {
    // agreement between two coder logs over their common refs
    auto log_a = review::load_decisions(*flags.coder_a);
    auto log_b = review::load_decisions(*flags.coder_b);
    if (log_a.empty() || log_b.empty()) {
      throw ValidationError("agreement: empty decisions log");
    }
    auto a = review::latest_decisions(log_a, log_a.front().coder_id);
    auto b = review::latest_decisions(log_b, log_b.front().coder_id);
    std::vector<eval::ScoredLabel> va, vb;
    for (const auto& [ref, da] : a) {
      auto it = b.find(ref);
      if (it == b.end()) continue;
      va.push_back(eval::ScoredLabel{ref, label_of(da.label)});
      vb.push_back(eval::ScoredLabel{ref, label_of(it->second.label)});
    }
    auto report = eval::agreement(va, vb);
    ordered_json j;
    j["items"] = report.items;
    j["agreements"] = report.agreements;
    j["percent"] = report.percent;
    j["disagreements"] = ordered_json::array();
    for (const auto& ref : report.disagreements) {
      j["disagreements"].push_back(ref.to_string());
    }
    dataset::write_file(join(join(cfg.out_dir, "evaluate"), "agreement.json"),
                        j.dump(2) + "\n");
    return;
  }

  std::string task = backend::task_name(flags.task);
  std::string pred_path =
      flags.pred_path.value_or(join(join(cfg.out_dir, "classify"),
                                    task + "-predictions.csv"));
  std::string gold_path = flags.gold_path.value_or(
      join(join(cfg.out_dir, "classify"), task + "-gold.csv"));
  require_artifact(pred_path, "classify");
  require_artifact(gold_path, "classify");

  auto predictions = eval::labels_from_csv(dataset::read_file(pred_path));
  auto gold_rows = eval::labels_from_csv(dataset::read_file(gold_path));
  std::map<corpus::SentenceRef, int> gold_by_ref;
  for (const auto& g : gold_rows) gold_by_ref[g.ref] = g.label;

  std::vector<eval::ScoredLabel> aligned_gold;
  for (const auto& p : predictions) {
    auto it = gold_by_ref.find(p.ref);
    if (it == gold_by_ref.end()) {
      throw AlignmentError("evaluate: prediction ref " + p.ref.to_string() +
                           " missing from gold");
    }
    aligned_gold.push_back(eval::ScoredLabel{p.ref, it->second});
  }
  size_t unscored = 0;
  std::string unscored_path =
      join(join(cfg.out_dir, "classify"), task + "-unscored.csv");
  if (fs::exists(unscored_path)) {
    auto rows = csv::parse(dataset::read_file(unscored_path));
    unscored = rows.size() > 1 ? rows.size() - 1 : 0;
  }

  auto result = eval::confusion(predictions, aligned_gold);
  auto report = eval::metrics(result.matrix);
  std::string out_path =
      join(join(cfg.out_dir, "evaluate"), task + "-metrics.json");
  dataset::write_file(out_path, eval::metrics_to_json(result.matrix, report,
                                                      unscored + result.unscored));

  runmeta::RunManifest run(cfg.out_dir);
  run.record_stage(std::string("evaluate-") + task, config_hash(cfg),
                   cfg.dataset.seed,
                   {{pred_path, runmeta::file_digest(pred_path)},
                    {gold_path, runmeta::file_digest(gold_path)}},
                   {out_path});
  run.save();
}

void run_report(const config::PipelineConfig& cfg, const Flags& flags) {
  auto corpus = load_corpus_artifact(cfg);
  auto texts = sentence_text_map(corpus);

  // frame labels: reviewed decisions preferred, classifier output accepted
  std::vector<std::pair<corpus::SentenceRef, analytics::Frame>> frames;
  std::string source;
  std::string frame_log = find_decisions_log(cfg, backend::Task::frame,
                                             flags.coder_id);
  std::string frame_preds =
      join(join(cfg.out_dir, "classify"), "frame-predictions.csv");
  if (fs::exists(frame_log)) {
    source = frame_log;
    auto log = review::load_decisions(frame_log);
    std::string coder = flags.coder_id.empty()
                            ? (log.empty() ? "" : log.front().coder_id)
                            : flags.coder_id;
    for (const auto& [ref, d] : review::latest_decisions(log, coder)) {
      if (d.label == "gain") frames.emplace_back(ref, analytics::Frame::gain);
      if (d.label == "loss") frames.emplace_back(ref, analytics::Frame::loss);
    }
  } else if (fs::exists(frame_preds)) {
    source = frame_preds;
    for (const auto& row :
         eval::labels_from_csv(dataset::read_file(frame_preds))) {
      frames.emplace_back(row.ref, row.label == 1 ? analytics::Frame::gain
                                                  : analytics::Frame::loss);
    }
  } else {
    throw DependencyError(
        "no frame labels found: run the 'review' (frame) or 'classify' "
        "(frame) stage first");
  }

  std::vector<analytics::MessageObservation> observations;
  analytics::GroupCensus census;
  std::map<int, std::set<std::string>> groups_by_grade;
  for (const auto& [id, lesson] : corpus.lessons()) {
    groups_by_grade[lesson.metadata.grade].insert(lesson.metadata.group_id);
  }
  for (const auto& [grade, groups] : groups_by_grade) {
    census[grade] = static_cast<int>(groups.size());
  }
  for (const auto& [ref, frame] : frames) {
    const auto* lesson = corpus.find(ref.lesson_id);
    if (!lesson) {
      throw ValidationError("report: frame label for unknown lesson " +
                            ref.lesson_id);
    }
    analytics::MessageObservation obs;
    auto it = texts.find(ref);
    obs.text = it != texts.end() ? it->second : "";
    obs.frame = frame;
    obs.grade = lesson->metadata.grade;
    obs.trimester = lesson->metadata.trimester;
    obs.group_id = lesson->metadata.group_id;
    obs.ref = ref;
    observations.push_back(std::move(obs));
  }

  auto report = analytics::aggregate(observations, census);
  ensure_dir(join(cfg.out_dir, "report"));
  std::string csv_path = join(join(cfg.out_dir, "report"), "report.csv");
  dataset::write_file(csv_path, analytics::report_to_csv(report));
  dataset::write_file(join(join(cfg.out_dir, "report"), "report.json"),
                      analytics::report_to_json(report));

  runmeta::RunManifest run(cfg.out_dir);
  run.record_stage("report", config_hash(cfg), cfg.dataset.seed,
                   {{source, runmeta::file_digest(source)}}, {csv_path});
  run.save();
}

}  // namespace engage::pipeline
