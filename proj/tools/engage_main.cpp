#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "engage/errors.hpp"
#include "engage/pipeline.hpp"

namespace {

using engage::pipeline::Flags;

int dispatch(const std::string& stage, const std::string& config_path,
             const Flags& flags) {
  auto cfg = engage::pipeline::prepare(config_path, flags);
  if (stage == "ingest") {
    engage::pipeline::run_ingest(cfg);
  } else if (stage == "filter") {
    engage::pipeline::run_filter(cfg);
  } else if (stage == "build-dataset") {
    engage::pipeline::run_build_dataset(cfg, flags);
  } else if (stage == "finetune") {
    engage::pipeline::run_finetune(cfg, flags);
  } else if (stage == "classify") {
    engage::pipeline::run_classify(cfg, flags);
  } else if (stage == "review") {
    engage::pipeline::run_review(cfg, flags, std::cin, std::cout);
  } else if (stage == "evaluate") {
    engage::pipeline::run_evaluate(cfg, flags);
  } else if (stage == "report") {
    engage::pipeline::run_report(cfg, flags);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"teacher-discourse message pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  Flags flags;
  std::string task_name = "identification";
  uint64_t seed_flag = 0;
  std::string out_dir_flag;
  std::string pred_path, gold_path, coder_a, coder_b;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "pipeline config file")
        ->required();
    sub->add_option("--seed", seed_flag, "seed override")
        ->each([&](const std::string&) { flags.seed = seed_flag; });
    sub->add_option("--out-dir", out_dir_flag, "output directory override")
        ->each([&](const std::string&) { flags.out_dir = out_dir_flag; });
    sub->add_option("--backend", flags.backend_kind, "baseline or remote")
        ->check(CLI::IsMember({"baseline", "remote"}));
    sub->add_option("--task", task_name, "identification or frame")
        ->check(CLI::IsMember({"identification", "frame"}));
    sub->add_option("--coder-id", flags.coder_id, "coder identifier");
  };

  for (const char* name : {"ingest", "filter", "build-dataset", "finetune",
                           "classify", "review", "evaluate", "report"}) {
    add_common(app.add_subcommand(name));
  }
  app.get_subcommand("classify")
      ->add_option("--input", flags.input, "test or candidates")
      ->check(CLI::IsMember({"test", "candidates"}));
  auto* evaluate = app.get_subcommand("evaluate");
  evaluate->add_option("--pred", pred_path, "predictions csv override")
      ->each([&](const std::string&) { flags.pred_path = pred_path; });
  evaluate->add_option("--gold", gold_path, "gold csv override")
      ->each([&](const std::string&) { flags.gold_path = gold_path; });
  evaluate->add_option("--coder-a", coder_a, "decisions log of coder A")
      ->each([&](const std::string&) { flags.coder_a = coder_a; });
  evaluate->add_option("--coder-b", coder_b, "decisions log of coder B")
      ->each([&](const std::string&) { flags.coder_b = coder_b; });

  CLI11_PARSE(app, argc, argv);
  flags.task = engage::backend::parse_task(task_name);

  try {
    return dispatch(app.get_subcommands().front()->get_name(), config_path,
                    flags);
  } catch (const engage::DependencyError& e) {
    std::cerr << "dependency error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
