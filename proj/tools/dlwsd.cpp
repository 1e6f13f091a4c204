// Batch command-line front end for the decision-list WSD toolkit.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dlwsd/dlwsd.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string morphology;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::optional<int> folds;
  std::string backoff;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Run configuration file (key = value)");
  cmd->add_option("--morphology", f.morphology, "Required corpus morphology")->check(
      CLI::IsMember({"PLAIN", "AGGLUTINATIVE"}));
  cmd->add_option("--seed", f.seed, "Fold assignment seed");
  cmd->add_option("--threshold", f.threshold, "Feature selection precision threshold");
  cmd->add_option("--folds", f.folds, "Cross-validation folds");
  cmd->add_option("--backoff", f.backoff, "Behaviour when no feature matches")->check(
      CLI::IsMember({"ABSTAIN", "MFS"}));
  cmd->add_option("--jobs", f.jobs, "Worker threads");
}

dlwsd::RunConfig resolve_config(const CommonFlags& f) {
  dlwsd::RunConfig config;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw dlwsd::CommandError("cannot open '" + f.config_path + "' for reading");
    try {
      config = dlwsd::parse_config(in);
    } catch (const dlwsd::ParseError& e) {
      throw dlwsd::CommandError("'" + f.config_path + "': " + e.what());
    }
  }
  if (!f.morphology.empty()) dlwsd::set_config_value(config, "morphology", f.morphology);
  if (!f.backoff.empty()) dlwsd::set_config_value(config, "backoff", f.backoff);
  if (f.seed) config.seed = *f.seed;
  if (f.threshold) config.threshold = *f.threshold;
  if (f.folds) config.folds = *f.folds;
  if (f.jobs) config.jobs = *f.jobs;
  config.validate();
  return config;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision-list word sense disambiguation"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string corpus, out_dir, model_dir, predictions, gold, map_path, out_path, train_path, format = "text";

  auto* train = app.add_subcommand("train", "Train one decision list per target word");
  train->add_option("corpus", corpus, "Training corpus")->required();
  train->add_option("out_dir", out_dir, "Output model directory")->required();
  add_common(train, flags);

  auto* select = app.add_subcommand("select", "Train lists restricted to cross-validated high-precision features");
  select->add_option("corpus", corpus, "Training corpus")->required();
  select->add_option("out_dir", out_dir, "Output directory")->required();
  add_common(select, flags);

  auto* classify = app.add_subcommand("classify", "Disambiguate a corpus with trained models");
  classify->add_option("model_dir", model_dir, "Directory of .dlist files")->required();
  classify->add_option("corpus", corpus, "Corpus to classify")->required();
  classify->add_option("out_predictions", predictions, "Prediction file to write")->required();
  add_common(classify, flags);

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold senses");
  evaluate->add_option("gold", gold, "Gold corpus")->required();
  evaluate->add_option("predictions", predictions, "Prediction file")->required();
  evaluate->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "machine"}));
  add_common(evaluate, flags);

  auto* map_senses = app.add_subcommand("map-senses", "Rewrite gold senses through a sense map");
  map_senses->add_option("corpus", corpus, "Input corpus")->required();
  map_senses->add_option("map", map_path, "Sense map (old<TAB>new)")->required();
  map_senses->add_option("out", out_path, "Remapped corpus to write")->required();
  add_common(map_senses, flags);

  auto* baseline = app.add_subcommand("baseline", "Most-frequent-sense predictions");
  baseline->add_option("train", train_path, "Training corpus")->required();
  baseline->add_option("test", corpus, "Corpus to predict")->required();
  baseline->add_option("out_predictions", predictions, "Prediction file to write")->required();
  add_common(baseline, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dlwsd::kExitFatal;
  }

  dlwsd::RunConfig config;
  try {
    config = resolve_config(flags);
  } catch (const dlwsd::Error& e) {
    std::cerr << "dlwsd: error: " << e.what() << '\n';
    return dlwsd::kExitFatal;
  }

  if (*train) return dlwsd::cmd_train(corpus, out_dir, config, std::cerr);
  if (*select) return dlwsd::cmd_select(corpus, out_dir, config, std::cerr);
  if (*classify) return dlwsd::cmd_classify(model_dir, corpus, predictions, config, std::cerr);
  if (*evaluate) {
    const auto fmt = format == "machine" ? dlwsd::ReportFormat::Machine : dlwsd::ReportFormat::Text;
    return dlwsd::cmd_evaluate(gold, predictions, fmt, config, std::cout, std::cerr);
  }
  if (*map_senses) return dlwsd::cmd_map_senses(corpus, map_path, out_path, config, std::cerr);
  if (*baseline) return dlwsd::cmd_baseline(train_path, corpus, predictions, config, std::cerr);
  return dlwsd::kExitFatal;
}
