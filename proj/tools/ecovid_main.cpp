// ecovid: command-line front end for the feature / train / correlate / report stages.
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ecovid/error.hpp"
#include "ecovid/pipeline.hpp"

namespace pl = ecovid::pipeline;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> split;
  std::optional<std::string> feature_set;
  std::optional<std::string> task;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Run configuration (JSON)")->required();
  cmd->add_option("--seed", f.seed, "Master seed (overrides ECOVID_SEED and the config)");
  cmd->add_option("--split", f.split, "Training fraction in (0, 1)");
  cmd->add_option("--feature-set", f.feature_set, "raw, comments or both");
  cmd->add_option("--task", f.task, "regression, classification or both");
  cmd->add_option("--out", f.out, "Output directory");
}

pl::RunConfig build_config(const Flags& f) {
  auto config = pl::load_config(f.config);
  pl::Overrides o;
  o.seed = f.seed;
  o.split = f.split;
  if (f.feature_set) o.feature_set = pl::parse_feature_set(*f.feature_set);
  if (f.task) o.task = pl::parse_task(*f.task);
  if (f.out) o.output_dir = std::filesystem::absolute(*f.out).lexically_normal();
  pl::apply_overrides(config, o, std::getenv("ECOVID_SEED"));
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Engagement analytics for short videos: features, models, correlations, report"};
  app.require_subcommand(1);
  Flags flags;
  auto* features = app.add_subcommand("features", "Extract raw_features.csv and comment_features.csv");
  auto* train = app.add_subcommand("train", "Fit and evaluate the regressors and classifiers");
  auto* correlate = app.add_subcommand("correlate", "Pearson matrices of features vs popularity metrics");
  auto* report = app.add_subcommand("report", "Merge all artifacts into report.json and summary.txt");
  for (auto* cmd : {features, train, correlate, report}) add_common(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto config = build_config(flags);
    nlohmann::json status;
    if (*features) status = pl::cmd_features(config);
    else if (*train) status = pl::cmd_train_eval(config);
    else if (*correlate) status = pl::cmd_correlate(config);
    else status = pl::cmd_report(config);
    std::cout << status.dump() << "\n";
    return 0;
  } catch (const ecovid::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
