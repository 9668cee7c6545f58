#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ecovid/affect.hpp"
#include "ecovid/chroma.hpp"
#include "ecovid/corpus.hpp"
#include "ecovid/error.hpp"
#include "ecovid/evalkit.hpp"
#include "ecovid/learners/forest.hpp"
#include "ecovid/learners/mlp.hpp"
#include "ecovid/learners/model_io.hpp"
#include "ecovid/learners/svr.hpp"
#include "ecovid/table.hpp"
#include "ecovid/textprep.hpp"

namespace ecovid::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

/// A prerequisite file of a later stage is absent (CLI exit code 2).
class MissingArtifactError : public InputError {
 public:
  explicit MissingArtifactError(const fs::path& path)
      : InputError("missing prerequisite artifact: " + path.string()), path_(path) {}
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

enum class FeatureSet { Raw, Comments, Both };
enum class Task { Regression, Classification, Both };

FeatureSet parse_feature_set(std::string_view name);
std::string_view feature_set_name(FeatureSet set);
Task parse_task(std::string_view name);
std::string_view task_name(Task task);
/// The concrete sets selected by `set` (Raw, Comments or both, in that order).
std::vector<FeatureSet> expand(FeatureSet set);

struct ModelSettings {
  double ridge_alpha = 1.0;
  learn::SvrParams svr;
  learn::ForestParams forest;
  learn::MlpParams mlp;
  std::vector<std::string> regressors = {"svr", "forest", "mlp"};
  std::string importance_model = "mlp";
  std::size_t importance_repeats = 10;
};

struct RunConfig {
  fs::path base_dir;  // directory of the config file; recorded paths are relative to it
  fs::path corpus;
  std::optional<fs::path> valence_lexicon;
  std::optional<fs::path> emotion_lexicon;
  std::optional<fs::path> stopwords;
  std::optional<fs::path> likert_answers;
  double train_fraction = 0.7;
  std::uint64_t seed = 42;
  FeatureSet feature_set = FeatureSet::Both;
  Task task = Task::Both;
  corpus::LabelRule label_rule = corpus::LabelRule::And;
  affect::CommentAggregation comment_aggregation = affect::CommentAggregation::Concatenate;
  chroma::SummaryOptions color;
  double frames_per_second = 1.0;
  std::size_t word_top_k = 50;
  std::vector<std::string> regression_targets = {"likes_pd", "views_pd", "comments_pd", "shares_pd"};
  ModelSettings models;
  fs::path output_dir = "out";
  bool parallel = true;
};

/// Parses the JSON config; relative paths resolve against `base_dir`.
RunConfig config_from_json(const json& doc, const fs::path& base_dir);
RunConfig load_config(const fs::path& path);
/// Checks referenced input paths and parameter ranges; throws InputError.
void validate(const RunConfig& config);

/// Canonical JSON of every setting that influences results (the output
/// directory is excluded so reruns elsewhere stay byte-identical).
json config_to_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);
/// Hash of the settings feature extraction depends on; stale feature CSVs
/// are rebuilt when it changes.
std::string features_hash(const RunConfig& config);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> split;
  std::optional<FeatureSet> feature_set;
  std::optional<Task> task;
  std::optional<fs::path> output_dir;
};

/// Precedence: command-line flag > ECOVID_SEED (seed only) > config file.
void apply_overrides(RunConfig& config, const Overrides& overrides, const char* env_seed);

// Feature table schemas.
extern const std::vector<std::string> kRawColumns;      // raw_features.csv
extern const std::vector<std::string> kCommentColumns;  // comment_features.csv
extern const std::vector<std::string> kRawInputs;       // content features used as model inputs
extern const std::vector<std::string> kCommentInputs;
extern const std::vector<std::string> kPopularityMetrics;  // likes_pd, views_pd, comments_pd, shares_pd

const std::vector<std::string>& model_inputs(FeatureSet set);

affect::Lexicons load_lexicons(const RunConfig& config);

struct EmotionRow {
  std::string id;
  int post_ordinal = 0;
  int comment_ordinal = 0;
};

struct FeatureExtraction {
  FeatureTable raw;
  FeatureTable comments;
  std::vector<std::pair<std::string, std::string>> failures;  // (video id, message)
  std::vector<std::pair<std::string, chroma::Palette>> palettes;
  std::vector<std::string> k_reduced;  // videos whose palette k was capped by pixel count
  text::WordTable post_words;
  text::WordTable comment_words;
  std::vector<EmotionRow> emotions;
  corpus::LabelThresholds thresholds;
  std::size_t videos = 0;
  std::size_t popular = 0;
};

/// Per-video extraction runs in parallel; rows come out sorted by video id.
/// A video that fails is listed in `failures` and skipped.
FeatureExtraction extract_features(const RunConfig& config, const std::vector<corpus::VideoRecord>& records,
                                   const affect::Lexicons& lexicons);

struct ClassificationResult {
  FeatureSet feature_set = FeatureSet::Raw;
  eval::ConfusionMatrix confusion;
  eval::ClassMetrics metrics;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  learn::TrainedModel model;
};

/// Standard scaler + ridge classifier on the set's input columns.
ClassificationResult classify(const FeatureTable& table, FeatureSet set, const corpus::SplitIndices& split,
                              double alpha, std::uint64_t seed);

struct RegressionResult {
  FeatureSet feature_set = FeatureSet::Raw;
  std::string target;
  std::string model_name;
  double mse = 0;
  double rmse = 0;
  double mae = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  learn::TrainedModel model;
};

/// Fits one regressor ("svr", "forest" or "mlp") on the split's training rows.
RegressionResult regress(const FeatureTable& table, FeatureSet set, const std::string& target,
                         const std::string& model_name, const corpus::SplitIndices& split,
                         const ModelSettings& settings, std::uint64_t seed);

corpus::SplitIndices make_split(const RunConfig& config, std::size_t n);

/// Seed for a named sub-task, derived from the master seed.
std::uint64_t stream_seed(std::uint64_t master, std::string_view label);

// Commands. Each writes its artifacts under config.output_dir and returns a
// short JSON status.
json cmd_features(const RunConfig& config);
json cmd_train_eval(const RunConfig& config);
json cmd_correlate(const RunConfig& config);
json cmd_report(const RunConfig& config);

/// Artifact file names inside the output directory.
namespace artifact {
inline constexpr const char* kRawFeatures = "raw_features.csv";
inline constexpr const char* kCommentFeatures = "comment_features.csv";
inline constexpr const char* kFailures = "failures.csv";
inline constexpr const char* kPalettes = "palettes.csv";
inline constexpr const char* kPalettesSvg = "palettes.svg";
inline constexpr const char* kPostWords = "words_posts.csv";
inline constexpr const char* kCommentWords = "words_comments.csv";
inline constexpr const char* kEmotions = "emotions.csv";
inline constexpr const char* kStats = "dataset_stats.csv";
inline constexpr const char* kFeaturesMeta = "features_meta.json";
inline constexpr const char* kEval = "eval.json";
inline constexpr const char* kCorrRaw = "corr_raw.csv";
inline constexpr const char* kCorrComments = "corr_comments.csv";
inline constexpr const char* kCorrelations = "correlations.json";
inline constexpr const char* kModelsDir = "models";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kSummary = "summary.txt";
}  // namespace artifact

}  // namespace ecovid::pipeline
