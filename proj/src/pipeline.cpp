#include "ecovid/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "ecovid/io.hpp"
#include "ecovid/learners/importance.hpp"
#include "ecovid/learners/ridge.hpp"
#include "ecovid/learners/scaler.hpp"
#include "ecovid/rng.hpp"

namespace ecovid::pipeline {

const std::vector<std::string> kRawInputs = {"duration",       "post_length",   "post_happy",     "post_angry",
                                             "post_surprise",  "post_sad",      "post_fear",      "post_sentiment",
                                             "mean_intensity", "mean_hue",      "mean_saturation", "emoji_count"};
const std::vector<std::string> kCommentInputs = {"comment_happy", "comment_angry", "comment_surprise",
                                                 "comment_sad",   "comment_fear",  "comment_sentiment"};
const std::vector<std::string> kPopularityMetrics = {"likes_pd", "views_pd", "comments_pd", "shares_pd"};

namespace {

std::vector<std::string> with_metrics(std::vector<std::string> inputs) {
  inputs.insert(inputs.end(), kPopularityMetrics.begin(), kPopularityMetrics.end());
  inputs.push_back("target");
  return inputs;
}

}  // namespace

const std::vector<std::string> kRawColumns = with_metrics(kRawInputs);
const std::vector<std::string> kCommentColumns = with_metrics(kCommentInputs);

FeatureSet parse_feature_set(std::string_view name) {
  if (name == "raw") return FeatureSet::Raw;
  if (name == "comments") return FeatureSet::Comments;
  if (name == "both") return FeatureSet::Both;
  throw ParameterError("feature set must be raw, comments or both (got '" + std::string(name) + "')");
}

std::string_view feature_set_name(FeatureSet set) {
  switch (set) {
    case FeatureSet::Raw: return "raw";
    case FeatureSet::Comments: return "comments";
    case FeatureSet::Both: return "both";
  }
  return "both";
}

Task parse_task(std::string_view name) {
  if (name == "regression") return Task::Regression;
  if (name == "classification") return Task::Classification;
  if (name == "both") return Task::Both;
  throw ParameterError("task must be regression, classification or both (got '" + std::string(name) + "')");
}

std::string_view task_name(Task task) {
  switch (task) {
    case Task::Regression: return "regression";
    case Task::Classification: return "classification";
    case Task::Both: return "both";
  }
  return "both";
}

std::vector<FeatureSet> expand(FeatureSet set) {
  if (set == FeatureSet::Both) return {FeatureSet::Raw, FeatureSet::Comments};
  return {set};
}

const std::vector<std::string>& model_inputs(FeatureSet set) {
  if (set == FeatureSet::Comments) return kCommentInputs;
  if (set == FeatureSet::Raw) return kRawInputs;
  throw ParameterError("model_inputs needs a single feature set");
}

std::uint64_t stream_seed(std::uint64_t master, std::string_view label) {
  return derive_seed(master, io::fnv1a64(label));
}

// ---------------------------------------------------------------- config

namespace {

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw SchemaError(0, "unknown config key '" + where + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->template get<T>();
}

std::string rule_name(corpus::LabelRule rule) { return rule == corpus::LabelRule::And ? "and" : "or"; }

corpus::LabelRule parse_rule(const std::string& s) {
  if (s == "and") return corpus::LabelRule::And;
  if (s == "or") return corpus::LabelRule::Or;
  throw ParameterError("labeling.rule must be 'and' or 'or'");
}

std::string aggregation_name(affect::CommentAggregation a) {
  return a == affect::CommentAggregation::Concatenate ? "concatenate" : "average";
}

affect::CommentAggregation parse_aggregation(const std::string& s) {
  if (s == "concatenate") return affect::CommentAggregation::Concatenate;
  if (s == "average") return affect::CommentAggregation::Average;
  throw ParameterError("comment_aggregation must be 'concatenate' or 'average'");
}

std::string color_model_name(chroma::ColorModel m) {
  switch (m) {
    case chroma::ColorModel::Rgb: return "rgb";
    case chroma::ColorModel::Hsv: return "hsv";
    case chroma::ColorModel::Lab: return "lab";
  }
  return "rgb";
}

chroma::HueMean parse_hue_mean(const std::string& s) {
  if (s == "arithmetic") return chroma::HueMean::Arithmetic;
  if (s == "circular") return chroma::HueMean::Circular;
  throw ParameterError("palette.hue_mean must be 'arithmetic' or 'circular'");
}

std::string kernel_name(learn::KernelType t) { return t == learn::KernelType::Linear ? "linear" : "rbf"; }

learn::KernelType parse_kernel(const std::string& s) {
  if (s == "linear") return learn::KernelType::Linear;
  if (s == "rbf") return learn::KernelType::Rbf;
  throw ParameterError("svr.kernel must be 'linear' or 'rbf'");
}

std::string activation_name(learn::Activation a) { return a == learn::Activation::Relu ? "relu" : "tanh"; }

learn::Activation parse_activation(const std::string& s) {
  if (s == "relu") return learn::Activation::Relu;
  if (s == "tanh") return learn::Activation::Tanh;
  throw ParameterError("mlp.activation must be 'relu' or 'tanh'");
}

const std::set<std::string> kRegressorNames = {"svr", "forest", "mlp"};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  if (base.empty()) return p.generic_string();
  const auto rel = p.lexically_relative(base);
  return rel.empty() ? p.generic_string() : rel.generic_string();
}

void parse_models(const json& m, ModelSettings& out) {
  reject_unknown(m, {"ridge", "svr", "forest", "mlp", "regressors", "importance"}, "models.");
  if (auto it = m.find("ridge"); it != m.end()) {
    reject_unknown(*it, {"alpha"}, "models.ridge.");
    read(*it, "alpha", out.ridge_alpha);
  }
  if (auto it = m.find("svr"); it != m.end()) {
    reject_unknown(*it, {"C", "epsilon", "kernel", "gamma", "max_sweeps", "tol"}, "models.svr.");
    read(*it, "C", out.svr.C);
    read(*it, "epsilon", out.svr.epsilon);
    read(*it, "gamma", out.svr.kernel.gamma);
    read(*it, "max_sweeps", out.svr.max_sweeps);
    read(*it, "tol", out.svr.tol);
    if (it->contains("kernel")) out.svr.kernel.type = parse_kernel(it->at("kernel").get<std::string>());
  }
  if (auto it = m.find("forest"); it != m.end()) {
    reject_unknown(*it, {"n_trees", "mtry", "max_depth", "min_leaf"}, "models.forest.");
    read(*it, "n_trees", out.forest.n_trees);
    read(*it, "mtry", out.forest.mtry);
    read(*it, "max_depth", out.forest.max_depth);
    read(*it, "min_leaf", out.forest.min_leaf);
  }
  if (auto it = m.find("mlp"); it != m.end()) {
    reject_unknown(*it, {"hidden", "activation", "eta", "max_iter", "tol"}, "models.mlp.");
    read(*it, "hidden", out.mlp.hidden);
    read(*it, "eta", out.mlp.eta);
    read(*it, "max_iter", out.mlp.max_iter);
    read(*it, "tol", out.mlp.tol);
    if (it->contains("activation")) out.mlp.activation = parse_activation(it->at("activation").get<std::string>());
  }
  read(m, "regressors", out.regressors);
  if (auto it = m.find("importance"); it != m.end()) {
    reject_unknown(*it, {"model", "repeats"}, "models.importance.");
    read(*it, "model", out.importance_model);
    read(*it, "repeats", out.importance_repeats);
  }
}

}  // namespace

RunConfig config_from_json(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw SchemaError(0, "config must be a JSON object");
  RunConfig c;
  c.base_dir = base_dir;
  try {
    reject_unknown(doc,
                   {"corpus", "lexicons", "likert_answers", "split", "seed", "feature_set", "task", "labeling",
                    "comment_aggregation", "palette", "frames_per_second", "word_table_top_k", "regression_targets",
                    "models", "output_dir", "parallel"},
                   "");
    if (!doc.contains("corpus")) throw SchemaError(0, "config is missing 'corpus'");
    c.corpus = resolve(base_dir, doc.at("corpus").get<std::string>());
    if (auto it = doc.find("lexicons"); it != doc.end()) {
      reject_unknown(*it, {"valence", "emotion", "stopwords"}, "lexicons.");
      if (it->contains("valence")) c.valence_lexicon = resolve(base_dir, it->at("valence").get<std::string>());
      if (it->contains("emotion")) c.emotion_lexicon = resolve(base_dir, it->at("emotion").get<std::string>());
      if (it->contains("stopwords")) c.stopwords = resolve(base_dir, it->at("stopwords").get<std::string>());
    }
    if (doc.contains("likert_answers"))
      c.likert_answers = resolve(base_dir, doc.at("likert_answers").get<std::string>());
    if (auto it = doc.find("split"); it != doc.end()) {
      reject_unknown(*it, {"train_fraction"}, "split.");
      read(*it, "train_fraction", c.train_fraction);
    }
    read(doc, "seed", c.seed);
    if (doc.contains("feature_set")) c.feature_set = parse_feature_set(doc.at("feature_set").get<std::string>());
    if (doc.contains("task")) c.task = parse_task(doc.at("task").get<std::string>());
    if (auto it = doc.find("labeling"); it != doc.end()) {
      reject_unknown(*it, {"rule"}, "labeling.");
      if (it->contains("rule")) c.label_rule = parse_rule(it->at("rule").get<std::string>());
    }
    if (doc.contains("comment_aggregation"))
      c.comment_aggregation = parse_aggregation(doc.at("comment_aggregation").get<std::string>());
    if (auto it = doc.find("palette"); it != doc.end()) {
      reject_unknown(*it, {"k", "stride", "max_iter", "tol", "color_model", "hue_mean"}, "palette.");
      read(*it, "k", c.color.kmeans.k);
      read(*it, "stride", c.color.stride);
      read(*it, "max_iter", c.color.kmeans.max_iter);
      read(*it, "tol", c.color.kmeans.tol);
      if (it->contains("color_model")) c.color.model = chroma::parse_color_model(it->at("color_model").get<std::string>());
      if (it->contains("hue_mean")) c.color.hue_mean = parse_hue_mean(it->at("hue_mean").get<std::string>());
    }
    read(doc, "frames_per_second", c.frames_per_second);
    read(doc, "word_table_top_k", c.word_top_k);
    read(doc, "regression_targets", c.regression_targets);
    if (auto it = doc.find("models"); it != doc.end()) parse_models(*it, c.models);
    if (doc.contains("output_dir")) c.output_dir = resolve(base_dir, doc.at("output_dir").get<std::string>());
    else c.output_dir = resolve(base_dir, "out");
    read(doc, "parallel", c.parallel);
  } catch (const json::exception& e) {
    throw SchemaError(0, std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  const auto text = io::read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(doc, fs::absolute(path).parent_path().lexically_normal());
}

void validate(const RunConfig& c) {
  auto must_exist = [](const fs::path& p, const char* what) {
    if (!fs::exists(p)) throw IoError(std::string(what) + " not found: " + p.string());
  };
  must_exist(c.corpus, "corpus");
  if (c.valence_lexicon) must_exist(*c.valence_lexicon, "valence lexicon");
  if (c.emotion_lexicon) must_exist(*c.emotion_lexicon, "emotion lexicon");
  if (c.stopwords) must_exist(*c.stopwords, "stopword list");
  if (c.likert_answers) must_exist(*c.likert_answers, "Likert answers");
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0))
    throw ParameterError("split.train_fraction must lie strictly between 0 and 1");
  if (c.color.kmeans.k == 0) throw ParameterError("palette.k must be at least 1");
  if (c.color.stride == 0) throw ParameterError("palette.stride must be at least 1");
  if (!(c.frames_per_second > 0)) throw ParameterError("frames_per_second must be positive");
  if (c.word_top_k == 0) throw ParameterError("word_table_top_k must be at least 1");
  if (!(c.models.ridge_alpha >= 0)) throw ParameterError("models.ridge.alpha must be non-negative");
  if (!(c.models.svr.C > 0) || !(c.models.svr.epsilon >= 0)) throw ParameterError("models.svr needs C > 0 and epsilon >= 0");
  if (c.models.forest.n_trees == 0) throw ParameterError("models.forest.n_trees must be at least 1");
  if (c.models.forest.mtry > kRawInputs.size()) throw ParameterError("models.forest.mtry exceeds the feature count");
  if (!(c.models.mlp.eta > 0)) throw ParameterError("models.mlp.eta must be positive");
  if (c.models.importance_repeats == 0) throw ParameterError("models.importance.repeats must be at least 1");
  for (const auto& r : c.models.regressors)
    if (!kRegressorNames.count(r)) throw ParameterError("unknown regressor '" + r + "'");
  if (!kRegressorNames.count(c.models.importance_model))
    throw ParameterError("unknown importance model '" + c.models.importance_model + "'");
  for (const auto& t : c.regression_targets)
    if (std::find(kPopularityMetrics.begin(), kPopularityMetrics.end(), t) == kPopularityMetrics.end())
      throw ParameterError("unknown regression target '" + t + "'");
}

json config_to_json(const RunConfig& c) {
  json lex = json::object();
  if (c.valence_lexicon) lex["valence"] = relative_to(*c.valence_lexicon, c.base_dir);
  if (c.emotion_lexicon) lex["emotion"] = relative_to(*c.emotion_lexicon, c.base_dir);
  if (c.stopwords) lex["stopwords"] = relative_to(*c.stopwords, c.base_dir);
  const auto& m = c.models;
  json doc = {
      {"corpus", relative_to(c.corpus, c.base_dir)},
      {"lexicons", lex},
      {"split", {{"train_fraction", c.train_fraction}}},
      {"seed", c.seed},
      {"feature_set", feature_set_name(c.feature_set)},
      {"task", task_name(c.task)},
      {"labeling", {{"rule", rule_name(c.label_rule)}}},
      {"comment_aggregation", aggregation_name(c.comment_aggregation)},
      {"palette",
       {{"k", c.color.kmeans.k},
        {"stride", c.color.stride},
        {"max_iter", c.color.kmeans.max_iter},
        {"tol", c.color.kmeans.tol},
        {"color_model", color_model_name(c.color.model)},
        {"hue_mean", c.color.hue_mean == chroma::HueMean::Arithmetic ? "arithmetic" : "circular"}}},
      {"frames_per_second", c.frames_per_second},
      {"word_table_top_k", c.word_top_k},
      {"regression_targets", c.regression_targets},
      {"models",
       {{"ridge", {{"alpha", m.ridge_alpha}}},
        {"svr",
         {{"C", m.svr.C},
          {"epsilon", m.svr.epsilon},
          {"kernel", kernel_name(m.svr.kernel.type)},
          {"gamma", m.svr.kernel.gamma},
          {"max_sweeps", m.svr.max_sweeps},
          {"tol", m.svr.tol}}},
        {"forest",
         {{"n_trees", m.forest.n_trees},
          {"mtry", m.forest.mtry},
          {"max_depth", m.forest.max_depth},
          {"min_leaf", m.forest.min_leaf}}},
        {"mlp",
         {{"hidden", m.mlp.hidden},
          {"activation", activation_name(m.mlp.activation)},
          {"eta", m.mlp.eta},
          {"max_iter", m.mlp.max_iter},
          {"tol", m.mlp.tol}}},
        {"regressors", m.regressors},
        {"importance", {{"model", m.importance_model}, {"repeats", m.importance_repeats}}}}},
  };
  if (c.likert_answers) doc["likert_answers"] = relative_to(*c.likert_answers, c.base_dir);
  return doc;
}

std::string config_hash(const RunConfig& c) { return io::hex64(io::fnv1a64(config_to_json(c).dump())); }

std::string features_hash(const RunConfig& c) {
  const auto full = config_to_json(c);
  json subset = json::object();
  for (const char* key : {"corpus", "lexicons", "seed", "labeling", "comment_aggregation", "palette",
                          "frames_per_second", "word_table_top_k"})
    subset[key] = full[key];
  return io::hex64(io::fnv1a64(subset.dump()));
}

void apply_overrides(RunConfig& c, const Overrides& o, const char* env_seed) {
  if (env_seed && *env_seed) {
    unsigned long long v = 0;
    if (!io::parse_uint(env_seed, v)) throw ParameterError("ECOVID_SEED must be a non-negative integer");
    c.seed = v;
  }
  if (o.seed) c.seed = *o.seed;
  if (o.split) c.train_fraction = *o.split;
  if (o.feature_set) c.feature_set = *o.feature_set;
  if (o.task) c.task = *o.task;
  if (o.output_dir) c.output_dir = *o.output_dir;
}

affect::Lexicons load_lexicons(const RunConfig& c) {
  affect::Lexicons lex = affect::default_lexicons();
  if (c.valence_lexicon) lex.valence = affect::load_valence_lexicon(*c.valence_lexicon);
  if (c.emotion_lexicon) lex.emotion = affect::load_emotion_lexicon(*c.emotion_lexicon);
  if (c.stopwords) lex.stopwords = text::load_stopwords(*c.stopwords);
  return lex;
}

// ---------------------------------------------------------------- features

namespace {

struct VideoOutcome {
  std::vector<double> raw;
  std::vector<double> comments;
  chroma::ColorSummary color;
  text::TokenList post_tokens;
  std::vector<text::TokenList> comment_tokens;
  int post_ordinal = 0;
  int comment_ordinal = 0;
  std::string error;
};

void push_profile(std::vector<double>& row, const affect::EmotionProfile& p) {
  row.insert(row.end(), {p.happy, p.angry, p.surprise, p.sad, p.fear});
}

void push_tail(std::vector<double>& row, const corpus::EngagementPerDay& pd, int label) {
  row.insert(row.end(), {pd.likes_pd, pd.views_pd, pd.comments_pd, pd.shares_pd, static_cast<double>(label)});
}

VideoOutcome process_video(const corpus::VideoRecord& r, const corpus::EngagementPerDay& pd, int label,
                           const RunConfig& c, const affect::Lexicons& lex) {
  VideoOutcome out;
  auto opts = c.color;
  opts.kmeans.seed = stream_seed(c.seed, "palette/" + r.id);
  opts.parallel = false;  // the video loop is already parallel
  out.color = chroma::video_color_summary(r.frames_dir, opts);

  const auto post = affect::analyze_text(r.post_text, lex);
  const auto comment = affect::comment_affect(r, lex, c.comment_aggregation);
  const double duration =
      r.duration_s ? *r.duration_s : static_cast<double>(out.color.frame_count) / c.frames_per_second;

  out.raw = {duration, static_cast<double>(text::length_code_points(r.post_text))};
  push_profile(out.raw, post.profile);
  out.raw.insert(out.raw.end(), {post.sentiment.compound, out.color.mean_intensity, out.color.mean_hue,
                                 out.color.mean_saturation, static_cast<double>(text::count_emoji(r.post_text))});
  push_tail(out.raw, pd, label);

  push_profile(out.comments, comment.profile);
  out.comments.push_back(comment.sentiment.compound);
  push_tail(out.comments, pd, label);

  out.post_tokens = text::remove_stopwords(text::tokenize(text::clean(r.post_text)), lex.stopwords);
  for (const auto& t : r.comment_texts)
    out.comment_tokens.push_back(text::remove_stopwords(text::tokenize(text::clean(t)), lex.stopwords));
  out.post_ordinal = affect::dominant_ordinal(post.profile);
  out.comment_ordinal = affect::dominant_ordinal(comment.profile);
  return out;
}

json metric_json(const eval::Metric& m) {
  return {{"value", m.defined ? json(m.value) : json(nullptr)}, {"defined", m.defined}};
}

json word_json(const text::WordTable& table) {
  json out = json::array();
  for (const auto& w : table) out.push_back({{"word", w.word}, {"count", w.count}, {"weight", w.weight}});
  return out;
}

json emotion_distribution(const std::vector<EmotionRow>& rows, bool post) {
  json out = json::object();
  for (int o = -3; o <= 2; ++o) out[std::string(affect::ordinal_name(o))] = 0;
  for (const auto& r : rows) {
    auto& slot = out[std::string(affect::ordinal_name(post ? r.post_ordinal : r.comment_ordinal))];
    slot = slot.get<std::size_t>() + 1;
  }
  return out;
}

std::string stats_csv(const FeatureTable& raw, const FeatureTable& comments) {
  std::string out = io::csv_line({"table", "feature", "mean", "std"});
  auto emit = [&](const char* name, const FeatureTable& t) {
    if (t.num_rows() == 0) return;
    for (const auto& s : corpus::dataset_stats(t))
      out += io::csv_line({name, s.name, io::format_double(s.mean), io::format_double(s.std)});
  };
  emit("raw", raw);
  emit("comments", comments);
  return out;
}

std::string emotions_csv(const std::vector<EmotionRow>& rows) {
  std::string out = io::csv_line({"id", "post_emotion", "post_ordinal", "comment_emotion", "comment_ordinal"});
  for (const auto& r : rows)
    out += io::csv_line({r.id, std::string(affect::ordinal_name(r.post_ordinal)), std::to_string(r.post_ordinal),
                         std::string(affect::ordinal_name(r.comment_ordinal)), std::to_string(r.comment_ordinal)});
  return out;
}

void write_json(const fs::path& path, const json& doc) { io::write_file(path, doc.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  if (!fs::exists(path)) throw MissingArtifactError(path);
  try {
    return json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

FeatureTable read_table(const fs::path& path) {
  if (!fs::exists(path)) throw MissingArtifactError(path);
  return load_feature_table(path);
}

}  // namespace

FeatureExtraction extract_features(const RunConfig& c, const std::vector<corpus::VideoRecord>& records,
                                   const affect::Lexicons& lex) {
  FeatureExtraction fx;
  fx.raw.names = kRawColumns;
  fx.comments.names = kCommentColumns;
  fx.videos = records.size();

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return records[a].id < records[b].id; });

  std::vector<corpus::EngagementPerDay> pd;
  pd.reserve(records.size());
  for (auto i : order) pd.push_back(corpus::per_day(records[i]));
  const auto labels = corpus::label_popularity(pd, c.label_rule);
  fx.thresholds = corpus::popularity_thresholds(pd);
  fx.popular = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));

  std::vector<VideoOutcome> outcomes(order.size());
  const auto n = static_cast<std::ptrdiff_t>(order.size());
#pragma omp parallel for schedule(dynamic) if (c.parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      outcomes[k] = process_video(records[order[k]], pd[k], labels[k], c, lex);
    } catch (const std::exception& e) {
      outcomes[k].error = e.what();
    }
  }

  std::vector<text::TokenList> post_docs;
  std::vector<text::TokenList> comment_docs;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& id = records[order[k]].id;
    auto& o = outcomes[k];
    if (!o.error.empty()) {
      fx.failures.emplace_back(id, o.error);
      continue;
    }
    fx.raw.append(id, std::move(o.raw));
    fx.comments.append(id, std::move(o.comments));
    fx.palettes.emplace_back(id, o.color.palette);
    if (o.color.k_reduced) fx.k_reduced.push_back(id);
    post_docs.push_back(std::move(o.post_tokens));
    for (auto& t : o.comment_tokens) comment_docs.push_back(std::move(t));
    fx.emotions.push_back({id, o.post_ordinal, o.comment_ordinal});
  }
  fx.post_words = text::word_table(post_docs, c.word_top_k);
  fx.comment_words = text::word_table(comment_docs, c.word_top_k);
  return fx;
}

json cmd_features(const RunConfig& c) {
  validate(c);
  const auto records = corpus::load_corpus(c.corpus);
  const auto lex = load_lexicons(c);
  const auto fx = extract_features(c, records, lex);
  const auto& dir = c.output_dir;

  io::write_file(dir / artifact::kRawFeatures, to_csv(fx.raw));
  io::write_file(dir / artifact::kCommentFeatures, to_csv(fx.comments));

  std::string failures = io::csv_line({"id", "error"});
  for (const auto& [id, msg] : fx.failures) failures += io::csv_line({id, msg});
  io::write_file(dir / artifact::kFailures, failures);

  std::string palettes(chroma::kPaletteCsvHeader);
  for (const auto& [id, p] : fx.palettes) palettes += chroma::palette_csv_rows(id, p);
  io::write_file(dir / artifact::kPalettes, palettes);
  io::write_file(dir / artifact::kPalettesSvg, chroma::palette_svg(fx.palettes));
  io::write_file(dir / artifact::kPostWords, text::to_csv(fx.post_words));
  io::write_file(dir / artifact::kCommentWords, text::to_csv(fx.comment_words));
  io::write_file(dir / artifact::kEmotions, emotions_csv(fx.emotions));
  io::write_file(dir / artifact::kStats, stats_csv(fx.raw, fx.comments));

  json failure_list = json::array();
  for (const auto& [id, msg] : fx.failures) failure_list.push_back({{"id", id}, {"error", msg}});
  json meta = {
      {"config_hash", config_hash(c)},
      {"features_hash", features_hash(c)},
      {"seed", c.seed},
      {"videos", fx.videos},
      {"processed", fx.raw.num_rows()},
      {"failures", failure_list},
      {"label_rule", rule_name(c.label_rule)},
      {"thresholds", {{"likes_pd_median", fx.thresholds.likes_median}, {"views_pd_median", fx.thresholds.views_median}}},
      {"popular", fx.popular},
      {"k_reduced", fx.k_reduced},
      {"word_tables", {{"posts", word_json(fx.post_words)}, {"comments", word_json(fx.comment_words)}}},
      {"emotion_distribution",
       {{"posts", emotion_distribution(fx.emotions, true)}, {"comments", emotion_distribution(fx.emotions, false)}}},
  };
  write_json(dir / artifact::kFeaturesMeta, meta);
  return {{"command", "features"},
          {"videos", fx.videos},
          {"processed", fx.raw.num_rows()},
          {"failures", fx.failures.size()},
          {"output_dir", dir.string()}};
}

// ---------------------------------------------------------------- training

corpus::SplitIndices make_split(const RunConfig& c, std::size_t n) {
  return corpus::split_indices(n, {c.train_fraction, stream_seed(c.seed, "split")});
}

namespace {

learn::Matrix input_matrix(const FeatureTable& table, FeatureSet set, std::span<const std::size_t> rows) {
  return learn::to_matrix(table.select(model_inputs(set)).take_rows(rows));
}

std::vector<double> column_rows(const FeatureTable& table, const std::string& name, std::span<const std::size_t> rows) {
  const auto col = table.column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (auto i : rows) out.push_back(col[i]);
  return out;
}

}  // namespace

ClassificationResult classify(const FeatureTable& table, FeatureSet set, const corpus::SplitIndices& split,
                              double alpha, std::uint64_t seed) {
  ClassificationResult res;
  res.feature_set = set;
  res.n_train = split.train.size();
  res.n_test = split.test.size();
  const auto X_train = input_matrix(table, set, split.train);
  const auto X_test = input_matrix(table, set, split.test);
  auto to_labels = [](const std::vector<double>& v) {
    std::vector<int> out;
    for (double x : v) out.push_back(x > 0.5 ? 1 : 0);
    return out;
  };
  const auto y_train = to_labels(column_rows(table, "target", split.train));
  const auto y_test = to_labels(column_rows(table, "target", split.test));

  auto& m = res.model;
  m.scaler = learn::scaler_fit(X_train);
  m.model = learn::ridge_fit(learn::scaler_transform(m.scaler, X_train), y_train, alpha);
  m.seed = seed;
  m.feature_names = model_inputs(set);
  m.hyperparameters = {{"alpha", alpha}};
  const auto predicted = learn::ridge_predict(std::get<learn::RidgeModel>(m.model), learn::scaler_transform(m.scaler, X_test));
  res.confusion = eval::confusion(y_test, predicted);
  res.metrics = eval::classify_metrics(res.confusion);
  return res;
}

RegressionResult regress(const FeatureTable& table, FeatureSet set, const std::string& target,
                         const std::string& model_name, const corpus::SplitIndices& split, const ModelSettings& s,
                         std::uint64_t seed) {
  RegressionResult res;
  res.feature_set = set;
  res.target = target;
  res.model_name = model_name;
  res.n_train = split.train.size();
  res.n_test = split.test.size();
  const auto X_train_raw = input_matrix(table, set, split.train);
  const auto X_test_raw = input_matrix(table, set, split.test);
  const auto y_train_std = column_rows(table, target, split.train);
  const auto y_test = column_rows(table, target, split.test);
  const learn::Vector y_train = learn::to_vector(y_train_std);

  auto& m = res.model;
  m.scaler = learn::scaler_fit(X_train_raw);
  m.seed = seed;
  m.feature_names = model_inputs(set);
  const learn::Matrix X = learn::scaler_transform(m.scaler, X_train_raw);

  // SVR and the MLP see a standardized target; the forest is scale-free.
  auto standardize_target = [&]() {
    m.target_mean = y_train.mean();
    const double var = (y_train.array() - m.target_mean).square().mean();
    m.target_std = var > 0 ? std::sqrt(var) : 1.0;
    return learn::Vector((y_train.array() - m.target_mean) / m.target_std);
  };

  if (model_name == "svr") {
    m.model = learn::svr_fit(X, standardize_target(), s.svr);
    m.hyperparameters = {{"C", s.svr.C},
                         {"epsilon", s.svr.epsilon},
                         {"kernel", kernel_name(s.svr.kernel.type)},
                         {"gamma", std::get<learn::SvrModel>(m.model).kernel.gamma}};
  } else if (model_name == "forest") {
    auto p = s.forest;
    p.seed = seed;
    m.model = learn::forest_fit(X, y_train, p);
    const auto& f = std::get<learn::ForestModel>(m.model);
    m.hyperparameters = {{"n_trees", f.params.n_trees},
                         {"mtry", f.params.mtry},
                         {"max_depth", f.params.max_depth},
                         {"min_leaf", f.params.min_leaf}};
  } else if (model_name == "mlp") {
    auto p = s.mlp;
    p.seed = seed;
    m.model = learn::mlp_fit(X, standardize_target(), p);
    m.hyperparameters = {{"hidden", p.hidden},
                         {"activation", activation_name(p.activation)},
                         {"eta", p.eta},
                         {"max_iter", p.max_iter}};
  } else {
    throw ParameterError("unknown regressor '" + model_name + "'");
  }

  const auto predicted = learn::to_std(learn::predict(m, X_test_raw));
  res.mse = eval::mse(y_test, predicted);
  res.rmse = eval::rmse(y_test, predicted);
  res.mae = eval::mae(y_test, predicted);
  return res;
}

json cmd_train_eval(const RunConfig& c) {
  validate(c);
  const auto& dir = c.output_dir;
  bool fresh = fs::exists(dir / artifact::kRawFeatures) && fs::exists(dir / artifact::kCommentFeatures) &&
               fs::exists(dir / artifact::kFeaturesMeta);
  if (fresh) fresh = read_json(dir / artifact::kFeaturesMeta).value("features_hash", std::string()) == features_hash(c);
  if (!fresh) cmd_features(c);
  const auto raw = read_table(dir / artifact::kRawFeatures);
  const auto comments = read_table(dir / artifact::kCommentFeatures);
  if (raw.ids != comments.ids) throw SchemaError(0, "feature tables list different videos; rerun 'features'");
  for (const auto& name : kRawColumns) raw.column_index(name);
  for (const auto& name : kCommentColumns) comments.column_index(name);

  const auto n = raw.num_rows();
  if (n < 2) throw TooSmallError("need at least 4 training rows, corpus has " + std::to_string(n) + " usable videos");
  const auto split = make_split(c, n);
  if (split.train.size() < 4)
    throw TooSmallError("need at least 4 training rows, split gives " + std::to_string(split.train.size()));

  const auto hash = config_hash(c);
  json classification = json::array();
  json regression = json::array();
  json importance = json::array();
  const auto models_dir = dir / artifact::kModelsDir;

  for (auto set : expand(c.feature_set)) {
    const auto& table = set == FeatureSet::Raw ? raw : comments;
    const std::string set_name(feature_set_name(set));

    if (c.task != Task::Regression) {
      const auto seed = stream_seed(c.seed, "classify/" + set_name);
      const auto r = classify(table, set, split, c.models.ridge_alpha, seed);
      classification.push_back({{"feature_set", set_name},
                                {"model", "ridge"},
                                {"seed", seed},
                                {"alpha", c.models.ridge_alpha},
                                {"n_train", r.n_train},
                                {"n_test", r.n_test},
                                {"confusion", {{"tp", r.confusion.tp}, {"tn", r.confusion.tn}, {"fp", r.confusion.fp}, {"fn", r.confusion.fn}}},
                                {"metrics",
                                 {{"accuracy", metric_json(r.metrics.accuracy)},
                                  {"precision", metric_json(r.metrics.precision)},
                                  {"recall", metric_json(r.metrics.recall)},
                                  {"f1", metric_json(r.metrics.f1)}}}});
      write_json(models_dir / (set_name + "_classifier_ridge.json"), learn::to_json(r.model));
    }

    if (c.task != Task::Classification) {
      for (const auto& target : c.regression_targets) {
        std::optional<RegressionResult> for_importance;
        for (const auto& name : c.models.regressors) {
          const auto seed = stream_seed(c.seed, "regress/" + set_name + "/" + target + "/" + name);
          auto r = regress(table, set, target, name, split, c.models, seed);
          regression.push_back({{"feature_set", set_name},
                                {"target", target},
                                {"model", name},
                                {"seed", seed},
                                {"n_train", r.n_train},
                                {"n_test", r.n_test},
                                {"mse", r.mse},
                                {"rmse", r.rmse},
                                {"mae", r.mae}});
          write_json(models_dir / (set_name + "_" + target + "_" + name + ".json"), learn::to_json(r.model));
          if (name == c.models.importance_model) for_importance = std::move(r);
        }
        if (!for_importance) {
          const auto seed = stream_seed(c.seed, "regress/" + set_name + "/" + target + "/" + c.models.importance_model);
          for_importance = regress(table, set, target, c.models.importance_model, split, c.models, seed);
        }
        const auto imp_seed = stream_seed(c.seed, "importance/" + set_name + "/" + target);
        const auto& model = for_importance->model;
        const auto X_test = input_matrix(table, set, split.test);
        const auto y_test = learn::to_vector(column_rows(table, target, split.test));
        const auto ranking = learn::permutation_importance(
            [&](const learn::Matrix& X) { return learn::predict(model, X); }, X_test, y_test,
            [](const learn::Vector& y, const learn::Vector& yhat) {
              return eval::mse(learn::to_std(y), learn::to_std(yhat));
            },
            learn::MetricDirection::LowerIsBetter, imp_seed, c.models.importance_repeats, model_inputs(set));
        json rows = json::array();
        for (std::size_t i = 0; i < ranking.size(); ++i)
          rows.push_back({{"rank", i + 1},
                          {"feature", ranking[i].name},
                          {"importance", ranking[i].importance},
                          {"spread", ranking[i].spread}});
        importance.push_back({{"feature_set", set_name},
                              {"target", target},
                              {"model", c.models.importance_model},
                              {"seed", imp_seed},
                              {"model_seed", model.seed},
                              {"metric", "mse"},
                              {"repeats", c.models.importance_repeats},
                              {"ranking", rows}});
      }
    }
  }

  json train_ids = json::array();
  json test_ids = json::array();
  for (auto i : split.train) train_ids.push_back(raw.ids[i]);
  for (auto i : split.test) test_ids.push_back(raw.ids[i]);
  json doc = {{"config_hash", hash},
              {"seed", c.seed},
              {"split",
               {{"train_fraction", c.train_fraction},
                {"seed", stream_seed(c.seed, "split")},
                {"train_ids", train_ids},
                {"test_ids", test_ids}}},
              {"classification", classification},
              {"regression", regression},
              {"importance", importance}};
  write_json(dir / artifact::kEval, doc);
  return {{"command", "train"},
          {"classification_results", classification.size()},
          {"regression_results", regression.size()},
          {"n_train", split.train.size()},
          {"n_test", split.test.size()}};
}

// ---------------------------------------------------------------- correlation

json cmd_correlate(const RunConfig& c) {
  const auto& dir = c.output_dir;
  json blocks = json::array();
  for (auto set : expand(c.feature_set)) {
    const bool is_raw = set == FeatureSet::Raw;
    const auto table = read_table(dir / (is_raw ? artifact::kRawFeatures : artifact::kCommentFeatures));
    const auto& rows = model_inputs(set);
    std::vector<std::vector<double>> row_cols;
    std::vector<std::vector<double>> metric_cols;
    for (const auto& name : rows) row_cols.push_back(table.column(name));
    for (const auto& name : kPopularityMetrics) metric_cols.push_back(table.column(name));
    const auto block = eval::pearson_cross(rows, row_cols, kPopularityMetrics, metric_cols);
    const char* csv_name = is_raw ? artifact::kCorrRaw : artifact::kCorrComments;
    io::write_file(dir / csv_name, eval::to_csv(block));
    io::write_file(fs::path(dir / csv_name).replace_extension(".svg"),
                   eval::heatmap_svg(block, is_raw ? "Raw features vs popularity metrics"
                                                   : "Comment emotions vs popularity metrics"));
    json r = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      json line = json::array();
      for (std::size_t j = 0; j < kPopularityMetrics.size(); ++j) {
        if (block.row_constant[i] || block.col_constant[j]) line.push_back(nullptr);
        else line.push_back(block.r[i][j]);
      }
      r.push_back(line);
    }
    json flagged = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (block.row_constant[i]) flagged.push_back(rows[i]);
    for (std::size_t j = 0; j < kPopularityMetrics.size(); ++j)
      if (block.col_constant[j]) flagged.push_back(kPopularityMetrics[j]);
    blocks.push_back({{"feature_set", feature_set_name(set)},
                      {"rows", rows},
                      {"cols", kPopularityMetrics},
                      {"r", r},
                      {"constant_columns", flagged},
                      {"n", table.num_rows()}});
  }
  write_json(dir / artifact::kCorrelations,
             {{"features_hash", features_hash(c)}, {"seed", c.seed}, {"correlations", blocks}});
  return {{"command", "correlate"}, {"matrices", blocks.size()}};
}

// ---------------------------------------------------------------- report

namespace {

void require(const fs::path& p) {
  if (!fs::exists(p)) throw MissingArtifactError(p);
}

void check_hash(const json& doc, const char* key, const std::string& hash, const fs::path& path) {
  if (doc.value(key, std::string()) != hash)
    throw InputError(path.string() + " was produced with a different configuration; rerun the earlier commands");
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string fixed2(const json& v) { return v.is_null() ? "n/a" : io::format_fixed(v.get<double>(), 2); }

std::string summary_text(const json& report) {
  std::string out = "ecovid report\n";
  out += "config hash: " + report["config_hash"].get<std::string>() + "\n";
  out += "seed: " + std::to_string(report["seed"].get<std::uint64_t>()) + "\n";
  const auto& corpus = report["corpus"];
  out += "videos: " + std::to_string(corpus["videos"].get<std::size_t>()) + " (" +
         std::to_string(corpus["processed"].get<std::size_t>()) + " processed, " +
         std::to_string(corpus["failures"].size()) + " failed), popular: " +
         std::to_string(corpus["popular"].get<std::size_t>()) + "\n";

  if (!report["classification"].empty()) {
    out += "\nClassification (ridge, held-out)\n";
    out += pad("metric", 12);
    for (const auto& r : report["classification"]) out += pad(r["feature_set"].get<std::string>(), 12);
    out += "\n";
    for (const char* m : {"accuracy", "precision", "recall", "f1"}) {
      out += pad(m, 12);
      for (const auto& r : report["classification"]) out += pad(fixed2(r["metrics"][m]["value"]), 12);
      out += "\n";
    }
  }

  if (!report["regression"].empty()) {
    // One block per (feature set, target), one column per model.
    std::map<std::pair<std::string, std::string>, std::vector<json>> groups;
    std::vector<std::pair<std::string, std::string>> order;
    for (const auto& r : report["regression"]) {
      const auto key = std::make_pair(r["feature_set"].get<std::string>(), r["target"].get<std::string>());
      if (!groups.count(key)) order.push_back(key);
      groups[key].push_back(r);
    }
    for (const auto& key : order) {
      out += "\nRegression: " + key.second + " from " + key.first + " features\n";
      out += pad("metric", 8);
      for (const auto& r : groups[key]) out += pad(r["model"].get<std::string>(), 16);
      out += "\n";
      for (const char* m : {"mse", "rmse", "mae"}) {
        out += pad(m, 8);
        for (const auto& r : groups[key]) out += pad(fixed2(r[m]), 16);
        out += "\n";
      }
    }
  }

  if (!report["importance"].empty()) {
    out += "\nMost important feature (permutation, mse)\n";
    for (const auto& imp : report["importance"]) {
      const auto& top = imp["ranking"].front();
      out += pad(imp["feature_set"].get<std::string>() + "/" + imp["target"].get<std::string>(), 24) +
             top["feature"].get<std::string>() + " (" + fixed2(top["importance"]) + ")\n";
    }
  }

  if (!report["likert"].empty()) {
    out += "\nLikert means\n";
    for (const auto& row : report["likert"])
      out += pad(row["item"].get<std::string>(), 24) + fixed2(row["mean"]) + "\n";
  }
  return out;
}

}  // namespace

json cmd_report(const RunConfig& c) {
  const auto& dir = c.output_dir;
  for (auto set : expand(c.feature_set)) {
    require(dir / (set == FeatureSet::Raw ? artifact::kRawFeatures : artifact::kCommentFeatures));
  }
  for (const char* name : {artifact::kFeaturesMeta, artifact::kEmotions, artifact::kPostWords, artifact::kCommentWords,
                           artifact::kStats, artifact::kFailures, artifact::kEval})
    require(dir / name);
  for (auto set : expand(c.feature_set)) require(dir / (set == FeatureSet::Raw ? artifact::kCorrRaw : artifact::kCorrComments));
  require(dir / artifact::kCorrelations);

  const auto hash = config_hash(c);
  const auto meta = read_json(dir / artifact::kFeaturesMeta);
  const auto evaluation = read_json(dir / artifact::kEval);
  const auto corr = read_json(dir / artifact::kCorrelations);
  const auto fhash = features_hash(c);
  check_hash(meta, "features_hash", fhash, dir / artifact::kFeaturesMeta);
  check_hash(evaluation, "config_hash", hash, dir / artifact::kEval);
  check_hash(corr, "features_hash", fhash, dir / artifact::kCorrelations);

  json stats = json::array();
  const auto stat_rows = io::parse_csv(io::read_file(dir / artifact::kStats));
  for (std::size_t r = 1; r < stat_rows.size(); ++r) {
    const auto& row = stat_rows[r];
    if (row.size() != 4) continue;
    double mean = 0, sd = 0;
    io::parse_double(row[2], mean);
    io::parse_double(row[3], sd);
    stats.push_back({{"table", row[0]}, {"feature", row[1]}, {"mean", mean}, {"std", sd}});
  }

  json likert = json::array();
  if (c.likert_answers) {
    for (const auto& row : eval::likert_table(eval::parse_likert_csv(io::read_file(*c.likert_answers))))
      likert.push_back({{"item", row.item}, {"mean", row.mean}, {"responses", row.responses}});
  }

  json report = {
      {"schema_version", 1},
      {"config_hash", hash},
      {"features_hash", fhash},
      {"seed", c.seed},
      {"config", config_to_json(c)},
      {"corpus",
       {{"videos", meta["videos"]},
        {"processed", meta["processed"]},
        {"failures", meta["failures"]},
        {"label_rule", meta["label_rule"]},
        {"thresholds", meta["thresholds"]},
        {"popular", meta["popular"]},
        {"k_reduced", meta["k_reduced"]}}},
      {"dataset_stats", stats},
      {"split", evaluation["split"]},
      {"classification", evaluation["classification"]},
      {"regression", evaluation["regression"]},
      {"importance", evaluation["importance"]},
      {"correlations", corr["correlations"]},
      {"word_tables", meta["word_tables"]},
      {"emotion_distribution", meta["emotion_distribution"]},
      {"likert", likert},
  };
  write_json(dir / artifact::kReport, report);
  io::write_file(dir / artifact::kSummary, summary_text(report));
  return {{"command", "report"}, {"report", (dir / artifact::kReport).string()}, {"config_hash", hash}};
}

}  // namespace ecovid::pipeline
