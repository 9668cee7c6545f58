#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecovid/table.hpp"

namespace ecovid::corpus {

/// One row of the video corpus. Immutable after load.
struct VideoRecord {
  std::string id;
  std::chrono::year_month_day upload_date;
  std::chrono::year_month_day collected_date;
  std::uint64_t likes = 0;
  std::uint64_t views = 0;
  std::uint64_t comments_count = 0;
  std::uint64_t shares = 0;
  std::string post_text;
  std::vector<std::string> comment_texts;
  std::filesystem::path frames_dir;
  /// Optional `duration_s` column; when absent the duration is derived from
  /// the frame count at feature-extraction time.
  std::optional<double> duration_s;
};

/// Engagement counts normalized to events per day since upload.
struct EngagementPerDay {
  double likes_pd = 0;
  double views_pd = 0;
  double comments_pd = 0;
  double shares_pd = 0;
  std::int64_t days = 1;
};

enum class CorpusFormat { Csv, Json };

/// Picks the format from the file extension (".json" -> Json, else Csv).
CorpusFormat format_for(const std::filesystem::path& path);

/// Loads the corpus. Relative `frames_dir` and `comments_file` entries are
/// resolved against the corpus file's directory.
std::vector<VideoRecord> load_corpus(const std::filesystem::path& path, CorpusFormat format);
std::vector<VideoRecord> load_corpus(const std::filesystem::path& path);

/// Parses "YYYY-MM-DD"; returns nullopt for anything else or invalid dates.
std::optional<std::chrono::year_month_day> parse_date(std::string_view text);
std::string format_date(std::chrono::year_month_day date);

/// days = max(1, collected - upload); each metric is count / days.
/// Throws DateOrderError when collected_date precedes upload_date.
EngagementPerDay per_day(const VideoRecord& record);

enum class LabelRule {
  And,  // popular iff likes_pd AND views_pd strictly exceed their medians
  Or,   // popular iff either strictly exceeds its median
};

struct LabelThresholds {
  double likes_median = 0;
  double views_median = 0;
};

/// Median; even-length input averages the two central order statistics.
/// Throws EmptyCorpusError on empty input.
double median(std::vector<double> values);

LabelThresholds popularity_thresholds(const std::vector<EngagementPerDay>& corpus_pd);

/// Labels each video 1 (popular) or 0 by comparing against corpus medians.
std::vector<int> label_popularity(const std::vector<EngagementPerDay>& corpus_pd,
                                  LabelRule rule = LabelRule::And);

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded Fisher-Yates shuffle of [0, n) followed by a cut at
/// round(n * train_fraction), clamped so both sides are non-empty.
SplitIndices split_indices(std::size_t n, const SplitSpec& spec);

template <typename T>
std::pair<std::vector<T>, std::vector<T>> split(const std::vector<T>& items, const SplitSpec& spec) {
  auto idx = split_indices(items.size(), spec);
  std::pair<std::vector<T>, std::vector<T>> out;
  for (auto i : idx.train) out.first.push_back(items[i]);
  for (auto i : idx.test) out.second.push_back(items[i]);
  return out;
}

struct ColumnStats {
  std::string name;
  double mean = 0;
  double std = 0;  // population (divide by n)
};

/// Per-feature mean and population standard deviation.
std::vector<ColumnStats> dataset_stats(const FeatureTable& features);

}  // namespace ecovid::corpus
