#include "ecovid/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "json.hpp"

#include "ecovid/error.hpp"
#include "ecovid/io.hpp"
#include "ecovid/rng.hpp"

namespace ecovid::corpus {

namespace fs = std::filesystem;
using namespace std::chrono;

namespace {

constexpr const char* kRequired[] = {"id",     "upload_date", "collected_date", "likes",
                                     "views",  "comments_count", "shares",     "post_text",
                                     "frames_dir", "comments_file"};

std::vector<std::string> read_comments(const fs::path& file, std::size_t row) {
  std::string text;
  try {
    text = io::read_file(file);
  } catch (const IoError&) {
    throw SchemaError(row, "comments_file not readable: " + file.string());
  }
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::uint64_t parse_count(const std::string& text, const char* field, std::size_t row) {
  unsigned long long v = 0;
  if (!io::parse_uint(text, v))
    throw SchemaError(row, std::string(field) + " must be a non-negative integer, got '" + text + "'");
  return v;
}

year_month_day parse_date_field(const std::string& text, const char* field, std::size_t row) {
  auto d = parse_date(text);
  if (!d) throw SchemaError(row, std::string(field) + " is not a YYYY-MM-DD date: '" + text + "'");
  return *d;
}

/// Builds a record from string fields; shared by the CSV and JSON readers.
VideoRecord make_record(const std::map<std::string, std::string>& f, const fs::path& base,
                        std::size_t row) {
  VideoRecord r;
  r.id = f.at("id");
  if (r.id.empty()) throw SchemaError(row, "empty id");
  r.upload_date = parse_date_field(f.at("upload_date"), "upload_date", row);
  r.collected_date = parse_date_field(f.at("collected_date"), "collected_date", row);
  if (sys_days(r.collected_date) < sys_days(r.upload_date))
    throw SchemaError(row, "collected_date precedes upload_date");
  r.likes = parse_count(f.at("likes"), "likes", row);
  r.views = parse_count(f.at("views"), "views", row);
  r.comments_count = parse_count(f.at("comments_count"), "comments_count", row);
  r.shares = parse_count(f.at("shares"), "shares", row);
  r.post_text = f.at("post_text");
  r.frames_dir = resolve(base, f.at("frames_dir"));
  if (const auto& cf = f.at("comments_file"); !cf.empty()) r.comment_texts = read_comments(resolve(base, cf), row);
  if (auto it = f.find("duration_s"); it != f.end() && !it->second.empty()) {
    double d = 0;
    if (!io::parse_double(it->second, d) || !(d >= 0) || !std::isfinite(d))
      throw SchemaError(row, "duration_s must be a non-negative number");
    r.duration_s = d;
  }
  return r;
}

void check_unique(const std::vector<VideoRecord>& records) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!seen.insert(records[i].id).second)
      throw SchemaError(i + 1, "duplicate id '" + records[i].id + "'");
  }
}

std::vector<VideoRecord> load_csv(const fs::path& path) {
  const auto rows = io::parse_csv(io::read_file(path));
  if (rows.empty()) throw SchemaError(0, "corpus CSV is missing its header");
  const auto& header = rows.front();
  for (const char* col : kRequired) {
    if (std::find(header.begin(), header.end(), col) == header.end())
      throw SchemaError(0, std::string("corpus CSV lacks column '") + col + "'");
  }
  std::vector<VideoRecord> out;
  const auto base = path.parent_path();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row.front().empty()) continue;  // blank line
    if (row.size() != header.size())
      throw SchemaError(r, "expected " + std::to_string(header.size()) + " fields, got " +
                               std::to_string(row.size()));
    std::map<std::string, std::string> fields;
    for (std::size_t c = 0; c < header.size(); ++c) fields[header[c]] = row[c];
    out.push_back(make_record(fields, base, r));
  }
  return out;
}

std::string json_scalar(const nlohmann::json& v, const char* field, std::size_t row) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return io::format_double(v.get<double>());
  if (v.is_null()) return "";
  throw SchemaError(row, std::string(field) + " has an unsupported JSON type");
}

std::vector<VideoRecord> load_json(const fs::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(0, std::string("corpus JSON does not parse: ") + e.what());
  }
  if (!doc.is_array()) throw SchemaError(0, "corpus JSON must be an array of objects");
  std::vector<VideoRecord> out;
  const auto base = path.parent_path();
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::size_t row = i + 1;
    const auto& obj = doc[i];
    if (!obj.is_object()) throw SchemaError(row, "entry is not an object");
    std::map<std::string, std::string> fields;
    for (const char* col : kRequired) {
      if (!obj.contains(col)) throw SchemaError(row, std::string("missing field '") + col + "'");
      fields[col] = json_scalar(obj[col], col, row);
    }
    if (obj.contains("duration_s")) fields["duration_s"] = json_scalar(obj["duration_s"], "duration_s", row);
    out.push_back(make_record(fields, base, row));
  }
  return out;
}

}  // namespace

CorpusFormat format_for(const fs::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".json" ? CorpusFormat::Json : CorpusFormat::Csv;
}

std::vector<VideoRecord> load_corpus(const fs::path& path, CorpusFormat format) {
  if (!fs::exists(path)) throw IoError("corpus file not found: " + path.string());
  auto records = format == CorpusFormat::Json ? load_json(path) : load_csv(path);
  check_unique(records);
  return records;
}

std::vector<VideoRecord> load_corpus(const fs::path& path) { return load_corpus(path, format_for(path)); }

std::optional<year_month_day> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  unsigned long long y = 0, m = 0, d = 0;
  if (!io::parse_uint(text.substr(0, 4), y) || !io::parse_uint(text.substr(5, 2), m) ||
      !io::parse_uint(text.substr(8, 2), d))
    return std::nullopt;
  year_month_day ymd{year{static_cast<int>(y)}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return ymd;
}

std::string format_date(year_month_day date) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

EngagementPerDay per_day(const VideoRecord& record) {
  const auto diff = (sys_days(record.collected_date) - sys_days(record.upload_date)).count();
  if (diff < 0)
    throw DateOrderError("video '" + record.id + "': collected_date precedes upload_date");
  EngagementPerDay out;
  out.days = std::max<std::int64_t>(1, diff);
  const double days = static_cast<double>(out.days);
  out.likes_pd = static_cast<double>(record.likes) / days;
  out.views_pd = static_cast<double>(record.views) / days;
  out.comments_pd = static_cast<double>(record.comments_count) / days;
  out.shares_pd = static_cast<double>(record.shares) / days;
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw EmptyCorpusError("median of an empty list");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

LabelThresholds popularity_thresholds(const std::vector<EngagementPerDay>& corpus_pd) {
  if (corpus_pd.empty()) throw EmptyCorpusError("cannot label an empty corpus");
  std::vector<double> likes, views;
  for (const auto& e : corpus_pd) {
    likes.push_back(e.likes_pd);
    views.push_back(e.views_pd);
  }
  return {median(std::move(likes)), median(std::move(views))};
}

std::vector<int> label_popularity(const std::vector<EngagementPerDay>& corpus_pd, LabelRule rule) {
  const auto t = popularity_thresholds(corpus_pd);
  std::vector<int> labels;
  labels.reserve(corpus_pd.size());
  for (const auto& e : corpus_pd) {
    const bool l = e.likes_pd > t.likes_median;
    const bool v = e.views_pd > t.views_median;
    labels.push_back(rule == LabelRule::And ? (l && v) : (l || v));
  }
  return labels;
}

SplitIndices split_indices(std::size_t n, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw ParameterError("train_fraction must lie strictly between 0 and 1");
  if (n < 2) throw TooSmallError("need at least 2 items to split, got " + std::to_string(n));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(spec.seed);
  rng.shuffle(std::span<std::size_t>(order));
  auto cut = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.train_fraction));
  cut = std::clamp<std::size_t>(cut, 1, n - 1);
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
  return out;
}

std::vector<ColumnStats> dataset_stats(const FeatureTable& features) {
  if (features.rows.empty()) throw EmptyCorpusError("dataset_stats on an empty table");
  const double n = static_cast<double>(features.rows.size());
  std::vector<ColumnStats> out;
  for (std::size_t c = 0; c < features.names.size(); ++c) {
    double sum = 0;
    for (const auto& r : features.rows) sum += r.at(c);
    const double mean = sum / n;
    double ss = 0;
    for (const auto& r : features.rows) ss += (r[c] - mean) * (r[c] - mean);
    out.push_back({features.names[c], mean, std::sqrt(ss / n)});
  }
  return out;
}

}  // namespace ecovid::corpus
