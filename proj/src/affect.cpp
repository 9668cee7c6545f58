#include "ecovid/affect.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "ecovid/error.hpp"
#include "ecovid/io.hpp"

namespace ecovid::embedded {
std::string_view vader_lexicon();
std::string_view emotion_lexicon();
}  // namespace ecovid::embedded

namespace ecovid::affect {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename Fn>
void for_each_line(std::string_view contents, Fn&& fn) {
  std::size_t start = 0, row = 0;
  while (start < contents.size()) {
    auto end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    auto line = contents.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line, ++row);
    start = end + 1;
  }
}

std::optional<Emotion> parse_emotion(std::string_view name) {
  for (auto e : kEmotions) {
    if (name == emotion_name(e)) return e;
  }
  return std::nullopt;
}

}  // namespace

std::string_view emotion_name(Emotion e) {
  switch (e) {
    case Emotion::Happy: return "Happy";
    case Emotion::Angry: return "Angry";
    case Emotion::Surprise: return "Surprise";
    case Emotion::Sad: return "Sad";
    case Emotion::Fear: return "Fear";
  }
  return "?";
}

ValenceLexicon parse_valence_lexicon(std::string_view contents) {
  ValenceLexicon lex;
  for_each_line(contents, [&](std::string_view line, std::size_t row) {
    if (trim(line).empty()) return;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw SchemaError(row, "valence lexicon row lacks a TAB");
    auto rest = line.substr(tab + 1);
    auto value = rest.substr(0, rest.find('\t'));
    double v = 0;
    if (!io::parse_double(trim(value), v)) throw SchemaError(row, "valence is not a number");
    lex.insert_or_assign(std::string(line.substr(0, tab)), v);
  });
  return lex;
}

ValenceLexicon load_valence_lexicon(const std::filesystem::path& path) {
  return parse_valence_lexicon(io::read_file(path));
}

EmotionLexicon parse_emotion_lexicon(std::string_view contents) {
  EmotionLexicon lex;
  const auto rows = io::parse_csv(contents);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (r == 0 && row.size() == 2 && row[0] == "word" && row[1] == "emotion") continue;
    if (row.size() != 2) throw SchemaError(r + 1, "emotion lexicon rows need exactly word,emotion");
    auto e = parse_emotion(trim(row[1]));
    if (!e) throw SchemaError(r + 1, "unknown emotion '" + row[1] + "'");
    auto word = std::string(trim(row[0]));
    if (word.empty()) throw SchemaError(r + 1, "empty word");
    lex.emplace(std::move(word), *e);  // first listing wins
  }
  return lex;
}

EmotionLexicon load_emotion_lexicon(const std::filesystem::path& path) {
  return parse_emotion_lexicon(io::read_file(path));
}

const Lexicons& default_lexicons() {
  static const Lexicons lex{parse_valence_lexicon(embedded::vader_lexicon()),
                            parse_emotion_lexicon(embedded::emotion_lexicon()), text::default_stopwords()};
  return lex;
}

bool is_negator(std::string_view token) {
  static constexpr std::string_view kWords[] = {
      "not",    "no",     "never",  "dont",   "doesnt",  "didnt",   "isnt",     "arent",
      "wasnt",  "werent", "cant",   "cannot", "wont",    "wouldnt", "shouldnt", "couldnt",
      "havent", "hasnt",  "hadnt",  "aint",   "mustnt",  "neednt",  "darent",   "mightnt"};
  if (token.ends_with("n't")) return true;
  return std::find(std::begin(kWords), std::end(kWords), token) != std::end(kWords);
}

double normalize_compound(double s) {
  const double c = s / std::sqrt(s * s + kCompoundAlpha);
  return std::clamp(c, -1.0, 1.0);
}

SentimentScore sentiment(const text::TokenList& tokens, const ValenceLexicon& lexicon) {
  SentimentScore out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = lexicon.find(tokens[i]);
    if (it == lexicon.end()) continue;
    double v = it->second;
    if (i > 0 && is_negator(tokens[i - 1])) v *= kNegationFactor;
    out.raw_sum += v;
    ++out.hits;
  }
  out.compound = normalize_compound(out.raw_sum);
  return out;
}

double EmotionProfile::get(Emotion e) const {
  switch (e) {
    case Emotion::Happy: return happy;
    case Emotion::Angry: return angry;
    case Emotion::Surprise: return surprise;
    case Emotion::Sad: return sad;
    case Emotion::Fear: return fear;
  }
  return 0;
}

EmotionProfile profile_from_counts(std::size_t happy, std::size_t angry, std::size_t surprise,
                                   std::size_t sad, std::size_t fear) {
  EmotionProfile p;
  p.matches = happy + angry + surprise + sad + fear;
  if (p.matches == 0) return p;
  const double total = static_cast<double>(p.matches);
  p.happy = static_cast<double>(happy) / total;
  p.angry = static_cast<double>(angry) / total;
  p.surprise = static_cast<double>(surprise) / total;
  p.sad = static_cast<double>(sad) / total;
  p.fear = static_cast<double>(fear) / total;
  return p;
}

EmotionProfile emotions(const text::TokenList& tokens, const EmotionLexicon& lexicon) {
  std::array<std::size_t, 5> counts{};
  for (const auto& t : tokens) {
    if (auto it = lexicon.find(t); it != lexicon.end()) ++counts[static_cast<std::size_t>(it->second)];
  }
  return profile_from_counts(counts[0], counts[1], counts[2], counts[3], counts[4]);
}

int ordinal(Emotion e) {
  switch (e) {
    case Emotion::Angry: return -3;
    case Emotion::Fear: return -2;
    case Emotion::Sad: return -1;
    case Emotion::Surprise: return 1;
    case Emotion::Happy: return 2;
  }
  return 0;
}

int dominant_ordinal(const EmotionProfile& profile) {
  // Visit in ascending ordinal so ties keep the most negative emotion.
  static constexpr Emotion kByOrdinal[] = {Emotion::Angry, Emotion::Fear, Emotion::Sad, Emotion::Surprise,
                                           Emotion::Happy};
  double best = 0;
  int result = 0;
  for (auto e : kByOrdinal) {
    if (profile.get(e) > best) {
      best = profile.get(e);
      result = ordinal(e);
    }
  }
  return result;
}

std::string_view ordinal_name(int value) {
  switch (value) {
    case -3: return "Angry";
    case -2: return "Fear";
    case -1: return "Sad";
    case 0: return "Neutral";
    case 1: return "Surprise";
    case 2: return "Happy";
  }
  throw RangeError("emotion ordinal out of range: " + std::to_string(value));
}

TextAffect analyze_text(std::string_view raw_text, const Lexicons& lexicons) {
  const auto tokens = text::tokenize(text::clean(raw_text));
  TextAffect out;
  out.sentiment = sentiment(tokens, lexicons.valence);
  out.profile = emotions(text::remove_stopwords(tokens, lexicons.stopwords), lexicons.emotion);
  return out;
}

TextAffect comment_affect(const corpus::VideoRecord& record, const Lexicons& lexicons,
                          CommentAggregation mode) {
  if (record.comment_texts.empty()) return {};
  if (mode == CommentAggregation::Concatenate) {
    std::string joined;
    for (const auto& c : record.comment_texts) {
      if (!joined.empty()) joined.push_back('\n');
      joined += c;
    }
    return analyze_text(joined, lexicons);
  }

  TextAffect out;
  std::array<double, 5> sums{};
  std::size_t matched = 0;
  double compound_sum = 0, raw_sum = 0;
  for (const auto& c : record.comment_texts) {
    const auto a = analyze_text(c, lexicons);
    compound_sum += a.sentiment.compound;
    raw_sum += a.sentiment.raw_sum;
    out.sentiment.hits += a.sentiment.hits;
    out.profile.matches += a.profile.matches;
    if (a.profile.matches == 0) continue;
    ++matched;
    for (std::size_t k = 0; k < kEmotions.size(); ++k) sums[k] += a.profile.get(kEmotions[k]);
  }
  const double n = static_cast<double>(record.comment_texts.size());
  out.sentiment.compound = compound_sum / n;
  out.sentiment.raw_sum = raw_sum / n;
  if (matched > 0) {
    const double total = sums[0] + sums[1] + sums[2] + sums[3] + sums[4];
    out.profile.happy = sums[0] / total;
    out.profile.angry = sums[1] / total;
    out.profile.surprise = sums[2] / total;
    out.profile.sad = sums[3] / total;
    out.profile.fear = sums[4] / total;
  }
  return out;
}

}  // namespace ecovid::affect
