#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>

#include "ecovid/corpus.hpp"
#include "ecovid/textprep.hpp"

namespace ecovid::affect {

/// Token -> mean valence, roughly in [-4, 4].
using ValenceLexicon = std::unordered_map<std::string, double>;

enum class Emotion { Happy, Angry, Surprise, Sad, Fear };
inline constexpr std::array<Emotion, 5> kEmotions = {Emotion::Happy, Emotion::Angry, Emotion::Surprise,
                                                     Emotion::Sad, Emotion::Fear};

std::string_view emotion_name(Emotion e);  // "Happy", "Angry", ...
using EmotionLexicon = std::unordered_map<std::string, Emotion>;

/// Multiplier applied to a lexicon hit whose preceding token is a negator.
inline constexpr double kNegationFactor = -0.74;
/// Normalization constant in compound = s / sqrt(s^2 + alpha).
inline constexpr double kCompoundAlpha = 15.0;

/// TSV token<TAB>valence; extra columns are ignored.
ValenceLexicon parse_valence_lexicon(std::string_view contents);
ValenceLexicon load_valence_lexicon(const std::filesystem::path& path);

/// CSV word,emotion; an optional "word,emotion" header line is skipped.
EmotionLexicon parse_emotion_lexicon(std::string_view contents);
EmotionLexicon load_emotion_lexicon(const std::filesystem::path& path);

struct Lexicons {
  ValenceLexicon valence;
  EmotionLexicon emotion;
  text::StopList stopwords;
};

/// The bundled VADER valence list, text2emotion word list and English stoplist.
const Lexicons& default_lexicons();

/// "not", "no", "never", anything ending in "n't", and the apostrophe-free
/// contractions produced by cleaning ("dont", "isnt", ...).
bool is_negator(std::string_view token);

struct SentimentScore {
  double compound = 0;   // in [-1, 1]
  double raw_sum = 0;    // valence sum s before normalization
  std::size_t hits = 0;  // lexicon matches
};

/// Sum of lexicon valences, each hit multiplied by -0.74 when the preceding
/// token is a negator, mapped through s / sqrt(s^2 + 15).
/// Booster words, punctuation and capitalization emphasis are not modelled.
SentimentScore sentiment(const text::TokenList& tokens, const ValenceLexicon& lexicon);

double normalize_compound(double s);

struct EmotionProfile {
  double happy = 0;
  double angry = 0;
  double surprise = 0;
  double sad = 0;
  double fear = 0;
  std::size_t matches = 0;

  double get(Emotion e) const;
  double sum() const { return happy + angry + surprise + sad + fear; }
};

/// Emotion fractions from raw match counts (all zero when total is zero).
EmotionProfile profile_from_counts(std::size_t happy, std::size_t angry, std::size_t surprise,
                                   std::size_t sad, std::size_t fear);

/// Counts lexicon matches per emotion and normalizes by the total.
EmotionProfile emotions(const text::TokenList& tokens, const EmotionLexicon& lexicon);

/// Angry -3, Fear -2, Sad -1, Neutral 0, Surprise 1, Happy 2.
int ordinal(Emotion e);

/// Argmax emotion's ordinal; 0 (Neutral) when the profile is all zero.
/// Ties resolve to the most negative ordinal.
int dominant_ordinal(const EmotionProfile& profile);
std::string_view ordinal_name(int ordinal);  // "Angry" ... "Happy", "Neutral"

/// Full text path: clean -> tokenize; sentiment on all tokens, emotions on
/// stopword-filtered tokens.
struct TextAffect {
  EmotionProfile profile;
  SentimentScore sentiment;
};
TextAffect analyze_text(std::string_view raw_text, const Lexicons& lexicons);

enum class CommentAggregation {
  Concatenate,  // one document of all comments
  Average,      // mean of per-comment profiles (matched comments) and compounds
};

TextAffect comment_affect(const corpus::VideoRecord& record, const Lexicons& lexicons,
                          CommentAggregation mode = CommentAggregation::Concatenate);

}  // namespace ecovid::affect
