#include "doctest.h"

#include <cmath>

#include "ecovid/affect.hpp"
#include "ecovid/error.hpp"
#include "ecovid/rng.hpp"
#include "oracles.hpp"

using namespace ecovid;
using namespace ecovid::affect;
using ecovid::oracles::oracle_compound;

TEST_CASE("sentiment: examples") {
  const auto& lex = default_lexicons().valence;
  REQUIRE(lex.at("good") == 1.9);
  CHECK(sentiment({}, lex).compound == 0.0);
  CHECK(sentiment({"good"}, lex).compound == doctest::Approx(0.4404).epsilon(1e-4));
  CHECK(sentiment({"good"}, lex).compound == doctest::Approx(1.9 / std::sqrt(1.9 * 1.9 + 15)).epsilon(1e-12));
  CHECK(sentiment({"not", "good"}, lex).compound == doctest::Approx(-0.3412).epsilon(1e-3));
  CHECK(sentiment({"didn't", "good"}, lex).compound == doctest::Approx(-0.3412).epsilon(1e-3));
  CHECK(sentiment({"table", "chair"}, lex).hits == 0);
}

TEST_CASE("sentiment matches the oracle on random token lists") {
  ValenceLexicon lex{{"good", 1.9}, {"bad", -2.5}, {"love", 3.2}, {"hate", -2.7}, {"ok", 0.9}};
  const text::TokenList vocab{"good", "bad", "love", "hate", "ok", "not", "no", "never", "isn't", "plastic", "sea"};
  Rng rng(31);
  for (int i = 0; i < 2000; ++i) {
    text::TokenList t;
    for (std::size_t k = rng.uniform_index(12); k > 0; --k) t.push_back(vocab[rng.uniform_index(vocab.size())]);
    REQUIRE(sentiment(t, lex).compound == doctest::Approx(oracle_compound(t, lex)).epsilon(1e-12));
  }
}

TEST_CASE("sentiment properties: odd under lexicon negation, monotone, strictly inside (-1,1)") {
  ValenceLexicon lex{{"good", 1.9}, {"bad", -2.5}, {"love", 3.2}, {"hate", -2.7}};
  ValenceLexicon flipped;
  for (const auto& [w, v] : lex) flipped[w] = -v;
  const text::TokenList vocab{"good", "bad", "love", "hate", "not", "x"};
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    text::TokenList t;
    for (std::size_t k = rng.uniform_index(10); k > 0; --k) t.push_back(vocab[rng.uniform_index(vocab.size())]);
    const double c = sentiment(t, lex).compound;
    REQUIRE(sentiment(t, flipped).compound == -c);
    REQUIRE(std::abs(c) < 1.0);
    auto more = t;
    more.push_back("x");
    more.push_back("love");
    REQUIRE(sentiment(more, lex).compound >= c);
  }
  CHECK(std::abs(normalize_compound(1e6)) <= 1.0);
}

TEST_CASE("negator detection") {
  CHECK(is_negator("not"));
  CHECK(is_negator("never"));
  CHECK(is_negator("isn't"));
  CHECK(is_negator("dont"));
  CHECK_FALSE(is_negator("note"));
}

TEST_CASE("emotions: examples") {
  EmotionLexicon lex{{"wow", Emotion::Surprise}, {"cry", Emotion::Sad}, {"tears", Emotion::Sad},
                     {"scared", Emotion::Fear}, {"joy", Emotion::Happy}, {"mad", Emotion::Angry}};
  const auto p = emotions({"wow", "cry", "tears", "scared", "scared", "scared", "scared", "scared", "scared"}, lex);
  CHECK(p.matches == 9);
  CHECK(p.happy == 0);
  CHECK(p.angry == 0);
  CHECK(p.surprise == doctest::Approx(1.0 / 9));
  CHECK(p.sad == doctest::Approx(2.0 / 9));
  CHECK(p.fear == doctest::Approx(6.0 / 9));
  CHECK(std::round(p.surprise * 100) / 100 == doctest::Approx(0.11));
  CHECK(std::round(p.sad * 100) / 100 == doctest::Approx(0.22));
  CHECK(std::round(p.fear * 100) / 100 == doctest::Approx(0.67));

  const auto only_fear = emotions({"scared", "plastic", "scared"}, lex);
  CHECK(only_fear.fear == 1.0);
  CHECK(only_fear.sum() == 1.0);
  const auto none = emotions({"plastic"}, lex);
  CHECK(none.sum() == 0);
  CHECK(none.matches == 0);
}

TEST_CASE("profile_from_counts normalizes") {
  const auto p = profile_from_counts(1, 2, 0, 1, 0);
  CHECK(p.happy == 0.25);
  CHECK(p.angry == 0.5);
  CHECK(p.sad == 0.25);
  CHECK(profile_from_counts(0, 0, 0, 0, 0).sum() == 0);
}

TEST_CASE("dominant_ordinal") {
  CHECK(dominant_ordinal(profile_from_counts(0, 0, 0, 0, 3)) == -2);
  CHECK(dominant_ordinal(profile_from_counts(0, 0, 0, 0, 0)) == 0);
  CHECK(dominant_ordinal(profile_from_counts(1, 0, 0, 0, 1)) == -2);
  CHECK(dominant_ordinal(profile_from_counts(2, 0, 1, 0, 0)) == 2);
  CHECK(dominant_ordinal(profile_from_counts(0, 0, 1, 0, 0)) == 1);
  CHECK(dominant_ordinal(profile_from_counts(1, 1, 1, 1, 1)) == -3);
  CHECK(ordinal(Emotion::Angry) == -3);
  CHECK(ordinal(Emotion::Fear) == -2);
  CHECK(ordinal(Emotion::Sad) == -1);
  CHECK(ordinal(Emotion::Surprise) == 1);
  CHECK(ordinal(Emotion::Happy) == 2);
  CHECK(ordinal_name(0) == "Neutral");
  CHECK(ordinal_name(-3) == "Angry");
}

TEST_CASE("dominant_ordinal is invariant under scaling") {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    EmotionProfile p;
    p.happy = double(rng.uniform_index(4));
    p.angry = double(rng.uniform_index(4));
    p.surprise = double(rng.uniform_index(4));
    p.sad = double(rng.uniform_index(4));
    p.fear = double(rng.uniform_index(4));
    EmotionProfile q = p;
    const double c = rng.uniform(0.01, 100);
    q.happy *= c;
    q.angry *= c;
    q.surprise *= c;
    q.sad *= c;
    q.fear *= c;
    REQUIRE(dominant_ordinal(p) == dominant_ordinal(q));
  }
}

TEST_CASE("comment_affect") {
  Lexicons lex = default_lexicons();
  lex.emotion = {{"joy", Emotion::Happy}, {"mad", Emotion::Angry}, {"furious", Emotion::Angry}, {"cry", Emotion::Sad}};
  corpus::VideoRecord r;
  r.comment_texts = {"Joy!", "so mad", "furious and cry"};
  const auto a = comment_affect(r, lex);
  CHECK(a.profile.happy == 0.25);
  CHECK(a.profile.angry == 0.5);
  CHECK(a.profile.surprise == 0);
  CHECK(a.profile.sad == 0.25);
  CHECK(a.profile.fear == 0);

  corpus::VideoRecord empty;
  const auto e = comment_affect(empty, lex);
  CHECK(e.profile.sum() == 0);
  CHECK(e.sentiment.compound == 0);
  CHECK(dominant_ordinal(e.profile) == 0);

  corpus::VideoRecord good;
  good.comment_texts = {"good"};
  CHECK(comment_affect(good, default_lexicons()).sentiment.compound == doctest::Approx(0.4404).epsilon(1e-4));

  const auto avg = comment_affect(r, lex, CommentAggregation::Average);
  CHECK(avg.profile.sum() == doctest::Approx(1.0));
}

TEST_CASE("lexicon parsing") {
  const auto v = parse_valence_lexicon("good\t1.9\t0.5\t[1,2]\nbad\t-2.5\n");
  CHECK(v.at("good") == 1.9);
  CHECK(v.at("bad") == -2.5);
  CHECK_THROWS_AS(parse_valence_lexicon("good 1.9\n"), SchemaError);
  const auto e = parse_emotion_lexicon("word,emotion\njoy,Happy\nafraid,Fear\n");
  CHECK(e.at("joy") == Emotion::Happy);
  CHECK_THROWS_AS(parse_emotion_lexicon("word,emotion\njoy,Elated\n"), SchemaError);
  CHECK_THROWS_AS(load_valence_lexicon("/nonexistent/vader.txt"), IoError);
}

TEST_CASE("analyze_text: sentiment sees stopwords, emotions do not") {
  const auto a = analyze_text("This is NOT good!", default_lexicons());
  CHECK(a.sentiment.compound == doctest::Approx(-0.3412).epsilon(1e-3));
}
