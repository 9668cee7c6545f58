#include "doctest.h"

#include "ecovid/error.hpp"
#include "ecovid/rng.hpp"
#include "ecovid/textprep.hpp"

using namespace ecovid;
using namespace ecovid::text;

TEST_CASE("clean: examples") {
  CHECK(clean("") == "");
  CHECK(clean("Check https://x.co NOW!!!") == "check now");
  CHECK(clean("climate-change") == "climate change");
  CHECK(clean("visit www.example.org or http://a.b/c?d=1 today") == "visit or today");
  CHECK(clean("  Tabs\tand\nnewlines  ") == "tabs and newlines");
  CHECK(clean("don't stop") == "dont stop");
  CHECK(clean("Café ÜBER") == "café über");
}

TEST_CASE("clean keeps emoji and is idempotent") {
  const std::string t = "Save the planet \xF0\x9F\x8C\x8D!! #eco-life @user 100%";
  const auto once = clean(t);
  CHECK(once == "save the planet \xF0\x9F\x8C\x8D eco life user 100");
  CHECK(clean(once) == once);
  Rng rng(8);
  const std::string alphabet = "aZ9 -!,.\t#\xC3\xA9";
  for (int i = 0; i < 500; ++i) {
    std::string s;
    const auto len = rng.uniform_index(30);
    for (std::size_t k = 0; k < len; ++k) {
      const auto c = rng.uniform_index(alphabet.size() - 1);
      if (alphabet[c] == '\xC3') s += "\xC3\xA9";
      else if (alphabet[c] != '\xA9') s += alphabet[c];
    }
    REQUIRE(clean(clean(s)) == clean(s));
  }
}

TEST_CASE("tokenize") {
  CHECK(tokenize("").empty());
  CHECK(tokenize("climate change") == TokenList{"climate", "change"});
  CHECK(tokenize(" a  b ") == TokenList{"a", "b"});
}

TEST_CASE("remove_stopwords with the default list") {
  const auto& stop = default_stopwords();
  CHECK(remove_stopwords({"a", "the", "as"}, stop).empty());
  CHECK(remove_stopwords({"climate"}, stop) == TokenList{"climate"});
  CHECK(remove_stopwords({}, stop).empty());
  // negators must survive for the sentiment rule
  CHECK(remove_stopwords({"not", "no", "never"}, stop) == TokenList{"not", "no", "never"});
  const TokenList mixed{"the", "plastic", "is", "in", "the", "ocean"};
  const auto once = remove_stopwords(mixed, stop);
  CHECK(once == TokenList{"plastic", "ocean"});
  CHECK(remove_stopwords(once, stop) == once);
}

TEST_CASE("parse_stopwords skips comments and blank lines") {
  const auto s = parse_stopwords("# header\nthe\n\n  A \n#x\n");
  CHECK(s.size() == 2);
  CHECK(s.count("the"));
  CHECK(s.count("a"));
}

TEST_CASE("count_emoji") {
  CHECK(count_emoji("") == 0);
  CHECK(count_emoji("\xF0\x9F\x8C\x8D\xF0\x9F\x8C\x8D") == 2);  // two globes
  // seven emoji spread through text, as in a caption with 7 emoji
  const std::string seven =
      "Our oceans \xF0\x9F\x8C\x8A\xF0\x9F\x90\xA2 are choking \xF0\x9F\x98\xA2 on plastic \xE2\x99\xBB\xEF\xB8\x8F "
      "act now \xF0\x9F\x8C\x8D\xF0\x9F\x92\x9A\xE2\x9C\x8A";
  CHECK(count_emoji(seven) == 7);
  // family ZWJ sequence is one emoji; a skin-tone modifier adds nothing
  CHECK(count_emoji("\xF0\x9F\x91\xA8\xE2\x80\x8D\xF0\x9F\x91\xA9\xE2\x80\x8D\xF0\x9F\x91\xA7") == 1);
  CHECK(count_emoji("\xF0\x9F\x91\x8D\xF0\x9F\x8F\xBD") == 1);
  CHECK(count_emoji("no emoji here, just text!") == 0);
}

TEST_CASE("count_emoji ignores edits to non-emoji characters") {
  const std::string e = "\xF0\x9F\x8C\xB1";
  CHECK(count_emoji("a" + e + "b") == count_emoji("xyz!!" + e + "  ---"));
}

TEST_CASE("length_code_points counts code points, not bytes") {
  CHECK(length_code_points("abc") == 3);
  CHECK(length_code_points("caf\xC3\xA9") == 4);
  CHECK(length_code_points("\xF0\x9F\x8C\x8D") == 1);
}

TEST_CASE("word_table") {
  const auto t = word_table({{"a"}, {"a"}, {"b"}}, 2);
  REQUIRE(t.size() == 2);
  CHECK(t[0].word == "a");
  CHECK(t[0].count == 2);
  CHECK(t[0].weight == 1.0);
  CHECK(t[1].word == "b");
  CHECK(t[1].count == 1);
  CHECK(t[1].weight == 0.5);
  CHECK(word_table({}, 3).empty());
  CHECK(word_table({{"x", "y"}}, 10).size() == 2);
  CHECK_THROWS_AS(word_table({{"x"}}, 0), ParameterError);
  // ties broken lexicographically ascending
  const auto ties = word_table({{"pear", "apple", "fig"}}, 2);
  CHECK(ties[0].word == "apple");
  CHECK(ties[1].word == "fig");
  CHECK(to_csv(t) == "word,count,weight\na,2,1\nb,1,0.5\n");
}

TEST_CASE("word_table invariants on random documents") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<TokenList> docs(1 + rng.uniform_index(5));
    for (auto& d : docs)
      for (std::size_t k = rng.uniform_index(20); k > 0; --k) d.push_back(std::string(1, char('a' + rng.uniform_index(8))));
    const auto t = word_table(docs, 1 + rng.uniform_index(10));
    if (t.empty()) continue;
    REQUIRE(t[0].weight == 1.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
      REQUIRE(t[i].weight > 0);
      REQUIRE(t[i].weight <= 1);
      if (i > 0) REQUIRE((t[i - 1].count > t[i].count || (t[i - 1].count == t[i].count && t[i - 1].word < t[i].word)));
    }
  }
}
