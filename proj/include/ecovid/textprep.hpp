#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ecovid::text {

using TokenList = std::vector<std::string>;
using StopList = std::unordered_set<std::string>;

/// Decodes UTF-8 into code points. Invalid bytes decode to U+FFFD.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view code_points);

/// Code points in U+1F300..U+1FAFF or U+2600..U+27BF.
bool is_emoji(char32_t cp);

/// Strips URLs and every character that is not a letter, digit, whitespace
/// or emoji; hyphens and dashes become spaces; lowercases; collapses runs of
/// whitespace to single spaces and trims. Idempotent.
std::string clean(std::string_view text);

/// Splits on whitespace, dropping empty tokens.
TokenList tokenize(std::string_view text);

/// Order-preserving filter of tokens present in `stoplist`.
TokenList remove_stopwords(const TokenList& tokens, const StopList& stoplist);

/// Number of emoji. A ZWJ sequence (emoji U+200D emoji ...) counts once, and
/// skin-tone modifiers or U+FE0F attached to an emoji are not counted.
std::size_t count_emoji(std::string_view raw_text);

/// Number of code points, the unit used for post length.
std::size_t length_code_points(std::string_view text);

/// Parses a stopword file: one token per line, '#' starts a comment line.
StopList parse_stopwords(std::string_view contents);
StopList load_stopwords(const std::filesystem::path& path);
/// The bundled English list.
const StopList& default_stopwords();

struct WordEntry {
  std::string word;
  std::size_t count = 0;
  double weight = 0;  // count / max count
};

using WordTable = std::vector<WordEntry>;

/// Aggregates counts over documents and keeps the top_k by count, ties broken
/// by ascending word. Throws ParameterError when top_k == 0.
WordTable word_table(const std::vector<TokenList>& docs, std::size_t top_k);

/// CSV with header word,count,weight.
std::string to_csv(const WordTable& table);

}  // namespace ecovid::text
