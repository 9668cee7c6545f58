#include "ecovid/textprep.hpp"

#include <algorithm>
#include <map>

#include "ecovid/error.hpp"
#include "ecovid/io.hpp"

namespace ecovid::embedded {
std::string_view stopwords_en();
}

namespace ecovid::text {

namespace {

constexpr char32_t kZwj = 0x200D;
constexpr char32_t kVs16 = 0xFE0F;
constexpr char32_t kReplacement = 0xFFFD;

bool is_skin_tone(char32_t cp) { return cp >= 0x1F3FB && cp <= 0x1F3FF; }

bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
         cp == 0x00A0 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 ||
         cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

bool is_dash(char32_t cp) { return cp == '-' || (cp >= 0x2010 && cp <= 0x2015) || cp == 0x2212; }

/// Letters outside ASCII: Latin-1/Extended, Greek, Cyrillic, Armenian,
/// Hebrew, Arabic, Indic scripts, Kana, CJK ideographs, Hangul.
bool is_non_ascii_letter(char32_t cp) {
  if (cp >= 0x00C0 && cp <= 0x024F) return cp != 0x00D7 && cp != 0x00F7;
  if (cp >= 0x0370 && cp <= 0x03FF) return cp != 0x037E && cp != 0x0387;
  if (cp >= 0x0400 && cp <= 0x052F) return true;
  if (cp >= 0x0531 && cp <= 0x0587) return true;
  if (cp >= 0x05D0 && cp <= 0x05EA) return true;
  if (cp >= 0x0620 && cp <= 0x064A) return true;
  if (cp >= 0x0900 && cp <= 0x0DFF) return true;
  if (cp >= 0x3041 && cp <= 0x30FF) return true;
  if (cp >= 0x4E00 && cp <= 0x9FFF) return true;
  if (cp >= 0xAC00 && cp <= 0xD7A3) return true;
  return false;
}

bool is_ascii_alnum(char32_t cp) {
  return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 32;
  if (cp >= 0x0391 && cp <= 0x03A9 && cp != 0x03A2) return cp + 32;
  if (cp >= 0x0410 && cp <= 0x042F) return cp + 32;
  if (cp >= 0x0400 && cp <= 0x040F) return cp + 80;
  return cp;
}

bool starts_with_ci(std::u32string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (to_lower(s[i]) != static_cast<char32_t>(prefix[i])) return false;
  }
  return true;
}

bool is_url(std::u32string_view token) {
  return starts_with_ci(token, "http://") || starts_with_ci(token, "https://") ||
         starts_with_ci(token, "www.");
}

}  // namespace

std::u32string decode_utf8(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    const auto b0 = static_cast<unsigned char>(bytes[i]);
    int len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + static_cast<std::size_t>(len) > bytes.size()) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(bytes[i + static_cast<std::size_t>(k)]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (!ok || cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

std::string encode_utf8(std::u32string_view code_points) {
  std::string out;
  out.reserve(code_points.size());
  for (char32_t cp : code_points) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

bool is_emoji(char32_t cp) { return (cp >= 0x1F300 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF); }

std::string clean(std::string_view text) {
  const auto cps = decode_utf8(text);

  // Pass 1: drop whitespace-delimited URL tokens.
  std::u32string no_urls;
  no_urls.reserve(cps.size());
  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_space(cps[i])) {
      no_urls.push_back(' ');
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && !is_space(cps[j])) ++j;
    std::u32string_view token(cps.data() + i, j - i);
    if (!is_url(token)) no_urls.append(token);
    i = j;
  }

  // Pass 2: character filter, dash -> space, lowercase, collapse spaces.
  std::u32string out;
  out.reserve(no_urls.size());
  bool pending_space = false;
  for (char32_t cp : no_urls) {
    char32_t keep = 0;
    if (is_space(cp) || is_dash(cp)) {
      pending_space = true;
      continue;
    }
    if (is_ascii_alnum(cp) || is_non_ascii_letter(cp)) {
      keep = to_lower(cp);
    } else if (is_emoji(cp) || cp == kZwj || cp == kVs16) {
      keep = cp;
    } else {
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(keep);
  }
  return encode_utf8(out);
}

TokenList tokenize(std::string_view text) {
  TokenList out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

TokenList remove_stopwords(const TokenList& tokens, const StopList& stoplist) {
  TokenList out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stoplist.contains(t)) out.push_back(t);
  }
  return out;
}

std::size_t count_emoji(std::string_view raw_text) {
  const auto cps = decode_utf8(raw_text);
  std::size_t count = 0;
  bool prev_emoji = false;  // previous significant code point was part of an emoji
  bool joined = false;      // a ZWJ follows an emoji
  for (char32_t cp : cps) {
    if (cp == kZwj) {
      joined = prev_emoji;
      continue;
    }
    if (cp == kVs16) continue;
    if (is_emoji(cp)) {
      if (is_skin_tone(cp) && prev_emoji) continue;
      if (!joined) ++count;
      prev_emoji = true;
      joined = false;
      continue;
    }
    prev_emoji = false;
    joined = false;
  }
  return count;
}

std::size_t length_code_points(std::string_view text) { return decode_utf8(text).size(); }

StopList parse_stopwords(std::string_view contents) {
  StopList out;
  std::size_t start = 0;
  while (start < contents.size()) {
    auto end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    auto line = contents.substr(start, end - start);
    start = end + 1;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    out.insert(clean(line));
  }
  return out;
}

StopList load_stopwords(const std::filesystem::path& path) { return parse_stopwords(io::read_file(path)); }

const StopList& default_stopwords() {
  static const StopList list = parse_stopwords(embedded::stopwords_en());
  return list;
}

WordTable word_table(const std::vector<TokenList>& docs, std::size_t top_k) {
  if (top_k == 0) throw ParameterError("word_table: top_k must be at least 1");
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : docs) {
    for (const auto& t : doc) ++counts[t];
  }
  WordTable table;
  table.reserve(counts.size());
  for (auto& [word, count] : counts) table.push_back({word, count, 0.0});
  // std::map already yields ascending words, so a stable sort on count
  // leaves ties in lexicographic order.
  std::stable_sort(table.begin(), table.end(),
                   [](const WordEntry& a, const WordEntry& b) { return a.count > b.count; });
  if (table.size() > top_k) table.resize(top_k);
  if (!table.empty()) {
    const double max_count = static_cast<double>(table.front().count);
    for (auto& e : table) e.weight = static_cast<double>(e.count) / max_count;
  }
  return table;
}

std::string to_csv(const WordTable& table) {
  std::string out = "word,count,weight\n";
  for (const auto& e : table)
    out += io::csv_line({e.word, std::to_string(e.count), io::format_double(e.weight)});
  return out;
}

}  // namespace ecovid::text
