#include "cohmeta/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <array>
#include <cstdint>

#include "cohmeta/errors.hpp"

namespace cohmeta::text {

namespace {

// Calls fn(code_point, begin_offset, end_offset) for each code point.
template <typename Fn>
void for_each_code_point(std::string_view s, Fn&& fn) {
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(s.data());
  const auto length = static_cast<std::int32_t>(s.size());
  std::int32_t i = 0;
  while (i < length) {
    const std::int32_t begin = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) {
      throw DataError("invalid UTF-8 at byte offset " + std::to_string(begin));
    }
    if (!fn(c, static_cast<std::size_t>(begin), static_cast<std::size_t>(i))) return;
  }
}

bool is_punct_or_symbol(UChar32 c) {
  const auto mask = U_GET_GC_MASK(c);
  return (mask & (U_GC_P_MASK | U_GC_S_MASK)) != 0;
}

constexpr std::array<std::string_view, 40> kAbbreviations = {
    "mr.",   "mrs.",  "ms.",   "dr.",   "prof.", "sr.",   "jr.",   "st.",   "mt.",   "vs.",
    "e.g.",  "i.e.",  "u.s.",  "u.k.",  "u.n.",  "inc.",  "ltd.",  "co.",   "corp.", "gov.",
    "gen.",  "col.",  "capt.", "lt.",   "sgt.",  "rep.",  "sen.",  "jan.",  "feb.",  "mar.",
    "apr.",  "aug.",  "sept.", "sep.",  "oct.",  "nov.",  "dec.",  "no.",   "approx.", "dept."};

// Token ending at a period that should not close a sentence.
bool is_abbreviation(std::string_view token) {
  while (!token.empty() && (token.front() == '"' || token.front() == '(' ||
                            token.front() == '[' || token.front() == '\'')) {
    token.remove_prefix(1);
  }
  if (token.empty()) return false;
  const std::string lower = to_lower(token);
  if (std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) != kAbbreviations.end()) {
    return true;
  }
  // Single-letter initial ("J.") or dotted initialism ("U.S.A.").
  bool expect_letter = true;
  for (char c : lower) {
    const bool letter = c >= 'a' && c <= 'z';
    if (expect_letter && !letter) return false;
    if (!expect_letter && c != '.') return false;
    expect_letter = !expect_letter;
  }
  return expect_letter;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (is_space(s.front()) || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (is_space(s.back()) || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

// Length of a closing quote/bracket at s[i], 0 if none.
std::size_t closer_length(std::string_view s, std::size_t i) {
  const char c = s[i];
  if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
  const std::string_view rest = s.substr(i);
  if (rest.starts_with("\xE2\x80\x99") || rest.starts_with("\xE2\x80\x9D")) return 3;
  return 0;
}

}  // namespace

std::string normalize_nfc(std::string_view utf8) {
  for_each_code_point(utf8, [](UChar32, std::size_t, std::size_t) { return true; });
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  const icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<std::int32_t>(utf8.size())));
  if (nfc->isNormalized(src, status) && U_SUCCESS(status)) return std::string(utf8);
  status = U_ZERO_ERROR;
  const icu::UnicodeString normalized = nfc->normalize(src, status);
  if (U_FAILURE(status)) throw DataError("NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::size_t count_uppercase(std::string_view utf8) {
  std::size_t n = 0;
  for_each_code_point(utf8, [&](UChar32 c, std::size_t, std::size_t) {
    if (u_charType(c) == U_UPPERCASE_LETTER) ++n;
    return true;
  });
  return n;
}

std::size_t char_length(std::string_view utf8) {
  std::size_t n = 0;
  for_each_code_point(utf8, [&](UChar32, std::size_t, std::size_t) {
    ++n;
    return true;
  });
  return n;
}

std::string to_lower(std::string_view utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<std::int32_t>(utf8.size())));
  s.toLower(icu::Locale::getRoot());
  std::string out;
  s.toUTF8String(out);
  return out;
}

bool starts_uppercase(std::string_view utf8) {
  bool upper = false;
  for_each_code_point(utf8, [&](UChar32 c, std::size_t, std::size_t) {
    const auto type = u_charType(c);
    upper = type == U_UPPERCASE_LETTER || type == U_TITLECASE_LETTER;
    return false;
  });
  return upper;
}

bool has_alnum(std::string_view utf8) {
  bool found = false;
  for_each_code_point(utf8, [&](UChar32 c, std::size_t, std::size_t) {
    found = u_isalnum(c) != 0;
    return !found;
  });
  return found;
}

std::string strip_punct(std::string_view utf8) {
  std::size_t first = utf8.size();
  std::size_t last = 0;
  for_each_code_point(utf8, [&](UChar32 c, std::size_t begin, std::size_t end) {
    if (!is_punct_or_symbol(c)) {
      first = std::min(first, begin);
      last = end;
    }
    return true;
  });
  if (first >= last) return {};
  return std::string(utf8.substr(first, last - first));
}

std::vector<std::string> split_sentences(std::string_view utf8) {
  std::vector<std::string> sentences;
  auto flush = [&](std::size_t begin, std::size_t end) {
    const auto piece = trim(utf8.substr(begin, end - begin));
    if (!piece.empty()) sentences.emplace_back(piece);
  };

  std::size_t start = 0;
  std::size_t i = 0;
  while (i < utf8.size()) {
    const char c = utf8[i];
    if (c == '\n') {
      flush(start, i);
      start = ++i;
      continue;
    }
    if (c != '.' && c != '?' && c != '!') {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < utf8.size()) {
      if (utf8[j] == '.' || utf8[j] == '?' || utf8[j] == '!') {
        ++j;
      } else if (const auto n = closer_length(utf8, j); n > 0) {
        j += n;
      } else {
        break;
      }
    }
    const bool at_break = j == utf8.size() || is_space(utf8[j]) || utf8[j] == '\n';
    if (!at_break) {
      i = j;
      continue;
    }
    if (c == '.' && j == i + 1) {
      std::size_t token_begin = i;
      while (token_begin > start && !is_space(utf8[token_begin - 1])) --token_begin;
      if (is_abbreviation(utf8.substr(token_begin, i + 1 - token_begin))) {
        i = j;
        continue;
      }
    }
    flush(start, j);
    start = i = j;
  }
  flush(start, utf8.size());
  return sentences;
}

std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && (is_space(sentence[i]) || sentence[i] == '\n')) ++i;
    std::size_t j = i;
    while (j < sentence.size() && !is_space(sentence[j]) && sentence[j] != '\n') ++j;
    if (j > i) tokens.emplace_back(sentence.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::string join_sentences(const std::vector<std::string>& sentences) {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) out += ' ';
    out += sentences[i];
  }
  return out;
}

}  // namespace cohmeta::text
