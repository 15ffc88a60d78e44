#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 text utilities backed by ICU.
namespace cohmeta::text {

/// NFC normalization. Throws DataError on invalid UTF-8.
std::string normalize_nfc(std::string_view utf8);

/// Number of code points with general category Lu.
std::size_t count_uppercase(std::string_view utf8);

/// Length in code points.
std::size_t char_length(std::string_view utf8);

std::string to_lower(std::string_view utf8);

/// True when the first code point is an uppercase letter (Lu or Lt).
bool starts_uppercase(std::string_view utf8);

/// True when the string contains at least one letter or digit.
bool has_alnum(std::string_view utf8);

/// Removes leading and trailing punctuation/symbol code points.
std::string strip_punct(std::string_view utf8);

/// Rule-based sentence splitter.
///
/// A sentence ends at '.', '?' or '!' (optionally followed by closing quotes or
/// brackets) when followed by whitespace or end of text. A period does not end
/// a sentence when the token it closes is a known abbreviation ("Mr.", "Dr.",
/// "U.S.", ...) or a single-letter initial. Newlines always end a sentence.
std::vector<std::string> split_sentences(std::string_view utf8);

/// Whitespace tokenization.
std::vector<std::string> tokenize(std::string_view sentence);

/// Sentences joined with single spaces; the text form used for length
/// measurements of documents.
std::string join_sentences(const std::vector<std::string>& sentences);

}  // namespace cohmeta::text
