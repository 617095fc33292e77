#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace chromalign {

/// Splits on Unicode whitespace (ASCII whitespace, NBSP, U+1680, U+2000..U+200A,
/// U+2028/9, U+202F, U+205F, U+3000). Empty pieces are dropped.
std::vector<std::string_view> split_whitespace(std::string_view text);

/// The one tokenizer used by every scorer: whitespace split, strip leading and
/// trailing ASCII punctuation from each piece, ASCII-lowercase, drop empties.
std::vector<std::string> tokenize(std::string_view text);

std::string to_lower_ascii(std::string_view text);
std::string to_upper_ascii(std::string_view text);
std::string_view trim(std::string_view text);

/// Splits on a single-character delimiter, keeping empty fields.
std::vector<std::string_view> split(std::string_view text, char delim);

}  // namespace chromalign
