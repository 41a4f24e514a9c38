#pragma once

#include <string>
#include <string_view>

namespace trates::corpus {

/// NFC-normalizes UTF-8 text and folds CRLF / lone CR to LF.
/// Throws ValidationError on malformed UTF-8.
std::string normalize_text(std::string_view utf8);

bool is_valid_utf8(std::string_view s);

/// True when the text contains something other than whitespace.
bool has_content(std::string_view s);

}  // namespace trates::corpus
