#pragma once

#include <string_view>

namespace trates::text {

/// Vowel-group syllable estimate with silent-e and suffix adjustments.
/// Never returns less than 1.
int count_syllables(std::string_view word);

}  // namespace trates::text
