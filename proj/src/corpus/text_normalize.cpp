#include "trates/corpus/text_normalize.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "trates/common/error.hpp"

namespace trates::corpus {

bool is_valid_utf8(std::string_view s) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const int32_t n = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < n) {
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c < 0) return false;
  }
  return true;
}

std::string normalize_text(std::string_view utf8) {
  if (!is_valid_utf8(utf8)) throw ValidationError("text is not valid UTF-8");

  std::string folded;
  folded.reserve(utf8.size());
  for (std::size_t i = 0; i < utf8.size(); ++i) {
    if (utf8[i] == '\r') {
      folded.push_back('\n');
      if (i + 1 < utf8.size() && utf8[i + 1] == '\n') ++i;
    } else {
      folded.push_back(utf8[i]);
    }
  }

  bool ascii = true;
  for (unsigned char c : folded)
    if (c >= 0x80) {
      ascii = false;
      break;
    }
  if (ascii) return folded;  // ASCII is already NFC

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(folded);
  icu::UnicodeString out = nfc->normalize(in, status);
  if (U_FAILURE(status)) throw ValidationError("NFC normalization failed");
  std::string result;
  out.toUTF8String(result);
  return result;
}

bool has_content(std::string_view s) {
  for (unsigned char c : s)
    if (!(c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v')) return true;
  return false;
}

}  // namespace trates::corpus
