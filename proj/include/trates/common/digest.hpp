#pragma once

#include <string>
#include <string_view>

namespace trates {

/// Lower-case hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// Digest over a sequence of length-prefixed fields, so that ("ab", "c") and
/// ("a", "bc") never collide.
class FieldDigest {
 public:
  FieldDigest& add(std::string_view field);
  std::string hex() const { return sha256_hex(buffer_); }

 private:
  std::string buffer_;
};

}  // namespace trates
