#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace ionjch {

// Locale-independent decimal text with 17 significant digits; round-trips any
// finite double. NaN prints as "nan", infinities as "inf"/"-inf".
inline std::string format_double(double value) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace ionjch
