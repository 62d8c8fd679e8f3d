#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace unimark {

/// A text as a sequence of Unicode scalar values. Never normalized.
using Text = std::u32string;
using Scalar = char32_t;

class Utf8Error : public std::runtime_error {
 public:
  Utf8Error(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

inline constexpr bool is_scalar_value(char32_t cp) noexcept {
  return cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
}

// Strict decoder: rejects overlongs, surrogates and truncated sequences.
inline Text decode_utf8(std::string_view bytes) {
  Text out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    const auto b0 = static_cast<unsigned char>(bytes[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4, cp = b0 & 0x07, min = 0x10000;
    } else {
      throw Utf8Error("invalid UTF-8 lead byte", i);
    }
    if (i + len > n) throw Utf8Error("truncated UTF-8 sequence", i);
    for (int j = 1; j < len; ++j) {
      const auto b = static_cast<unsigned char>(bytes[i + j]);
      if ((b & 0xC0) != 0x80) throw Utf8Error("invalid UTF-8 continuation byte", i + j);
      cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min) throw Utf8Error("overlong UTF-8 sequence", i);
    if (!is_scalar_value(cp)) throw Utf8Error("UTF-8 sequence encodes a non-scalar value", i);
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (!is_scalar_value(cp)) throw std::invalid_argument("not a Unicode scalar value");
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

inline std::string encode_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) append_utf8(out, cp);
  return out;
}

/// "U+2004" style label; at least four hex digits.
inline std::string format_codepoint(char32_t cp) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string digits;
  for (char32_t v = cp; v != 0; v >>= 4) digits.insert(digits.begin(), kHex[v & 0xF]);
  while (digits.size() < 4) digits.insert(digits.begin(), '0');
  return "U+" + digits;
}

/// Parses "U+XXXX" (also "u+", "0x" or bare hex).
inline char32_t parse_codepoint(std::string_view s) {
  std::string_view body = s;
  if (body.size() > 2 && (body.substr(0, 2) == "U+" || body.substr(0, 2) == "u+" ||
                          body.substr(0, 2) == "0x" || body.substr(0, 2) == "0X")) {
    body.remove_prefix(2);
  }
  if (body.empty() || body.size() > 6) {
    throw std::invalid_argument("malformed codepoint '" + std::string(s) + "'");
  }
  char32_t cp = 0;
  for (char c : body) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else throw std::invalid_argument("malformed codepoint '" + std::string(s) + "'");
    cp = (cp << 4) | static_cast<char32_t>(v);
  }
  if (!is_scalar_value(cp)) throw std::invalid_argument("not a scalar value: '" + std::string(s) + "'");
  return cp;
}

}  // namespace unimark
