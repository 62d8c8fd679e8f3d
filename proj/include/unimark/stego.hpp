#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "unimark/ecc.hpp"
#include "unimark/registry.hpp"
#include "unimark/utf8.hpp"

namespace unimark {

using BigUint = boost::multiprecision::cpp_int;

class StegoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MessageTooLong : public StegoError {
 public:
  MessageTooLong(std::size_t needed, std::size_t available)
      : StegoError("message needs " + std::to_string(needed) + " whitespaces but the text has " +
                   std::to_string(available)),
        needed_(needed),
        available_(available) {}
  std::size_t needed() const noexcept { return needed_; }
  std::size_t available() const noexcept { return available_; }

 private:
  std::size_t needed_;
  std::size_t available_;
};

class InsufficientPositions : public StegoError {
 public:
  InsufficientPositions(std::size_t needed, std::size_t available)
      : StegoError("expected " + std::to_string(needed) + " positions, found " + std::to_string(available)) {}
};

class DecodeFailure : public StegoError {
 public:
  using StegoError::StegoError;
};

/// Ordered digit codepoints [u_0, ..., u_{p-1}]. U+0020 is excluded: the
/// decoder reads every alphabet scalar in the text, so untouched plain
/// spaces would otherwise read as trailing zero digits.
class CodepointAlphabet {
 public:
  explicit CodepointAlphabet(std::vector<Scalar> codepoints) : cps_(std::move(codepoints)) {
    if (cps_.size() < 2) throw std::invalid_argument("alphabet needs at least two codepoints");
    for (std::size_t i = 0; i < cps_.size(); ++i) {
      if (cps_[i] == kSpace) throw std::invalid_argument("alphabet may not contain U+0020");
      if (!is_registry_whitespace(cps_[i])) {
        throw std::invalid_argument(format_codepoint(cps_[i]) + " is not a registered whitespace");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (cps_[j] == cps_[i]) throw std::invalid_argument("alphabet codepoints must be distinct");
      }
    }
    lo_ = *std::min_element(cps_.begin(), cps_.end());
    hi_ = *std::max_element(cps_.begin(), cps_.end());
  }

  /// "U+2000,U+2004"
  static CodepointAlphabet parse(std::string_view list) {
    std::vector<Scalar> cps;
    std::size_t start = 0;
    while (start <= list.size()) {
      const auto comma = list.find(',', start);
      auto item = list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
      while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
      cps.push_back(parse_codepoint(item));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return CodepointAlphabet(std::move(cps));
  }

  unsigned radix() const noexcept { return static_cast<unsigned>(cps_.size()); }
  Scalar operator[](std::size_t digit) const { return cps_.at(digit); }
  std::span<const Scalar> codepoints() const noexcept { return cps_; }

  /// Digit value of `c`, or -1.
  int digit_of(Scalar c) const noexcept {
    if (c < lo_ || c > hi_) return -1;
    for (std::size_t i = 0; i < cps_.size(); ++i) {
      if (cps_[i] == c) return static_cast<int>(i);
    }
    return -1;
  }

 private:
  std::vector<Scalar> cps_;
  Scalar lo_ = 0;
  Scalar hi_ = 0;
};

/// A p-ary message. The digit list is kept alongside the value because
/// leading zeros are not recoverable from the integer.
struct Message {
  std::vector<unsigned> digits;  // most significant first
  unsigned radix = 2;

  std::size_t k() const noexcept { return digits.size(); }

  BigUint value() const {
    BigUint v = 0;
    for (unsigned d : digits) v = v * radix + d;
    return v;
  }

  bool operator==(const Message&) const = default;
};

namespace stego {

/// Most significant first; 0 becomes [0].
inline std::vector<unsigned> to_digits(BigUint m, unsigned p) {
  if (p < 2) throw std::invalid_argument("radix must be at least 2");
  if (m < 0) throw std::invalid_argument("message must be non-negative");
  std::vector<unsigned> out;
  if (m == 0) return {0};
  while (m > 0) {
    out.push_back(static_cast<unsigned>(m % p));
    m /= p;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

inline Message make_message(const BigUint& m, unsigned p) { return Message{to_digits(m, p), p}; }

/// Replaces the first k plain spaces with u_{m_1}, ..., u_{m_k}; everything
/// after the k-th replaced space is copied untouched.
inline Text encode_digits(std::u32string_view text, std::span<const unsigned> digits,
                          const CodepointAlphabet& alphabet) {
  Text out(text);
  std::size_t i = 0;
  for (auto& c : out) {
    if (i == digits.size()) break;
    if (c != kSpace) continue;
    if (digits[i] >= alphabet.radix()) throw std::invalid_argument("digit out of range for alphabet");
    c = alphabet[digits[i]];
    ++i;
  }
  if (i < digits.size()) throw MessageTooLong(digits.size(), i);
  return out;
}

inline Text encode(std::u32string_view text, const Message& m, const CodepointAlphabet& alphabet) {
  if (m.radix != alphabet.radix()) throw std::invalid_argument("message radix does not match alphabet size");
  return encode_digits(text, m.digits, alphabet);
}

/// Reads every alphabet scalar in order, m <- p*m + i.
inline Message decode(std::u32string_view text, const CodepointAlphabet& alphabet) {
  Message m{{}, alphabet.radix()};
  for (Scalar c : text) {
    if (const int d = alphabet.digit_of(c); d >= 0) m.digits.push_back(static_cast<unsigned>(d));
  }
  return m;
}

/// Whitespace j (1-indexed) becomes `mark` iff bit j is set; zeros stay U+0020.
inline Text encode_positional(std::u32string_view text, const Bits& bits, Scalar mark = kThreePerEmSpace) {
  Text out(text);
  std::size_t j = 0;
  for (auto& c : out) {
    if (j == bits.size()) break;
    if (c != kSpace) continue;
    if (bits[j]) c = mark;
    ++j;
  }
  if (j < bits.size()) throw MessageTooLong(bits.size(), j);
  return out;
}

inline Bits decode_positional(std::u32string_view text, std::size_t n_bits, Scalar mark = kThreePerEmSpace) {
  Bits out;
  out.reserve(n_bits);
  for (Scalar c : text) {
    if (out.size() == n_bits) break;
    if (c == kSpace || c == mark) out.push_back(c == mark ? 1 : 0);
  }
  if (out.size() < n_bits) throw InsufficientPositions(n_bits, out.size());
  return out;
}

/// Positional profile: plain space is 0, `mark` is 1.
struct PositionalChannel {
  Scalar mark = kThreePerEmSpace;
};

using Channel = std::variant<PositionalChannel, CodepointAlphabet>;

namespace detail {

inline unsigned bits_per_digit(const CodepointAlphabet& a) {
  const unsigned p = a.radix();
  if ((p & (p - 1)) != 0) throw std::invalid_argument("robust embedding needs an alphabet of size 2^b");
  unsigned b = 0;
  while ((1u << b) < p) ++b;
  return b;
}

inline Bits with_checksum(const Bits& payload) {
  Bits msg = payload;
  const std::uint8_t crc = ecc::crc8(payload);
  for (int i = 7; i >= 0; --i) msg.push_back((crc >> i) & 1);
  return msg;
}

}  // namespace detail

/// Payload plus an 8-bit CRC, ECC-encoded, written into the whitespace channel.
inline Text embed_robust(std::u32string_view text, const Bits& payload, const Channel& channel, Codec codec) {
  const Bits codeword = ecc::encode(detail::with_checksum(payload), codec);
  if (const auto* pos = std::get_if<PositionalChannel>(&channel)) {
    return encode_positional(text, codeword, pos->mark);
  }
  const auto& alphabet = std::get<CodepointAlphabet>(channel);
  const unsigned b = detail::bits_per_digit(alphabet);
  std::vector<unsigned> digits;
  for (std::size_t i = 0; i < codeword.size(); i += b) {
    unsigned d = 0;
    for (unsigned j = 0; j < b; ++j) d = (d << 1) | (i + j < codeword.size() ? codeword[i + j] : 0u);
    digits.push_back(d);
  }
  return encode_digits(text, digits, alphabet);
}

inline Bits extract_robust(std::u32string_view text, std::size_t payload_len, const Channel& channel, Codec codec) {
  const std::size_t n = encoded_length(payload_len + 8, codec);
  Bits codeword;
  if (const auto* pos = std::get_if<PositionalChannel>(&channel)) {
    codeword = decode_positional(text, n, pos->mark);
  } else {
    const auto& alphabet = std::get<CodepointAlphabet>(channel);
    const unsigned b = detail::bits_per_digit(alphabet);
    const Message m = decode(text, alphabet);
    const std::size_t need = (n + b - 1) / b;
    if (m.k() < need) throw InsufficientPositions(need, m.k());
    for (std::size_t i = 0; i < need; ++i) {
      for (int j = static_cast<int>(b) - 1; j >= 0; --j) codeword.push_back((m.digits[i] >> j) & 1);
    }
    codeword.resize(n);
  }
  Bits msg = ecc::decode(codeword, codec);
  msg.resize(payload_len + 8);
  Bits payload(msg.begin(), msg.begin() + static_cast<std::ptrdiff_t>(payload_len));
  if (detail::with_checksum(payload) != msg) {
    throw DecodeFailure("checksum mismatch: corruption exceeds the " + std::string(to_string(codec)) + " budget");
  }
  return payload;
}

}  // namespace stego
}  // namespace unimark
