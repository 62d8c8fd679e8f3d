#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace unimark {

/// One bit per element, values 0 or 1.
using Bits = std::vector<std::uint8_t>;

inline Bits parse_bits(std::string_view s) {
  Bits out;
  out.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("bit string may only contain '0' and '1'");
    out.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return out;
}

inline std::string format_bits(const Bits& bits) {
  std::string out;
  out.reserve(bits.size());
  for (auto b : bits) out.push_back(b ? '1' : '0');
  return out;
}

class BlockLengthError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Codec { none, repetition3, hamming74 };

inline std::string_view to_string(Codec c) {
  switch (c) {
    case Codec::none: return "none";
    case Codec::repetition3: return "repetition3";
    case Codec::hamming74: return "hamming74";
  }
  return "?";
}

inline Codec parse_codec(std::string_view name) {
  if (name == "none") return Codec::none;
  if (name == "repetition3") return Codec::repetition3;
  if (name == "hamming74") return Codec::hamming74;
  throw std::invalid_argument("unknown codec '" + std::string(name) + "'");
}

struct BlockShape {
  std::size_t data;
  std::size_t code;
};

inline constexpr BlockShape block_shape(Codec c) {
  switch (c) {
    case Codec::none: return {1, 1};
    case Codec::repetition3: return {1, 3};
    case Codec::hamming74: return {4, 7};
  }
  return {1, 1};
}

/// Codeword length for `n` payload bits (payload is zero-padded to whole blocks).
inline constexpr std::size_t encoded_length(std::size_t n, Codec c) {
  const auto s = block_shape(c);
  return (n + s.data - 1) / s.data * s.code;
}

namespace ecc {

// Hamming(7,4), positions 1..7 = p1 p2 d1 p3 d2 d3 d4.
inline void hamming74_encode_block(const std::uint8_t* d, std::uint8_t* out) {
  out[0] = d[0] ^ d[1] ^ d[3];
  out[1] = d[0] ^ d[2] ^ d[3];
  out[2] = d[0];
  out[3] = d[1] ^ d[2] ^ d[3];
  out[4] = d[1];
  out[5] = d[2];
  out[6] = d[3];
}

inline void hamming74_decode_block(const std::uint8_t* c, std::uint8_t* out) {
  std::uint8_t w[7];
  for (int i = 0; i < 7; ++i) w[i] = c[i];
  const int syndrome = (w[0] ^ w[2] ^ w[4] ^ w[6]) | ((w[1] ^ w[2] ^ w[5] ^ w[6]) << 1) |
                       ((w[3] ^ w[4] ^ w[5] ^ w[6]) << 2);
  if (syndrome != 0) w[syndrome - 1] ^= 1;
  out[0] = w[2];
  out[1] = w[4];
  out[2] = w[5];
  out[3] = w[6];
}

inline Bits encode(const Bits& bits, Codec codec) {
  const auto shape = block_shape(codec);
  Bits padded = bits;
  padded.resize((bits.size() + shape.data - 1) / shape.data * shape.data, 0);
  Bits out;
  out.reserve(padded.size() / shape.data * shape.code);
  switch (codec) {
    case Codec::none:
      return padded;
    case Codec::repetition3:
      for (auto b : padded) out.insert(out.end(), 3, b);
      return out;
    case Codec::hamming74:
      out.resize(padded.size() / 4 * 7);
      for (std::size_t blk = 0; blk * 4 < padded.size(); ++blk) {
        hamming74_encode_block(&padded[blk * 4], &out[blk * 7]);
      }
      return out;
  }
  return out;
}

/// Corrects up to one flipped bit per block. Heavier corruption decodes to
/// a wrong block silently; callers needing detection add a checksum.
inline Bits decode(const Bits& bits, Codec codec) {
  const auto shape = block_shape(codec);
  if (bits.size() % shape.code != 0) {
    throw BlockLengthError("codeword length " + std::to_string(bits.size()) + " is not a multiple of " +
                           std::to_string(shape.code) + " for " + std::string(to_string(codec)));
  }
  Bits out;
  switch (codec) {
    case Codec::none:
      return bits;
    case Codec::repetition3:
      out.reserve(bits.size() / 3);
      for (std::size_t i = 0; i < bits.size(); i += 3) {
        out.push_back((bits[i] + bits[i + 1] + bits[i + 2]) >= 2 ? 1 : 0);
      }
      return out;
    case Codec::hamming74:
      out.resize(bits.size() / 7 * 4);
      for (std::size_t blk = 0; blk * 7 < bits.size(); ++blk) {
        hamming74_decode_block(&bits[blk * 7], &out[blk * 4]);
      }
      return out;
  }
  return out;
}

/// CRC-8 (poly x^8+x^2+x+1, init 0) over a bit sequence, MSB first.
inline std::uint8_t crc8(const Bits& bits) {
  std::uint8_t crc = 0;
  for (auto b : bits) {
    const bool feedback = ((crc >> 7) & 1) ^ (b & 1);
    crc = static_cast<std::uint8_t>(crc << 1);
    if (feedback) crc ^= 0x07;
  }
  return crc;
}

}  // namespace ecc
}  // namespace unimark
