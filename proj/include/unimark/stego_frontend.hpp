#pragma once

// Payload handling shared by the CLI and the HTTP service.

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "unimark/ecc.hpp"
#include "unimark/stego.hpp"

namespace unimark::stego {

/// "0x1f" is hex (four bits per digit, leading zeros kept); anything else must
/// be a 0/1 string.
inline Bits parse_payload(std::string_view s) {
  if (s.size() >= 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.remove_prefix(2);
    if (s.empty()) throw std::invalid_argument("empty hex payload");
    Bits out;
    for (char c : s) {
      int v;
      if (c >= '0' && c <= '9') v = c - '0';
      else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
      else throw std::invalid_argument("payload is not valid hex");
      for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((v >> i) & 1));
    }
    return out;
  }
  if (s.empty()) throw std::invalid_argument("empty payload");
  return parse_bits(s);
}

inline BigUint bits_value(const Bits& bits) {
  BigUint v = 0;
  for (auto b : bits) v = v * 2 + b;
  return v;
}

inline std::string hex_string(const BigUint& v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

/// Where and how a payload is written.
///
/// Without an alphabet the positional profile is used (plain space = 0,
/// mark = 1). With an alphabet and codec none, the payload is read as an
/// integer and written as its p-ary digits; with a codec, the robust route
/// (checksum + ECC) is used.
struct StegoPlan {
  std::optional<CodepointAlphabet> alphabet;
  Scalar mark = kThreePerEmSpace;
  Codec codec = Codec::none;

  Channel channel() const {
    if (alphabet) return *alphabet;
    return PositionalChannel{mark};
  }
};

struct EmbedResult {
  Text text;
  std::size_t positions_used = 0;
};

inline EmbedResult embed_payload(std::u32string_view text, const Bits& payload, const StegoPlan& plan) {
  EmbedResult r;
  if (plan.codec != Codec::none) {
    r.text = embed_robust(text, payload, plan.channel(), plan.codec);
  } else if (plan.alphabet) {
    const Message m = make_message(bits_value(payload), plan.alphabet->radix());
    r.text = encode(text, m, *plan.alphabet);
    r.positions_used = m.k();
    return r;
  } else {
    r.text = encode_positional(text, payload, plan.mark);
    r.positions_used = payload.size();
    return r;
  }
  // robust route: count the positions actually rewritten
  const std::size_t bits = encoded_length(payload.size() + 8, plan.codec);
  if (plan.alphabet) {
    const unsigned b = detail::bits_per_digit(*plan.alphabet);
    r.positions_used = (bits + b - 1) / b;
  } else {
    r.positions_used = bits;
  }
  return r;
}

struct ExtractResult {
  std::optional<Bits> bits;      // positional and robust routes
  std::optional<Message> message;  // p-ary route without a codec
};

/// `n_bits` is required except on the plain p-ary route, which reads every
/// alphabet scalar in the text.
inline ExtractResult extract_payload(std::u32string_view text, std::optional<std::size_t> n_bits,
                                     const StegoPlan& plan) {
  ExtractResult r;
  if (plan.codec == Codec::none && plan.alphabet) {
    r.message = decode(text, *plan.alphabet);
    return r;
  }
  if (!n_bits) throw std::invalid_argument("payload length in bits is required for this channel");
  if (plan.codec == Codec::none) r.bits = decode_positional(text, *n_bits, plan.mark);
  else r.bits = extract_robust(text, *n_bits, plan.channel(), plan.codec);
  return r;
}

inline nlohmann::json to_json(const ExtractResult& r) {
  nlohmann::json j;
  if (r.bits) {
    j["bits"] = format_bits(*r.bits);
    j["value"] = bits_value(*r.bits).str();
    j["hex"] = hex_string(bits_value(*r.bits));
  }
  if (r.message) {
    j["value"] = r.message->value().str();
    j["hex"] = hex_string(r.message->value());
    j["digits"] = r.message->digits;
    j["radix"] = r.message->radix;
  }
  return j;
}

}  // namespace unimark::stego
