#pragma once

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unimark/utf8.hpp"

namespace unimark {

inline constexpr Scalar kSpace = 0x0020;
inline constexpr Scalar kThreePerEmSpace = 0x2004;

struct WhitespaceEntry {
  Scalar codepoint;
  const char* name;
  bool no_break;
};

namespace detail {
// Order is part of the contract: it fixes digit positions of alphabets
// built by index. Append only.
inline constexpr WhitespaceEntry kWhitespaces[] = {
    {0x0020, "SPACE", false},
    {0x00A0, "NO-BREAK SPACE", true},
    {0x1680, "OGHAM SPACE MARK", false},
    {0x2000, "EN QUAD", false},
    {0x2001, "EM QUAD", false},
    {0x2002, "EN SPACE", false},
    {0x2003, "EM SPACE", false},
    {0x2004, "THREE-PER-EM SPACE", false},
    {0x2005, "FOUR-PER-EM SPACE", false},
    {0x2006, "SIX-PER-EM SPACE", false},
    {0x2007, "FIGURE SPACE", true},
    {0x2008, "PUNCTUATION SPACE", false},
    {0x2009, "THIN SPACE", false},
    {0x200A, "HAIR SPACE", false},
    {0x202F, "NARROW NO-BREAK SPACE", true},
    {0x205F, "MEDIUM MATHEMATICAL SPACE", false},
    {0x3000, "IDEOGRAPHIC SPACE", false},
};
}  // namespace detail

/// The space separators usable as marks or stego digits, U+0020 first.
inline std::span<const WhitespaceEntry> whitespace_codepoints() noexcept {
  return detail::kWhitespaces;
}

inline const WhitespaceEntry* find_whitespace(Scalar cp) noexcept {
  for (const auto& e : detail::kWhitespaces) {
    if (e.codepoint == cp) return &e;
  }
  return nullptr;
}

inline bool is_registry_whitespace(Scalar cp) noexcept { return find_whitespace(cp) != nullptr; }

inline constexpr bool is_variation_selector(Scalar cp) noexcept {
  return (cp >= 0xFE00 && cp <= 0xFE0F) || (cp >= 0xE0100 && cp <= 0xE01EF);
}

struct VariantSequence {
  Scalar base;
  std::optional<Scalar> selector;
  std::string renders_as;

  bool operator==(const VariantSequence&) const = default;
};

class RegistryFormatError : public std::runtime_error {
 public:
  RegistryFormatError(const std::string& what, std::size_t line)
      : std::runtime_error("registry line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Ideographic variation sequences known to keep (or change) a glyph.
/// Immutable once built; share it through shared_ptr<const>.
class VariantRegistry {
 public:
  /// U+9BD6 with its E0100/E0101/E0103 sequences, plus a few
  /// common Adobe-Japan1 IVD bases whose E0100 sequence is the default glyph.
  static std::shared_ptr<const VariantRegistry> builtin() {
    static const std::shared_ptr<const VariantRegistry> instance = [] {
      auto reg = std::make_shared<VariantRegistry>();
      reg->add({0x9BD6, std::nullopt, "standard"});
      reg->add({0x9BD6, 0xE0101, "standard"});
      reg->add({0x9BD6, 0xE0103, "standard"});
      reg->add({0x9BD6, 0xE0100, "alternate"});
      constexpr Scalar kSeedBases[] = {0x845B, 0x8FBB, 0x7947, 0x82A6, 0x9022,
                                       0x98F4, 0x9905, 0x79B0, 0x9061, 0x8B0E};
      for (Scalar base : kSeedBases) {
        reg->add({base, std::nullopt, "standard"});
        reg->add({base, 0xE0100, "standard"});
        reg->add({base, 0xE0101, "alternate"});
      }
      return std::shared_ptr<const VariantRegistry>(std::move(reg));
    }();
    return instance;
  }

  /// Builtin entries plus a JSON-lines extension file of
  /// {"base": "U+XXXX", "selector": "U+XXXXX" | null, "renders_as": "tag"}.
  static std::shared_ptr<const VariantRegistry> with_extension_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open registry file '" + path + "'");
    auto reg = std::make_shared<VariantRegistry>(*builtin());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      VariantSequence seq;
      try {
        const auto j = nlohmann::json::parse(line);
        seq.base = parse_codepoint(j.at("base").get<std::string>());
        if (j.contains("selector") && !j["selector"].is_null() && !j["selector"].get<std::string>().empty()) {
          seq.selector = parse_codepoint(j["selector"].get<std::string>());
        }
        seq.renders_as = j.at("renders_as").get<std::string>();
      } catch (const std::exception& e) {
        throw RegistryFormatError(e.what(), lineno);
      }
      if (seq.selector && !is_variation_selector(*seq.selector)) {
        throw RegistryFormatError(format_codepoint(*seq.selector) + " is not a variation selector", lineno);
      }
      if (seq.renders_as.empty()) throw RegistryFormatError("empty renders_as", lineno);
      reg->add(std::move(seq));
    }
    // A base listed only with selectors is assumed to render bare like its
    // first listed sequence.
    for (auto& [base, seqs] : reg->by_base_) {
      const bool has_bare = std::any_of(seqs.begin(), seqs.end(), [](const auto& s) { return !s.selector; });
      if (!has_bare) seqs.insert(seqs.begin(), VariantSequence{base, std::nullopt, seqs.front().renders_as});
    }
    return reg;
  }

  /// Builtin registry, extended by $UNIMARK_REGISTRY when set.
  static std::shared_ptr<const VariantRegistry> from_environment() {
    if (const char* path = std::getenv("UNIMARK_REGISTRY"); path && *path) return with_extension_file(path);
    return builtin();
  }

  /// Empty when the base is unregistered.
  std::vector<VariantSequence> variant_sequences(Scalar base) const {
    auto it = by_base_.find(base);
    return it == by_base_.end() ? std::vector<VariantSequence>{} : it->second;
  }

  bool is_registered(Scalar base) const { return by_base_.count(base) != 0; }

  /// First registered selector rendering like the bare base.
  std::optional<Scalar> preserving_selector(Scalar base) const {
    auto it = by_base_.find(base);
    if (it == by_base_.end()) return std::nullopt;
    const VariantSequence* bare = nullptr;
    for (const auto& s : it->second) {
      if (!s.selector) bare = &s;
    }
    if (!bare) return std::nullopt;
    for (const auto& s : it->second) {
      if (s.selector && s.renders_as == bare->renders_as) return s.selector;
    }
    return std::nullopt;
  }

  std::vector<Scalar> bases() const {
    std::vector<Scalar> out;
    for (const auto& [base, _] : by_base_) out.push_back(base);
    return out;
  }

  void add(VariantSequence seq) {
    auto& seqs = by_base_[seq.base];
    auto same = [&](const VariantSequence& s) { return s.selector == seq.selector; };
    if (auto it = std::find_if(seqs.begin(), seqs.end(), same); it != seqs.end()) {
      *it = std::move(seq);
    } else {
      seqs.push_back(std::move(seq));
    }
  }

 private:
  std::map<Scalar, std::vector<VariantSequence>> by_base_;
};

struct LigatureEntry {
  std::u32string plain;
  Scalar ligature;
};

/// Latin f-ligatures from the Alphabetic Presentation Forms block,
/// longest plain form first so a left-to-right scan can take the first hit.
inline const std::vector<LigatureEntry>& ligature_map() {
  static const std::vector<LigatureEntry> entries = {
      {U"ffi", 0xFB03}, {U"ffl", 0xFB04}, {U"ff", 0xFB00}, {U"fi", 0xFB01}, {U"fl", 0xFB02},
  };
  return entries;
}

/// Compatibility decomposition restricted to the registered ligatures.
inline std::optional<std::u32string> decompose_ligature(Scalar cp) {
  for (const auto& e : ligature_map()) {
    if (e.ligature == cp) return e.plain;
  }
  return std::nullopt;
}

}  // namespace unimark
