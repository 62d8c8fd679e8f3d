#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "unimark/alternation.hpp"
#include "unimark/registry.hpp"
#include "unimark/whitemark.hpp"

namespace unimark {

/// Any apply/detect/strip watermark the toolkit ships.
using Scheme = std::variant<WhitemarkScheme, AlternationScheme>;

struct SchemeInfo {
  std::string_view name;
  std::string_view description;
};

inline constexpr SchemeInfo kSchemes[] = {
    {"whitemark", "replace every U+0020 with a mark whitespace (default U+2004)"},
    {"variantmark", "attach an appearance-preserving variation selector to every other registered CJK ideograph"},
    {"printmark-whitespace", "replace every other U+0020 with a three-per-em space"},
    {"printmark-ligature", "ligate every other ff/fi/fl/ffi/ffl"},
};

struct SchemeOptions {
  std::optional<Scalar> base;
  std::optional<Scalar> mark;
  std::optional<std::size_t> min_eligible;
  std::optional<double> min_ratio;
  std::shared_ptr<const VariantRegistry> registry;
};

inline Scheme make_scheme(std::string_view name, const SchemeOptions& opt = {}) {
  if (name == "whitemark") {
    WhitemarkScheme s;
    if (opt.base) s.base = *opt.base;
    if (opt.mark) s.mark = *opt.mark;
    s.validate();
    return s;
  }
  AlternationScheme s;
  if (name == "variantmark") s = AlternationScheme::variantmark();
  else if (name == "printmark-whitespace") s = AlternationScheme::printmark_whitespace();
  else if (name == "printmark-ligature") s = AlternationScheme::printmark_ligature();
  else throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
  if (opt.base) s.base = *opt.base;
  if (opt.mark) s.mark = *opt.mark;
  if (opt.min_eligible) s.min_eligible = *opt.min_eligible;
  if (opt.min_ratio) s.min_ratio = *opt.min_ratio;
  if (opt.registry) s.registry = opt.registry;
  s.validate();
  return s;
}

inline std::string describe(const Scheme& scheme) {
  if (const auto* w = std::get_if<WhitemarkScheme>(&scheme)) {
    return "whitemark(" + format_codepoint(w->base) + "->" + format_codepoint(w->mark) + ")";
  }
  const auto& a = std::get<AlternationScheme>(scheme);
  switch (a.eligibility) {
    case Eligibility::cjk_variant: return "variantmark";
    case Eligibility::whitespace:
      return "printmark-whitespace(" + format_codepoint(a.base) + "/" + format_codepoint(a.mark) + ")";
    case Eligibility::ligature: return "printmark-ligature";
  }
  return "?";
}

inline Text apply_scheme(std::u32string_view text, const Scheme& scheme) {
  if (const auto* w = std::get_if<WhitemarkScheme>(&scheme)) return whitemark::apply(text, *w);
  return alternation::apply_alternating(text, std::get<AlternationScheme>(scheme));
}

inline Text strip_scheme(std::u32string_view text, const Scheme& scheme) {
  if (const auto* w = std::get_if<WhitemarkScheme>(&scheme)) return whitemark::strip(text, *w);
  return alternation::strip_alternation(text, std::get<AlternationScheme>(scheme));
}

inline bool is_detected(std::u32string_view text, const Scheme& scheme) {
  if (const auto* w = std::get_if<WhitemarkScheme>(&scheme)) return whitemark::detect(text, *w).detected;
  return alternation::detect_alternating(text, std::get<AlternationScheme>(scheme)).detected;
}

/// Whether a text already carries the scheme's marked form somewhere.
inline bool contains_marked_form(std::u32string_view text, const Scheme& scheme) {
  if (const auto* w = std::get_if<WhitemarkScheme>(&scheme)) return whitemark::detect(text, *w).mark_count > 0;
  for (const auto& o : alternation::scan(text, std::get<AlternationScheme>(scheme))) {
    if (o.marked) return true;
  }
  return false;
}

/// Whether the scheme has anything to mark in this text.
inline bool has_capacity(std::u32string_view text, const Scheme& scheme) {
  if (const auto* w = std::get_if<WhitemarkScheme>(&scheme)) return whitemark::detect(text, *w).base_count > 0;
  const auto& a = std::get<AlternationScheme>(scheme);
  return alternation::scan(text, a).size() >= a.min_eligible;
}

}  // namespace unimark
