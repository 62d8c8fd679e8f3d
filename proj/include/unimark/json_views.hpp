#pragma once

// JSON renderings shared by the CLI and the HTTP service.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unimark/registry.hpp"
#include "unimark/scheme.hpp"
#include "unimark/stego_frontend.hpp"
#include "unimark/utf8.hpp"

namespace unimark::service {

struct Annotation {
  std::size_t offset;
  std::size_t length;
  Scalar codepoint;
  std::string kind;
};

inline nlohmann::json to_json(const std::vector<Annotation>& as) {
  auto out = nlohmann::json::array();
  for (const auto& a : as) {
    out.push_back({{"offset", a.offset}, {"length", a.length}, {"codepoint", format_codepoint(a.codepoint)},
                   {"kind", a.kind}});
  }
  return out;
}

/// Scalar-indexed spans of every watermark-bearing codepoint in `text`.
inline std::vector<Annotation> annotate(std::u32string_view text, const Scheme& scheme) {
  std::vector<Annotation> out;
  if (const auto* w = std::get_if<WhitemarkScheme>(&scheme)) {
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == w->mark) out.push_back({i, 1, text[i], "mark"});
    }
    return out;
  }
  const auto& a = std::get<AlternationScheme>(scheme);
  for (const auto& o : alternation::scan(text, a)) {
    if (!o.marked) continue;
    switch (a.eligibility) {
      case Eligibility::whitespace: out.push_back({o.pos, 1, text[o.pos], "mark"}); break;
      case Eligibility::cjk_variant: out.push_back({o.pos + 1, 1, text[o.pos + 1], "selector"}); break;
      case Eligibility::ligature: out.push_back({o.pos, 1, text[o.pos], "ligature"}); break;
    }
  }
  return out;
}

inline std::vector<Annotation> annotate_stego(std::u32string_view text, const stego::StegoPlan& plan) {
  std::vector<Annotation> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (plan.alphabet ? plan.alphabet->digit_of(text[i]) >= 0 : text[i] == plan.mark) {
      out.push_back({i, 1, text[i], plan.alphabet ? "digit" : "mark"});
    }
  }
  return out;
}

inline nlohmann::json verdict_json(std::u32string_view text, const Scheme& scheme) {
  if (const auto* w = std::get_if<WhitemarkScheme>(&scheme)) {
    const auto v = whitemark::detect(text, *w);
    return {{"detected", v.detected}, {"mark_count", v.mark_count}, {"base_count", v.base_count}};
  }
  const auto v = alternation::detect_alternating(text, std::get<AlternationScheme>(scheme));
  return {{"detected", v.detected},
          {"eligible_count", v.eligible_count},
          {"alternating_pairs", v.alternating_pairs},
          {"ratio", v.ratio}};
}

inline nlohmann::json schemes_json(const VariantRegistry& registry) {
  nlohmann::json j;
  j["schemes"] = nlohmann::json::array();
  for (const auto& s : kSchemes) j["schemes"].push_back({{"name", s.name}, {"description", s.description}});
  j["whitespaces"] = nlohmann::json::array();
  for (const auto& w : whitespace_codepoints()) {
    j["whitespaces"].push_back({{"codepoint", format_codepoint(w.codepoint)}, {"name", w.name}, {"no_break", w.no_break}});
  }
  j["ligatures"] = nlohmann::json::array();
  for (const auto& l : ligature_map()) {
    j["ligatures"].push_back({{"plain", encode_utf8(l.plain)}, {"ligature", format_codepoint(l.ligature)}});
  }
  j["variant_sequences"] = nlohmann::json::array();
  for (Scalar base : registry.bases()) {
    for (const auto& v : registry.variant_sequences(base)) {
      j["variant_sequences"].push_back({{"base", format_codepoint(v.base)},
                                        {"selector", v.selector ? nlohmann::json(format_codepoint(*v.selector)) : nlohmann::json()},
                                        {"renders_as", v.renders_as}});
    }
  }
  return j;
}

}  // namespace unimark::service
