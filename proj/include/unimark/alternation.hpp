#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "unimark/registry.hpp"
#include "unimark/utf8.hpp"

namespace unimark {

enum class Eligibility { cjk_variant, whitespace, ligature };

inline std::string_view to_string(Eligibility e) {
  switch (e) {
    case Eligibility::cjk_variant: return "cjk_variant";
    case Eligibility::whitespace: return "whitespace";
    case Eligibility::ligature: return "ligature";
  }
  return "?";
}

/// Every-other-occurrence marking. The first eligible occurrence is marked,
/// the second left alone, and so on.
struct AlternationScheme {
  Eligibility eligibility = Eligibility::whitespace;
  // whitespace eligibility only
  Scalar base = kSpace;
  Scalar mark = kThreePerEmSpace;
  std::size_t min_eligible = 4;
  double min_ratio = 0.8;
  std::shared_ptr<const VariantRegistry> registry = VariantRegistry::builtin();

  static AlternationScheme variantmark() { return {Eligibility::cjk_variant}; }
  static AlternationScheme printmark_whitespace() { return {Eligibility::whitespace}; }
  static AlternationScheme printmark_ligature() { return {Eligibility::ligature}; }

  void validate() const {
    if (min_eligible < 2) throw std::invalid_argument("min_eligible must be at least 2");
    if (!(min_ratio > 0.0 && min_ratio <= 1.0)) throw std::invalid_argument("min_ratio must lie in (0, 1]");
    if (eligibility == Eligibility::whitespace && (base == mark || !is_registry_whitespace(base) ||
                                                   !is_registry_whitespace(mark))) {
      throw std::invalid_argument("alternation base and mark must be distinct registered whitespace");
    }
    if (eligibility == Eligibility::cjk_variant && !registry) {
      throw std::invalid_argument("variant registry missing");
    }
  }
};

struct AlternationVerdict {
  std::size_t eligible_count = 0;
  std::size_t alternating_pairs = 0;
  double ratio = 0.0;
  bool detected = false;
};

/// One eligible site: [pos, pos+length) in the scanned text.
struct Occurrence {
  std::size_t pos;
  std::size_t length;
  bool marked;
};

namespace alternation {

/// Eligible occurrences left to right, with their current marked state.
inline std::vector<Occurrence> scan(std::u32string_view text, const AlternationScheme& scheme) {
  std::vector<Occurrence> out;
  const std::size_t n = text.size();
  switch (scheme.eligibility) {
    case Eligibility::whitespace:
      for (std::size_t i = 0; i < n; ++i) {
        if (text[i] == scheme.base || text[i] == scheme.mark) out.push_back({i, 1, text[i] == scheme.mark});
      }
      break;
    case Eligibility::cjk_variant:
      for (std::size_t i = 0; i < n; ++i) {
        if (!scheme.registry->preserving_selector(text[i])) continue;
        const bool selected = i + 1 < n && is_variation_selector(text[i + 1]);
        out.push_back({i, selected ? 2u : 1u, selected});
        if (selected) ++i;
      }
      break;
    case Eligibility::ligature:
      for (std::size_t i = 0; i < n;) {
        if (decompose_ligature(text[i])) {
          out.push_back({i, 1, true});
          ++i;
          continue;
        }
        bool matched = false;
        // ligature_map() is ordered longest first
        for (const auto& e : ligature_map()) {
          if (text.substr(i, e.plain.size()) == e.plain) {
            out.push_back({i, e.plain.size(), false});
            i += e.plain.size();
            matched = true;
            break;
          }
        }
        if (!matched) ++i;
      }
      break;
  }
  return out;
}

inline Text apply_alternating(std::u32string_view text, const AlternationScheme& scheme) {
  scheme.validate();
  const auto occ = scan(text, scheme);
  Text out;
  out.reserve(text.size() + occ.size());
  std::size_t cursor = 0;
  for (std::size_t idx = 0; idx < occ.size(); ++idx) {
    const auto& o = occ[idx];
    out.append(text.substr(cursor, o.pos - cursor));
    cursor = o.pos;
    if (idx % 2 != 0 || o.marked) continue;
    switch (scheme.eligibility) {
      case Eligibility::whitespace:
        out.push_back(scheme.mark);
        break;
      case Eligibility::cjk_variant:
        out.push_back(text[o.pos]);
        out.push_back(*scheme.registry->preserving_selector(text[o.pos]));
        break;
      case Eligibility::ligature: {
        const std::u32string_view plain = text.substr(o.pos, o.length);
        for (const auto& e : ligature_map()) {
          if (e.plain == plain) out.push_back(e.ligature);
        }
        break;
      }
    }
    cursor = o.pos + o.length;
  }
  out.append(text.substr(cursor));
  return out;
}

inline Text apply_printmark_ligature(std::u32string_view text, const AlternationScheme& scheme) {
  if (scheme.eligibility != Eligibility::ligature) {
    throw std::invalid_argument("apply_printmark_ligature requires ligature eligibility");
  }
  return apply_alternating(text, scheme);
}

/// Verdict from the marked states of consecutive eligible occurrences.
inline AlternationVerdict verdict_from_states(const std::vector<bool>& states, const AlternationScheme& scheme) {
  AlternationVerdict v;
  v.eligible_count = states.size();
  for (std::size_t i = 1; i < states.size(); ++i) {
    if (states[i] != states[i - 1]) ++v.alternating_pairs;
  }
  const std::size_t denom = v.eligible_count > 1 ? v.eligible_count - 1 : 1;
  v.ratio = static_cast<double>(v.alternating_pairs) / static_cast<double>(denom);
  v.detected = v.eligible_count >= scheme.min_eligible && v.ratio >= scheme.min_ratio;
  return v;
}

inline AlternationVerdict detect_alternating(std::u32string_view text, const AlternationScheme& scheme) {
  scheme.validate();
  std::vector<bool> states;
  for (const auto& o : scan(text, scheme)) states.push_back(o.marked);
  return verdict_from_states(states, scheme);
}

inline Text strip_alternation(std::u32string_view text, const AlternationScheme& scheme) {
  Text out;
  out.reserve(text.size());
  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Scalar c = text[i];
    switch (scheme.eligibility) {
      case Eligibility::whitespace:
        out.push_back(c == scheme.mark ? scheme.base : c);
        break;
      case Eligibility::cjk_variant:
        out.push_back(c);
        if (scheme.registry->is_registered(c) && i + 1 < n && is_variation_selector(text[i + 1])) ++i;
        break;
      case Eligibility::ligature:
        if (auto plain = decompose_ligature(c)) out.append(*plain);
        else out.push_back(c);
        break;
    }
  }
  return out;
}

}  // namespace alternation
}  // namespace unimark
