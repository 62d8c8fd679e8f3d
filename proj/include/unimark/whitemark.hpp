#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>

#include "unimark/registry.hpp"
#include "unimark/utf8.hpp"

namespace unimark {

/// Replace-all whitespace watermark: every `base` becomes `mark`.
struct WhitemarkScheme {
  Scalar base = kSpace;
  Scalar mark = kThreePerEmSpace;

  void validate() const {
    if (base == mark) throw std::invalid_argument("whitemark base and mark must differ");
    if (!is_registry_whitespace(base) || !is_registry_whitespace(mark)) {
      throw std::invalid_argument("whitemark base and mark must be registered whitespace codepoints");
    }
  }
};

struct Verdict {
  bool detected = false;
  std::size_t mark_count = 0;
  std::size_t base_count = 0;
};

namespace whitemark {

inline Text apply(std::u32string_view text, const WhitemarkScheme& scheme = {}) {
  Text out(text);
  std::replace(out.begin(), out.end(), scheme.base, scheme.mark);
  return out;
}

/// Presence test: one mark codepoint is enough.
inline Verdict detect(std::u32string_view text, const WhitemarkScheme& scheme = {}) {
  Verdict v;
  for (Scalar c : text) {
    if (c == scheme.mark) ++v.mark_count;
    else if (c == scheme.base) ++v.base_count;
  }
  v.detected = v.mark_count >= 1;
  return v;
}

/// The normalizing attack: every mark back to base.
inline Text strip(std::u32string_view text, const WhitemarkScheme& scheme = {}) {
  Text out(text);
  std::replace(out.begin(), out.end(), scheme.mark, scheme.base);
  return out;
}

}  // namespace whitemark
}  // namespace unimark
