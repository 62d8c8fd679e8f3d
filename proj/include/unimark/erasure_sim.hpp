#pragma once

// Exact, enumerable model of watermark erasure on finite text spaces.
//
// A setup fixes a finite text space with a metric, a distribution over
// conditions (prompts), a generator f, a watermarker g, a loss and a
// detector. Two universal erasers are provided:
//   - erase_nearest: map a text to the nearest point of the support of the
//     unwatermarked output. Needs only the support and the metric.
//   - erase_posterior: resample from Pr[X = . | X_k = x]. Needs the law of
//     the watermarked output as well.
// All probabilities are exact rationals; infinite losses and distances are
// represented explicitly.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

namespace unimark::erasure {

using Rational = boost::multiprecision::cpp_rational;

/// Non-negative-or-finite rational, or +infinity.
class ExtReal {
 public:
  ExtReal() = default;
  ExtReal(Rational v) : value_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  ExtReal(long long v) : value_(v) {}             // NOLINT(google-explicit-constructor)

  static ExtReal infinity() {
    ExtReal r;
    r.inf_ = true;
    return r;
  }

  bool is_inf() const noexcept { return inf_; }
  const Rational& value() const {
    if (inf_) throw std::logic_error("value() of infinite ExtReal");
    return value_;
  }

  friend ExtReal operator+(const ExtReal& a, const ExtReal& b) {
    if (a.inf_ || b.inf_) return infinity();
    return ExtReal(a.value_ + b.value_);
  }
  friend ExtReal operator*(const Rational& w, const ExtReal& a) {
    if (a.inf_) {
      if (w == 0) return ExtReal(0);
      if (w < 0) throw std::domain_error("negative weight on infinity");
      return infinity();
    }
    return ExtReal(w * a.value_);
  }
  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    return a.inf_ == b.inf_ && (a.inf_ || a.value_ == b.value_);
  }
  friend bool operator<(const ExtReal& a, const ExtReal& b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    return a.value_ < b.value_;
  }
  friend bool operator<=(const ExtReal& a, const ExtReal& b) { return !(b < a); }
  friend bool operator>(const ExtReal& a, const ExtReal& b) { return b < a; }

  std::string str() const { return inf_ ? "inf" : value_.str(); }

 private:
  Rational value_{0};
  bool inf_ = false;
};

inline Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty number");
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    const Rational num = parse_rational(s.substr(0, slash));
    const Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    return num / den;
  }
  std::string mantissa = s;
  long long exponent = 0;
  if (const auto e = s.find_first_of("eE"); e != std::string::npos) {
    mantissa = s.substr(0, e);
    exponent = std::stoll(s.substr(e + 1));
  }
  if (const auto dot = mantissa.find('.'); dot != std::string::npos) {
    exponent -= static_cast<long long>(mantissa.size() - dot - 1);
    mantissa.erase(dot, 1);
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
    negative = mantissa[0] == '-';
    mantissa.erase(0, 1);
  }
  // a leading 0 would make cpp_int read octal
  mantissa.erase(0, std::min(mantissa.find_first_not_of('0'), mantissa.size() - 1));
  if (mantissa.empty() || mantissa.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  Rational r{boost::multiprecision::cpp_int(mantissa)};
  if (negative) r = -r;
  const Rational ten{10};
  for (; exponent > 0; --exponent) r *= ten;
  for (; exponent < 0; ++exponent) r /= ten;
  return r;
}

inline ExtReal parse_ext_real(const nlohmann::json& j) {
  if (j.is_number_integer()) return ExtReal(Rational(j.get<long long>()));
  if (j.is_number_float()) return ExtReal(parse_rational(j.dump()));
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "Infinity") return ExtReal::infinity();
    return ExtReal(parse_rational(s));
  }
  throw std::invalid_argument("expected a number, a rational string or \"inf\"");
}

inline nlohmann::json to_json(const ExtReal& v) { return v.str(); }

using Distribution = std::vector<Rational>;

/// Named conditions the setup must satisfy; violations are reported by these.
enum class Condition {
  structure,            // shapes, indices, probabilities summing to one
  metric_axioms,        // identity, symmetry, triangle inequality
  lipschitz,            // |L(x,c) - L(x',c)| <= d(x,x')
  loss_finite,          // L(X, C) finite almost surely
  loss_gap,             // E[L(X_k,C) - L(X,C)] <= epsilon
  watermark_detection,  // Pr[Detect(X_k,k)] >= 1 - delta
  natural_detection,    // Pr[Detect(X,k) = False] = 1 (nearest) or >= 1 - delta (posterior)
  metric_closeness,     // E[d(X, X_k)] <= epsilon'
};

inline std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::structure: return "structure";
    case Condition::metric_axioms: return "metric-axioms";
    case Condition::lipschitz: return "lipschitz";
    case Condition::loss_finite: return "loss-finite";
    case Condition::loss_gap: return "loss-gap";
    case Condition::watermark_detection: return "watermark-detection";
    case Condition::natural_detection: return "natural-detection";
    case Condition::metric_closeness: return "metric-closeness";
  }
  return "?";
}

struct Violation {
  Condition condition;
  std::string detail;
};

class SetupInvalid : public std::runtime_error {
 public:
  explicit SetupInvalid(std::vector<Violation> violations)
      : std::runtime_error(summarize(violations)), violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  static std::string summarize(const std::vector<Violation>& vs) {
    std::string s = "setup invalid:";
    for (const auto& v : vs) s += " [" + std::string(to_string(v.condition)) + "] " + v.detail + ";";
    return s;
  }
  std::vector<Violation> violations_;
};

class UndefinedConditional : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Mode { nearest, posterior, exhaustive };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::nearest: return "nearest";
    case Mode::posterior: return "posterior";
    case Mode::exhaustive: return "exhaustive";
  }
  return "?";
}

using TextId = std::size_t;

/// Finite text space. Ties in argmin break toward the lexicographically
/// smallest text name.
struct TextSpace {
  std::vector<std::string> texts;
  std::vector<std::vector<ExtReal>> metric;

  std::size_t size() const noexcept { return texts.size(); }
  const ExtReal& d(TextId a, TextId b) const { return metric[a][b]; }

  std::vector<Violation> check_metric() const {
    std::vector<Violation> out;
    const std::size_t n = size();
    if (metric.size() != n) return {{Condition::structure, "metric must be a " + std::to_string(n) + "x" +
                                                               std::to_string(n) + " matrix"}};
    for (const auto& row : metric) {
      if (row.size() != n) return {{Condition::structure, "metric rows must have " + std::to_string(n) + " entries"}};
    }
    for (TextId a = 0; a < n; ++a) {
      if (!(d(a, a) == ExtReal(0))) out.push_back({Condition::metric_axioms, "d(" + texts[a] + "," + texts[a] + ") != 0"});
      for (TextId b = 0; b < n; ++b) {
        if (!d(a, b).is_inf() && d(a, b).value() < 0) {
          out.push_back({Condition::metric_axioms, "negative distance d(" + texts[a] + "," + texts[b] + ")"});
        }
        if (a != b && d(a, b) == ExtReal(0)) {
          out.push_back({Condition::metric_axioms, "d(" + texts[a] + "," + texts[b] + ") = 0 for distinct texts"});
        }
        if (!(d(a, b) == d(b, a))) {
          out.push_back({Condition::metric_axioms, "d(" + texts[a] + "," + texts[b] + ") is not symmetric"});
        }
        for (TextId c = 0; c < n; ++c) {
          if (d(a, b) + d(b, c) < d(a, c)) {
            out.push_back({Condition::metric_axioms,
                           "triangle inequality fails on (" + texts[a] + "," + texts[b] + "," + texts[c] + ")"});
          }
        }
      }
    }
    return out;
  }
};

struct LipschitzWitness {
  TextId x;
  TextId x_prime;
  std::size_t condition;
};

struct LipschitzResult {
  bool ok = true;
  std::optional<LipschitzWitness> witness;
};

/// loss[x][c]. A pair where exactly one loss is infinite violates unless the
/// distance is infinite too; two infinite losses are treated as equal.
inline LipschitzResult check_lipschitz(const std::vector<std::vector<ExtReal>>& loss, const TextSpace& space,
                                       std::size_t n_conditions) {
  for (std::size_t c = 0; c < n_conditions; ++c) {
    for (TextId a = 0; a < space.size(); ++a) {
      for (TextId b = a + 1; b < space.size(); ++b) {
        const ExtReal& la = loss[a][c];
        const ExtReal& lb = loss[b][c];
        const ExtReal& dist = space.d(a, b);
        bool ok;
        if (la.is_inf() && lb.is_inf()) ok = true;
        else if (la.is_inf() || lb.is_inf()) ok = dist.is_inf();
        else ok = dist.is_inf() || abs(la.value() - lb.value()) <= dist.value();
        if (!ok) return {false, LipschitzWitness{a, b, c}};
      }
    }
  }
  return {};
}

struct ErasureSetup {
  TextSpace space;
  std::vector<std::string> conditions;
  Distribution condition_prob;
  std::vector<std::string> keys;
  std::vector<TextId> f;                          // [condition]
  std::vector<std::vector<TextId>> g;             // [condition][key]
  std::vector<std::vector<ExtReal>> loss;         // [text][condition]
  std::vector<std::vector<bool>> detect;          // [text][key]
  Rational epsilon{0};
  Rational epsilon_prime{0};
  Rational delta{0};
  Mode mode = Mode::nearest;

  std::size_t n_texts() const noexcept { return space.size(); }
  std::size_t n_conditions() const noexcept { return conditions.size(); }
  std::size_t n_keys() const noexcept { return keys.size(); }
};

// ---------------------------------------------------------------------------
// Laws

/// Law of X = f(C).
inline Distribution law_of_generated(const ErasureSetup& s) {
  Distribution p(s.n_texts(), Rational(0));
  for (std::size_t c = 0; c < s.n_conditions(); ++c) p[s.f[c]] += s.condition_prob[c];
  return p;
}

/// Law of X_k = g(C, k).
inline Distribution law_of_watermarked(const ErasureSetup& s, std::size_t key) {
  Distribution p(s.n_texts(), Rational(0));
  for (std::size_t c = 0; c < s.n_conditions(); ++c) p[s.g[c][key]] += s.condition_prob[c];
  return p;
}

/// Texts with positive probability under f, in index order.
inline std::vector<TextId> support_of(const ErasureSetup& s) {
  const auto p = law_of_generated(s);
  std::vector<TextId> out;
  for (TextId x = 0; x < p.size(); ++x) {
    if (p[x] > 0) out.push_back(x);
  }
  return out;
}

inline Rational total_variation(const Distribution& a, const Distribution& b) {
  Rational sum{0};
  for (std::size_t i = 0; i < a.size(); ++i) sum += abs(a[i] - b[i]);
  return sum / 2;
}

// ---------------------------------------------------------------------------
// Erasers

/// Nearest support point of x. Takes no detector, key or watermarker: the
/// map depends on (x, support, metric) alone.
inline TextId erase_nearest(TextId x, std::span<const TextId> support, const TextSpace& space) {
  if (support.empty()) throw std::invalid_argument("erase_nearest: empty support");
  TextId best = support.front();
  for (TextId cand : support) {
    const ExtReal& dc = space.d(x, cand);
    const ExtReal& db = space.d(x, best);
    if (dc < db || (dc == db && space.texts[cand] < space.texts[best])) best = cand;
  }
  return best;
}

/// Pr[Erase_q(x) = x'] = Pr[X = x' | X_k = x], exact.
inline Distribution erase_posterior(TextId x, const ErasureSetup& s, std::size_t key) {
  Distribution joint(s.n_texts(), Rational(0));
  Rational marginal{0};
  for (std::size_t c = 0; c < s.n_conditions(); ++c) {
    if (s.g[c][key] != x) continue;
    joint[s.f[c]] += s.condition_prob[c];
    marginal += s.condition_prob[c];
  }
  if (marginal == 0) {
    throw UndefinedConditional("Pr[X_k = " + s.space.texts[x] + "] = 0; the posterior eraser is undefined there");
  }
  for (auto& v : joint) v /= marginal;
  return joint;
}

/// Draws from an exact distribution with a seeded generator.
inline TextId sample(const Distribution& dist, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = u(rng);
  double acc = 0.0;
  TextId last = 0;
  for (TextId i = 0; i < dist.size(); ++i) {
    if (dist[i] == 0) continue;
    last = i;
    acc += static_cast<double>(dist[i]);
    if (r < acc) return i;
  }
  return last;
}

/// Exact law of Erase_q(X_k).
inline Distribution law_of_posterior_erasure(const ErasureSetup& s, std::size_t key) {
  const auto q = law_of_watermarked(s, key);
  Distribution out(s.n_texts(), Rational(0));
  for (TextId x = 0; x < q.size(); ++x) {
    if (q[x] == 0) continue;
    const auto post = erase_posterior(x, s, key);
    for (TextId y = 0; y < post.size(); ++y) out[y] += q[x] * post[y];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline std::vector<Violation> check_structure(const ErasureSetup& s) {
  std::vector<Violation> out;
  auto bad = [&](std::string msg) { out.push_back({Condition::structure, std::move(msg)}); };
  const std::size_t nx = s.n_texts(), nc = s.n_conditions(), nk = s.n_keys();
  if (nx == 0) bad("no texts");
  if (nc == 0) bad("no conditions");
  if (nk == 0) bad("no keys");
  if (s.condition_prob.size() != nc) bad("one probability per condition required");
  if (s.f.size() != nc) bad("f needs one entry per condition");
  if (s.g.size() != nc) bad("g needs one row per condition");
  if (s.loss.size() != nx) bad("loss needs one row per text");
  if (s.detect.size() != nx) bad("detect needs one row per text");
  if (!out.empty()) return out;
  Rational total{0};
  for (const auto& p : s.condition_prob) {
    if (p < 0) bad("negative condition probability");
    total += p;
  }
  if (total != 1) bad("condition probabilities sum to " + total.str() + ", not 1");
  for (std::size_t c = 0; c < nc; ++c) {
    if (s.f[c] >= nx) bad("f(" + s.conditions[c] + ") out of range");
    if (s.g[c].size() != nk) bad("g row for " + s.conditions[c] + " needs one entry per key");
    for (auto x : s.g[c]) {
      if (x >= nx) bad("g(" + s.conditions[c] + ", .) out of range");
    }
  }
  for (TextId x = 0; x < nx; ++x) {
    if (s.loss[x].size() != nc) bad("loss row for " + s.space.texts[x] + " needs one entry per condition");
    if (s.detect[x].size() != nk) bad("detect row for " + s.space.texts[x] + " needs one entry per key");
  }
  if (s.epsilon < 0 || s.epsilon_prime < 0) bad("epsilon and epsilon_prime must be non-negative");
  if (s.delta < 0 || s.delta > 1) bad("delta must lie in [0, 1]");
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (s.space.texts[i] == s.space.texts[j]) bad("duplicate text name '" + s.space.texts[i] + "'");
    }
  }
  return out;
}

}  // namespace detail

/// Expected loss gap E[L(X_k,C) - L(X,C)] for one key. L(X,C) must be finite a.s.
inline ExtReal expected_loss_gap(const ErasureSetup& s, std::size_t key) {
  ExtReal plus{0};
  Rational minus{0};
  for (std::size_t c = 0; c < s.n_conditions(); ++c) {
    const auto& p = s.condition_prob[c];
    plus = plus + p * s.loss[s.g[c][key]][c];
    if (p > 0) minus += p * s.loss[s.f[c]][c].value();
  }
  if (plus.is_inf()) return plus;
  return ExtReal(plus.value() - minus);
}

inline ExtReal expected_distance(const ErasureSetup& s, std::size_t key) {
  ExtReal sum{0};
  for (std::size_t c = 0; c < s.n_conditions(); ++c) {
    sum = sum + s.condition_prob[c] * s.space.d(s.f[c], s.g[c][key]);
  }
  return sum;
}

inline Rational pr_detect_generated(const ErasureSetup& s, std::size_t key) {
  Rational p{0};
  for (std::size_t c = 0; c < s.n_conditions(); ++c) {
    if (s.detect[s.f[c]][key]) p += s.condition_prob[c];
  }
  return p;
}

inline Rational pr_detect_watermarked(const ErasureSetup& s, std::size_t key) {
  Rational p{0};
  for (std::size_t c = 0; c < s.n_conditions(); ++c) {
    if (s.detect[s.g[c][key]][key]) p += s.condition_prob[c];
  }
  return p;
}

/// Every violated assumption for the given mode. Exhaustive mode only needs
/// a well-formed setup.
inline std::vector<Violation> validate(const ErasureSetup& s, Mode mode) {
  auto out = detail::check_structure(s);
  if (!out.empty()) return out;
  auto metric = s.space.check_metric();
  out.insert(out.end(), metric.begin(), metric.end());
  if (!out.empty() || mode == Mode::exhaustive) return out;

  if (auto lip = check_lipschitz(s.loss, s.space, s.n_conditions()); !lip.ok) {
    const auto& w = *lip.witness;
    out.push_back({Condition::lipschitz, "|L(" + s.space.texts[w.x] + "," + s.conditions[w.condition] + ") - L(" +
                                             s.space.texts[w.x_prime] + "," + s.conditions[w.condition] +
                                             ")| > d(" + s.space.texts[w.x] + "," + s.space.texts[w.x_prime] + ")"});
  }
  for (std::size_t c = 0; c < s.n_conditions(); ++c) {
    if (s.condition_prob[c] > 0 && s.loss[s.f[c]][c].is_inf()) {
      out.push_back({Condition::loss_finite, "L(f(" + s.conditions[c] + ")," + s.conditions[c] + ") is infinite"});
    }
  }
  if (!out.empty()) return out;

  const Rational one_minus_delta = Rational(1) - s.delta;
  for (std::size_t k = 0; k < s.n_keys(); ++k) {
    const std::string key = " (key " + s.keys[k] + ")";
    if (const auto gap = expected_loss_gap(s, k); gap > ExtReal(s.epsilon)) {
      out.push_back({Condition::loss_gap, "E[L(X_k,C) - L(X,C)] = " + gap.str() + " > epsilon = " +
                                              s.epsilon.str() + key});
    }
    if (const auto p = pr_detect_watermarked(s, k); p < one_minus_delta) {
      out.push_back({Condition::watermark_detection,
                     "Pr[Detect(X_k,k)] = " + p.str() + " < 1 - delta = " + one_minus_delta.str() + key});
    }
    const Rational clean = Rational(1) - pr_detect_generated(s, k);
    if (mode == Mode::nearest && clean != 1) {
      out.push_back({Condition::natural_detection, "Pr[Detect(X,k) = False] = " + clean.str() + " != 1" + key});
    }
    if (mode == Mode::posterior && clean < one_minus_delta) {
      out.push_back({Condition::natural_detection, "Pr[Detect(X,k) = False] = " + clean.str() +
                                                       " < 1 - delta = " + one_minus_delta.str() + key});
    }
    if (const auto dist = expected_distance(s, k); dist > ExtReal(s.epsilon_prime)) {
      out.push_back({Condition::metric_closeness, "E[d(X, X_k)] = " + dist.str() + " > epsilon' = " +
                                                      s.epsilon_prime.str() + key});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiments

struct KeyOutcome {
  std::string key;
  Rational erase_success_prob{0};  // Pr[Detect(Erase(X_k),k) = False]
  ExtReal loss_excess{0};          // E[L(Erase(X_k),C) - L(X,C)]
  bool passed = false;
};

struct ErasureReport {
  Mode mode = Mode::nearest;
  Rational bound{0};  // epsilon + epsilon'
  std::vector<KeyOutcome> keys;
  bool passed = false;

  /// Worst case over keys.
  Rational erase_success_prob() const {
    Rational p{1};
    for (const auto& k : keys) p = std::min(p, k.erase_success_prob);
    return p;
  }
  ExtReal loss_excess() const {
    ExtReal m{0};
    bool first = true;
    for (const auto& k : keys) {
      if (first || m < k.loss_excess) m = k.loss_excess;
      first = false;
    }
    return m;
  }
};

/// Expected loss of the generated text, E[L(X,C)]; finite under validation.
inline Rational expected_generated_loss(const ErasureSetup& s) {
  Rational sum{0};
  for (std::size_t c = 0; c < s.n_conditions(); ++c) {
    if (s.condition_prob[c] > 0) sum += s.condition_prob[c] * s.loss[s.f[c]][c].value();
  }
  return sum;
}

/// Exact outcome of a randomized eraser given as Pr[Erase(x) = .] per text.
inline KeyOutcome evaluate_eraser(const ErasureSetup& s, std::size_t key,
                                  const std::vector<Distribution>& eraser) {
  KeyOutcome out;
  out.key = s.keys[key];
  ExtReal erased_loss{0};
  for (std::size_t c = 0; c < s.n_conditions(); ++c) {
    const Rational& pc = s.condition_prob[c];
    if (pc == 0) continue;
    const auto& law = eraser[s.g[c][key]];
    for (TextId y = 0; y < law.size(); ++y) {
      if (law[y] == 0) continue;
      if (!s.detect[y][key]) out.erase_success_prob += pc * law[y];
      erased_loss = erased_loss + (pc * law[y]) * s.loss[y][c];
    }
  }
  out.loss_excess = erased_loss.is_inf() ? erased_loss : ExtReal(erased_loss.value() - expected_generated_loss(s));
  return out;
}

inline ErasureReport run_experiment(const ErasureSetup& s, Mode mode) {
  if (mode == Mode::exhaustive) throw std::invalid_argument("use enumerate_erasers for exhaustive mode");
  if (auto v = validate(s, mode); !v.empty()) throw SetupInvalid(std::move(v));
  ErasureReport report;
  report.mode = mode;
  report.bound = s.epsilon + s.epsilon_prime;
  const auto support = support_of(s);
  report.passed = true;
  for (std::size_t k = 0; k < s.n_keys(); ++k) {
    std::vector<Distribution> eraser(s.n_texts(), Distribution(s.n_texts(), Rational(0)));
    const auto q = law_of_watermarked(s, k);
    for (TextId x = 0; x < s.n_texts(); ++x) {
      if (mode == Mode::nearest) {
        eraser[x][erase_nearest(x, support, s.space)] = 1;
      } else if (q[x] > 0) {
        eraser[x] = erase_posterior(x, s, k);
      }
    }
    auto outcome = evaluate_eraser(s, k, eraser);
    const bool detection_ok = mode == Mode::nearest ? outcome.erase_success_prob == 1
                                                    : outcome.erase_success_prob >= Rational(1) - s.delta;
    outcome.passed = detection_ok && outcome.loss_excess <= ExtReal(report.bound);
    report.passed = report.passed && outcome.passed;
    report.keys.push_back(std::move(outcome));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Counterexamples

struct EraserFailure {
  enum class Kind { infinite_loss, detected, loss_bound };
  Kind kind;
  std::string condition;  // empty unless tied to one condition
  std::string detail;
};

inline std::string_view to_string(EraserFailure::Kind k) {
  switch (k) {
    case EraserFailure::Kind::infinite_loss: return "infinite-loss";
    case EraserFailure::Kind::detected: return "detected";
    case EraserFailure::Kind::loss_bound: return "loss-bound";
  }
  return "?";
}

struct EraserCandidate {
  std::vector<std::pair<TextId, TextId>> assignment;  // (watermarked text, erased text)
  KeyOutcome outcome;
  std::vector<EraserFailure> failures;
};

struct ExhaustiveRecord {
  std::string key;
  std::vector<EraserCandidate> candidates;
  bool good_eraser_exists = false;
};

/// Every deterministic eraser, restricted to the support of X_k (values
/// elsewhere never matter), checked against Pr = 1 erasure and the loss bound.
inline std::vector<ExhaustiveRecord> enumerate_erasers(const ErasureSetup& s) {
  if (auto v = validate(s, Mode::exhaustive); !v.empty()) throw SetupInvalid(std::move(v));
  const Rational bound = s.epsilon + s.epsilon_prime;
  std::vector<ExhaustiveRecord> records;
  for (std::size_t k = 0; k < s.n_keys(); ++k) {
    ExhaustiveRecord rec;
    rec.key = s.keys[k];
    const auto q = law_of_watermarked(s, k);
    std::vector<TextId> domain;
    for (TextId x = 0; x < q.size(); ++x) {
      if (q[x] > 0) domain.push_back(x);
    }
    std::vector<TextId> choice(domain.size(), 0);
    while (true) {
      std::vector<Distribution> eraser(s.n_texts(), Distribution(s.n_texts(), Rational(0)));
      EraserCandidate cand;
      for (std::size_t i = 0; i < domain.size(); ++i) {
        eraser[domain[i]][choice[i]] = 1;
        cand.assignment.emplace_back(domain[i], choice[i]);
      }
      for (TextId x = 0; x < s.n_texts(); ++x) {
        if (q[x] == 0) eraser[x][x] = 1;
      }
      cand.outcome = evaluate_eraser(s, k, eraser);
      for (std::size_t c = 0; c < s.n_conditions(); ++c) {
        if (s.condition_prob[c] == 0) continue;
        const TextId wm = s.g[c][k];
        const TextId erased = choice[static_cast<std::size_t>(std::find(domain.begin(), domain.end(), wm) - domain.begin())];
        if (s.loss[erased][c].is_inf()) {
          cand.failures.push_back({EraserFailure::Kind::infinite_loss, s.conditions[c],
                                   "L(" + s.space.texts[erased] + "," + s.conditions[c] + ") = inf"});
        }
        if (s.detect[erased][k]) {
          cand.failures.push_back({EraserFailure::Kind::detected, s.conditions[c],
                                   "Detect(" + s.space.texts[erased] + "," + s.keys[k] + ") = True"});
        }
      }
      if (!cand.outcome.loss_excess.is_inf() && cand.outcome.loss_excess > ExtReal(bound)) {
        cand.failures.push_back({EraserFailure::Kind::loss_bound, "",
                                 "loss excess " + cand.outcome.loss_excess.str() + " > " + bound.str()});
      }
      cand.outcome.passed = cand.failures.empty();
      rec.good_eraser_exists = rec.good_eraser_exists || cand.outcome.passed;
      rec.candidates.push_back(std::move(cand));

      std::size_t pos = 0;
      while (pos < choice.size() && ++choice[pos] == s.n_texts()) choice[pos++] = 0;
      if (pos == choice.size()) break;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

/// The three-text multimodal counterexample: both conditions have a single
/// good answer, the watermarked text x3 is good for both but far from each.
inline ErasureSetup multimodal_counterexample() {
  ErasureSetup s;
  const auto inf = ExtReal::infinity();
  s.space.texts = {"x1", "x2", "x3"};
  s.space.metric = {{0, inf, inf}, {inf, 0, inf}, {inf, inf, 0}};
  s.conditions = {"c1", "c2"};
  s.condition_prob = {Rational(1, 2), Rational(1, 2)};
  s.keys = {"k"};
  s.f = {0, 1};
  s.g = {{2}, {2}};
  s.loss = {{0, inf}, {inf, 0}, {0, 0}};
  s.detect = {{false}, {false}, {true}};
  s.epsilon = 0;
  s.epsilon_prime = 1;
  s.delta = 0;
  s.mode = Mode::exhaustive;
  return s;
}

inline ExhaustiveRecord verify_counterexample_multimodal() {
  return enumerate_erasers(multimodal_counterexample()).front();
}

struct UniversalCase {
  TextId erase_of_zero;
  int case_number;                   // 1: Erase(0) = 0, 2: Erase(0) = i* != 0
  std::vector<TextId> detector_set;  // texts the adversarial detector flags
  Rational pr_detect_generated{0};   // Pr[Detect(X,k) = True]
  Rational pr_detect_watermarked{0}; // Pr[Detect(X_k,k) = True]
  Rational pr_detect_erased{0};      // Pr[Detect(Erase(X_k),k) = True]
  bool eraser_fails = false;
};

struct UniversalRecord {
  std::size_t n = 0;
  std::vector<UniversalCase> cases;
  bool all_fail = false;
};

/// Texts {0..n}, conditions {1..n} uniform, f(c) = c, zero loss.
/// Builds the setup that defeats a q-agnostic eraser with the given Erase(0).
inline ErasureSetup universal_counterexample(std::size_t n, TextId erase_of_zero) {
  if (n < 2) throw std::invalid_argument("universal counterexample needs n >= 2");
  if (erase_of_zero > n) throw std::invalid_argument("Erase(0) must lie in {0..n}");
  ErasureSetup s;
  for (std::size_t i = 0; i <= n; ++i) s.space.texts.push_back(std::to_string(i));
  s.space.metric.assign(n + 1, std::vector<ExtReal>(n + 1, ExtReal(0)));
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      s.space.metric[i][j] = ExtReal(Rational(static_cast<long long>(i > j ? i - j : j - i)));
    }
  }
  for (std::size_t c = 1; c <= n; ++c) {
    s.conditions.push_back(std::to_string(c));
    s.condition_prob.push_back(Rational(1, static_cast<long long>(n)));
    s.f.push_back(c);
    s.g.push_back({0});
  }
  s.keys = {"k"};
  s.loss.assign(n + 1, std::vector<ExtReal>(n, ExtReal(0)));
  s.detect.assign(n + 1, std::vector<bool>{false});
  s.detect[0][0] = true;
  s.detect[erase_of_zero][0] = true;
  s.mode = Mode::exhaustive;
  return s;
}

inline UniversalRecord verify_counterexample_universal(std::size_t n) {
  if (n < 2) throw std::invalid_argument("universal counterexample needs n >= 2");
  UniversalRecord rec;
  rec.n = n;
  rec.all_fail = true;
  for (TextId i = 0; i <= n; ++i) {
    const auto s = universal_counterexample(n, i);
    UniversalCase uc;
    uc.erase_of_zero = i;
    uc.case_number = i == 0 ? 1 : 2;
    for (TextId x = 0; x <= n; ++x) {
      if (s.detect[x][0]) uc.detector_set.push_back(x);
    }
    uc.pr_detect_generated = pr_detect_generated(s, 0);
    uc.pr_detect_watermarked = pr_detect_watermarked(s, 0);
    // X_k = 0 surely, so Erase(X_k) = Erase(0) = i surely.
    std::vector<Distribution> eraser(n + 1, Distribution(n + 1, Rational(0)));
    for (TextId x = 0; x <= n; ++x) eraser[x][x] = 1;
    eraser[0] = Distribution(n + 1, Rational(0));
    eraser[0][i] = 1;
    uc.pr_detect_erased = Rational(1) - evaluate_eraser(s, 0, eraser).erase_success_prob;
    uc.eraser_fails = uc.pr_detect_erased == 1;
    rec.all_fail = rec.all_fail && uc.eraser_fails;
    rec.cases.push_back(std::move(uc));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Setup files

struct UniversalRequest {
  std::size_t n;
};

using SetupDocument = std::variant<ErasureSetup, UniversalRequest>;

inline Mode parse_mode(const std::string& m) {
  if (m == "nearest") return Mode::nearest;
  if (m == "posterior") return Mode::posterior;
  if (m == "exhaustive") return Mode::exhaustive;
  throw std::invalid_argument("unknown mode '" + m + "'");
}

/// Declarative setup: {texts, metric, conditions:[{name,p}], keys, f, g,
/// loss, detect, epsilon, epsilon_prime, delta, mode}. f and g entries name
/// texts; loss is [text][condition]; detect is [text][key]. Numbers may be
/// JSON numbers, "a/b" strings or "inf". {"mode":"universal","n":N} requests
/// the q-agnostic counterexample family instead.
inline SetupDocument parse_setup(const nlohmann::json& j) {
  auto fail = [](const std::string& msg) { throw SetupInvalid({{Condition::structure, msg}}); };
  try {
    const std::string mode = j.value("mode", "nearest");
    if (mode == "universal") return UniversalRequest{j.at("n").get<std::size_t>()};
    ErasureSetup s;
    s.mode = parse_mode(mode);
    s.space.texts = j.at("texts").get<std::vector<std::string>>();
    auto text_index = [&](const nlohmann::json& name) -> TextId {
      const auto str = name.get<std::string>();
      auto it = std::find(s.space.texts.begin(), s.space.texts.end(), str);
      if (it == s.space.texts.end()) fail("unknown text '" + str + "'");
      return static_cast<TextId>(it - s.space.texts.begin());
    };
    for (const auto& row : j.at("metric")) {
      std::vector<ExtReal> r;
      for (const auto& v : row) r.push_back(parse_ext_real(v));
      s.space.metric.push_back(std::move(r));
    }
    for (const auto& c : j.at("conditions")) {
      s.conditions.push_back(c.at("name").get<std::string>());
      const auto p = parse_ext_real(c.at("p"));
      if (p.is_inf()) fail("infinite condition probability");
      s.condition_prob.push_back(p.value());
    }
    s.keys = j.at("keys").get<std::vector<std::string>>();
    for (const auto& x : j.at("f")) s.f.push_back(text_index(x));
    for (const auto& row : j.at("g")) {
      std::vector<TextId> r;
      for (const auto& x : row) r.push_back(text_index(x));
      s.g.push_back(std::move(r));
    }
    for (const auto& row : j.at("loss")) {
      std::vector<ExtReal> r;
      for (const auto& v : row) r.push_back(parse_ext_real(v));
      s.loss.push_back(std::move(r));
    }
    for (const auto& row : j.at("detect")) s.detect.push_back(row.get<std::vector<bool>>());
    s.epsilon = parse_ext_real(j.at("epsilon")).value();
    s.epsilon_prime = parse_ext_real(j.at("epsilon_prime")).value();
    s.delta = parse_ext_real(j.at("delta")).value();
    return s;
  } catch (const SetupInvalid&) {
    throw;
  } catch (const std::exception& e) {
    fail(e.what());
  }
  return UniversalRequest{0};  // unreachable
}

inline SetupDocument load_setup(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open setup file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw SetupInvalid({{Condition::structure, std::string("malformed JSON: ") + e.what()}});
  }
  return parse_setup(j);
}

inline nlohmann::json to_json(const ErasureSetup& s) {
  nlohmann::json j;
  j["texts"] = s.space.texts;
  j["metric"] = nlohmann::json::array();
  for (const auto& row : s.space.metric) {
    auto r = nlohmann::json::array();
    for (const auto& v : row) r.push_back(v.str());
    j["metric"].push_back(r);
  }
  j["conditions"] = nlohmann::json::array();
  for (std::size_t c = 0; c < s.n_conditions(); ++c) {
    j["conditions"].push_back({{"name", s.conditions[c]}, {"p", s.condition_prob[c].str()}});
  }
  j["keys"] = s.keys;
  j["f"] = nlohmann::json::array();
  for (auto x : s.f) j["f"].push_back(s.space.texts[x]);
  j["g"] = nlohmann::json::array();
  for (const auto& row : s.g) {
    auto r = nlohmann::json::array();
    for (auto x : row) r.push_back(s.space.texts[x]);
    j["g"].push_back(r);
  }
  j["loss"] = nlohmann::json::array();
  for (const auto& row : s.loss) {
    auto r = nlohmann::json::array();
    for (const auto& v : row) r.push_back(v.str());
    j["loss"].push_back(r);
  }
  j["detect"] = s.detect;
  j["epsilon"] = s.epsilon.str();
  j["epsilon_prime"] = s.epsilon_prime.str();
  j["delta"] = s.delta.str();
  j["mode"] = to_string(s.mode);
  return j;
}

// ---------------------------------------------------------------------------
// Report serialization

inline nlohmann::json to_json(const ErasureReport& r) {
  nlohmann::json j;
  j["mode"] = to_string(r.mode);
  j["erase_success_prob"] = r.erase_success_prob().str();
  j["loss_excess"] = r.loss_excess().str();
  j["bound"] = r.bound.str();
  j["passed"] = r.passed;
  j["keys"] = nlohmann::json::array();
  for (const auto& k : r.keys) {
    j["keys"].push_back({{"key", k.key},
                         {"erase_success_prob", k.erase_success_prob.str()},
                         {"loss_excess", k.loss_excess.str()},
                         {"passed", k.passed}});
  }
  return j;
}

inline nlohmann::json to_json(const ExhaustiveRecord& r, const TextSpace& space) {
  nlohmann::json j;
  j["key"] = r.key;
  j["good_eraser_exists"] = r.good_eraser_exists;
  j["candidates"] = nlohmann::json::array();
  for (const auto& c : r.candidates) {
    nlohmann::json cj;
    nlohmann::json assignment = nlohmann::json::object();
    for (const auto& [from, to] : c.assignment) assignment[space.texts[from]] = space.texts[to];
    cj["erase"] = assignment;
    cj["erase_success_prob"] = c.outcome.erase_success_prob.str();
    cj["loss_excess"] = c.outcome.loss_excess.str();
    cj["passed"] = c.outcome.passed;
    cj["failures"] = nlohmann::json::array();
    for (const auto& f : c.failures) {
      cj["failures"].push_back({{"kind", to_string(f.kind)}, {"condition", f.condition}, {"detail", f.detail}});
    }
    j["candidates"].push_back(cj);
  }
  return j;
}

inline nlohmann::json to_json(const UniversalRecord& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["all_fail"] = r.all_fail;
  j["cases"] = nlohmann::json::array();
  for (const auto& c : r.cases) {
    j["cases"].push_back({{"erase_of_zero", c.erase_of_zero},
                          {"case", c.case_number},
                          {"detector_set", c.detector_set},
                          {"pr_detect_generated", c.pr_detect_generated.str()},
                          {"pr_detect_watermarked", c.pr_detect_watermarked.str()},
                          {"pr_detect_erased", c.pr_detect_erased.str()},
                          {"eraser_fails", c.eraser_fails}});
  }
  return j;
}

inline nlohmann::json violations_to_json(const std::vector<Violation>& vs) {
  auto out = nlohmann::json::array();
  for (const auto& v : vs) out.push_back({{"condition", to_string(v.condition)}, {"detail", v.detail}});
  return out;
}

}  // namespace unimark::erasure
