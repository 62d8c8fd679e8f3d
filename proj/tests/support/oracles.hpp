#pragma once

// Independent reference computations. Nothing here calls into the code
// under test beyond plain data types.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "unimark/erasure_sim.hpp"

namespace oracle {

using unimark::erasure::ErasureSetup;
using unimark::erasure::ExtReal;
using unimark::erasure::Rational;

inline std::vector<unsigned> digits(std::uint64_t m, unsigned p) {
  std::vector<unsigned> rev;
  do {
    rev.push_back(static_cast<unsigned>(m % p));
    m /= p;
  } while (m != 0);
  return {rev.rbegin(), rev.rend()};
}

inline int popcount_pairs(std::uint32_t states, int n) {
  int pairs = 0;
  for (int i = 1; i < n; ++i) pairs += ((states >> i) & 1u) != ((states >> (i - 1)) & 1u);
  return pairs;
}

/// Exact Pr[detected] for n independently marked positions, each marked with
/// probability q, under "n >= min_eligible and pairs/(n-1) >= min_ratio".
inline double exact_null_detection(int n, double q, std::size_t min_eligible, double min_ratio) {
  if (static_cast<std::size_t>(n) < min_eligible) return 0.0;
  double total = 0.0;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    const int ones = __builtin_popcount(s);
    const double pairs = popcount_pairs(s, n);
    if (pairs / static_cast<double>(n - 1) + 1e-12 < min_ratio) continue;
    double pr = 1.0;
    for (int i = 0; i < ones; ++i) pr *= q;
    for (int i = ones; i < n; ++i) pr *= 1.0 - q;
    total += pr;
  }
  return total;
}

/// Minimum-distance decoding of one Hamming(7,4) block by brute force over
/// all 16 codewords built from the parity equations.
inline std::vector<std::uint8_t> hamming74_codeword(unsigned nibble) {
  const std::uint8_t d1 = (nibble >> 3) & 1, d2 = (nibble >> 2) & 1, d3 = (nibble >> 1) & 1, d4 = nibble & 1;
  return {static_cast<std::uint8_t>(d1 ^ d2 ^ d4), static_cast<std::uint8_t>(d1 ^ d3 ^ d4), d1,
          static_cast<std::uint8_t>(d2 ^ d3 ^ d4), d2, d3, d4};
}

inline unsigned hamming74_nearest(const std::vector<std::uint8_t>& block) {
  unsigned best = 0;
  int best_dist = 8;
  for (unsigned v = 0; v < 16; ++v) {
    const auto cw = hamming74_codeword(v);
    int dist = 0;
    for (int i = 0; i < 7; ++i) dist += cw[i] != block[i];
    if (dist < best_dist) best = v, best_dist = dist;
  }
  return best;
}

/// Nearest point of the support of f with ties to the smallest name, by a
/// full sort rather than a running minimum.
inline std::size_t nearest(const ErasureSetup& s, std::size_t x) {
  std::vector<std::size_t> support;
  for (std::size_t c = 0; c < s.conditions.size(); ++c) {
    if (s.condition_prob[c] > 0) support.push_back(s.f[c]);
  }
  std::sort(support.begin(), support.end(), [&](std::size_t a, std::size_t b) {
    const auto& da = s.space.metric[x][a];
    const auto& db = s.space.metric[x][b];
    if (da < db) return true;
    if (db < da) return false;
    return s.space.texts[a] < s.space.texts[b];
  });
  return support.front();
}

struct Outcome {
  Rational success{0};
  ExtReal excess{0};
};

/// Pr[Detect(Erase(X_k),k) = False] and E[L(Erase(X_k),C)] - E[L(X,C)] for
/// a deterministic eraser, summed condition by condition.
template <typename Eraser>
inline Outcome outcome(const ErasureSetup& s, std::size_t k, Eraser erase) {
  Outcome o;
  ExtReal erased{0};
  Rational clean{0};
  for (std::size_t c = 0; c < s.conditions.size(); ++c) {
    const Rational& p = s.condition_prob[c];
    if (p == 0) continue;
    const std::size_t y = erase(s.g[c][k]);
    if (!s.detect[y][k]) o.success += p;
    erased = erased + p * s.loss[y][c];
    clean += p * s.loss[s.f[c]][c].value();
  }
  o.excess = erased.is_inf() ? erased : ExtReal(erased.value() - clean);
  return o;
}

/// Pr[X = x' | X_k = x] by enumerating the joint law of (X, X_k).
inline std::vector<Rational> posterior(const ErasureSetup& s, std::size_t k, std::size_t x) {
  const std::size_t n = s.space.texts.size();
  std::vector<std::vector<Rational>> joint(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t c = 0; c < s.conditions.size(); ++c) joint[s.f[c]][s.g[c][k]] += s.condition_prob[c];
  Rational col{0};
  for (std::size_t a = 0; a < n; ++a) col += joint[a][x];
  std::vector<Rational> out(n, Rational(0));
  for (std::size_t a = 0; a < n; ++a) out[a] = joint[a][x] / col;
  return out;
}

/// Random setup that meets every assumption of the nearest-support guarantee.
///
/// Metric: shortest paths on a random connected graph with positive integer
/// weights. Loss: minimum of shifted distance functions, so 1-Lipschitz.
/// Detect: false on the support of f, random elsewhere. epsilon, epsilon'
/// and delta are set to the tightest values the setup satisfies.
inline ErasureSetup compliant_setup(std::mt19937_64& rng, bool posterior_mode = false) {
  using unimark::erasure::Mode;
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  ErasureSetup s;
  const int n = uni(2, 8);
  for (int i = 0; i < n; ++i) s.space.texts.push_back("t" + std::to_string(i));

  const long long kFar = 1'000'000;
  std::vector<std::vector<long long>> d(n, std::vector<long long>(n, kFar));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (int i = 1; i < n; ++i) {
    const int j = uni(0, i - 1);
    d[i][j] = d[j][i] = uni(1, 5);
  }
  for (int extra = uni(0, n); extra > 0; --extra) {
    const int a = uni(0, n - 1), b = uni(0, n - 1);
    if (a != b) d[a][b] = d[b][a] = std::min<long long>(d[a][b], uni(1, 5));
  }
  for (int m = 0; m < n; ++m)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) d[a][b] = std::min(d[a][b], d[a][m] + d[m][b]);
  s.space.metric.assign(n, std::vector<ExtReal>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) s.space.metric[a][b] = ExtReal(d[a][b]);

  const int nc = uni(1, 4);
  std::vector<int> weights(nc);
  int total = 0;
  for (auto& w : weights) total += (w = uni(1, 6));
  for (int c = 0; c < nc; ++c) {
    s.conditions.push_back("c" + std::to_string(c));
    s.condition_prob.push_back(Rational(weights[c], total));
    s.f.push_back(static_cast<std::size_t>(uni(0, n - 1)));
  }
  const int nk = uni(1, 3);
  for (int k = 0; k < nk; ++k) s.keys.push_back("k" + std::to_string(k));
  s.g.assign(nc, std::vector<std::size_t>(nk));
  for (auto& row : s.g)
    for (auto& x : row) x = static_cast<std::size_t>(uni(0, n - 1));

  s.loss.assign(n, std::vector<ExtReal>(nc));
  for (int c = 0; c < nc; ++c) {
    const int anchors = uni(1, 2);
    std::vector<std::pair<int, int>> a;
    for (int i = 0; i < anchors; ++i) a.emplace_back(uni(0, n - 1), uni(0, 3));
    for (int x = 0; x < n; ++x) {
      long long best = kFar * 2;
      for (auto [at, shift] : a) best = std::min(best, shift + d[x][at]);
      s.loss[x][c] = ExtReal(best);
    }
  }

  std::vector<bool> in_support(n, false);
  for (auto x : s.f) in_support[x] = true;
  s.detect.assign(n, std::vector<bool>(nk));
  for (int x = 0; x < n; ++x)
    for (int k = 0; k < nk; ++k) s.detect[x][k] = !in_support[x] && uni(0, 3) != 0;
  if (posterior_mode) {
    // the posterior guarantee tolerates natural-text detections up to delta
    for (int k = 0; k < nk; ++k) s.detect[s.f[uni(0, nc - 1)]][k] = uni(0, 4) == 0;
  }

  Rational eps{0}, eps_prime{0}, delta{0};
  for (int k = 0; k < nk; ++k) {
    const auto gap = unimark::erasure::expected_loss_gap(s, k);
    eps = std::max(eps, gap.value());
    eps_prime = std::max(eps_prime, unimark::erasure::expected_distance(s, k).value());
    delta = std::max(delta, Rational(1) - unimark::erasure::pr_detect_watermarked(s, k));
    delta = std::max(delta, unimark::erasure::pr_detect_generated(s, k));
  }
  s.epsilon = eps;
  s.epsilon_prime = eps_prime;
  s.delta = delta;
  s.mode = posterior_mode ? Mode::posterior : Mode::nearest;
  return s;
}

}  // namespace oracle
