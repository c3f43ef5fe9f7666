#pragma once

// Brute-force helpers shared by the signal tests: exact play enumeration in
// the signal game and random exact beliefs.

#include <map>
#include <random>
#include <vector>

#include "rgame/signals.hpp"

namespace rgame::oracle {

// One positive-probability play prefix up to stage t.
struct Leaf {
  std::vector<int> ks;  // k_1..k_t
  SignalHistory h1, h2;
  Rational prob;
};

// All prefixes of length t under (pi, sigma, tau), by multiplying out pi, q,
// sigma and tau.
inline std::vector<Leaf> enumeratePlays(const SignalGame& g, const Joint<Rational>& pi,
                                        const Strategy1<Rational>& sigma,
                                        const Strategy2<Rational>& tau, int t) {
  std::vector<Leaf> cur;
  for (const auto& e : pi.entries)
    if (e.w != 0) cur.push_back({{e.k}, {e.c}, {e.d}, e.w});
  for (int s = 1; s < t; ++s) {
    std::vector<Leaf> next;
    for (const auto& l : cur) {
      auto a = sigma(l.h1);
      auto b = tau(l.h2);
      for (int i = 0; i < g.numI(); ++i)
        for (int j = 0; j < g.numJ(); ++j) {
          if (a[i] == 0 || b[j] == 0) continue;
          for (const auto& o : g.law(l.ks.back(), i, j)) {
            if (o.w == 0) continue;
            Leaf n = l;
            n.ks.push_back(o.k);
            n.h1.push_back(o.c);
            n.h2.push_back(o.d);
            n.prob *= a[i] * b[j] * o.w;
            next.push_back(std::move(n));
          }
        }
    }
    cur = std::move(next);
  }
  return cur;
}

// P(k_t | h1) read off the enumeration.
inline Belief<Rational> posterior(const std::vector<Leaf>& leaves, int numK, const SignalHistory& h1) {
  std::vector<Rational> m(numK, 0);
  Rational total = 0;
  for (const auto& l : leaves)
    if (l.h1 == h1) {
      m[l.ks.back()] += l.prob;
      total += l.prob;
    }
  Belief<Rational> p;
  for (auto& v : m) p.p.push_back(total == 0 ? Rational(0) : Rational(v / total));
  return p;
}

// L(p_t | h2) read off the enumeration.
inline SecondOrderBelief<Rational> secondOrder(const std::vector<Leaf>& leaves, int numK,
                                               const SignalHistory& h2) {
  std::map<SignalHistory, Rational> byH1;
  Rational total = 0;
  for (const auto& l : leaves)
    if (l.h2 == h2) {
      byH1[l.h1] += l.prob;
      total += l.prob;
    }
  SecondOrderBelief<Rational> x;
  for (const auto& [h1, w] : byH1) x.atoms.push_back({posterior(leaves, numK, h1), w / total});
  canonicalize(x.atoms);
  return x;
}

inline Rational randomWeight(std::mt19937_64& rng, int den) {
  Rational w(static_cast<long>(rng() % den) + 1, den);
  w.canonicalize();
  return w;
}

inline std::vector<Rational> randomSimplex(std::mt19937_64& rng, int n, int den) {
  std::vector<Rational> w;
  Rational total = 0;
  for (int i = 0; i < n; ++i) {
    w.push_back(randomWeight(rng, den));
    total += w.back();
  }
  for (auto& v : w) v /= total;
  return w;
}

// Random point of Delta(K) supported on `support` (state indices).
inline Belief<Rational> randomBelief(std::mt19937_64& rng, int numK, const std::vector<int>& support,
                                     int den = 7) {
  Belief<Rational> p;
  p.p.assign(numK, 0);
  auto w = randomSimplex(rng, static_cast<int>(support.size()), den);
  for (std::size_t s = 0; s < support.size(); ++s) p.p[support[s]] = w[s];
  return p;
}

inline SecondOrderBelief<Rational> randomSecond(std::mt19937_64& rng, int numK,
                                                const std::vector<int>& support, int maxAtoms) {
  SecondOrderBelief<Rational> x;
  int n = 1 + static_cast<int>(rng() % maxAtoms);
  auto w = randomSimplex(rng, n, 5);
  for (int a = 0; a < n; ++a) x.atoms.push_back({randomBelief(rng, numK, support), w[a]});
  canonicalize(x.atoms);
  return x;
}

inline ImageDistribution<Rational> randomImage(std::mt19937_64& rng, int numK, int maxOuter, int maxInner) {
  std::vector<int> all;
  for (int k = 0; k < numK; ++k) all.push_back(k);
  ImageDistribution<Rational> z;
  int n = 1 + static_cast<int>(rng() % maxOuter);
  auto w = randomSimplex(rng, n, 5);
  for (int a = 0; a < n; ++a) z.atoms.push_back({randomSecond(rng, numK, all, maxInner), w[a]});
  canonicalize(z.atoms);
  return z;
}

// Fixed behaviour strategy whose mixed action is a hash of the history.
inline std::vector<Rational> hashedMix(const SignalHistory& h, int n, unsigned long salt) {
  unsigned long seed = salt;
  for (int c : h) seed = seed * 1000003UL + static_cast<unsigned long>(c + 1);
  std::mt19937_64 rng(seed);
  return randomSimplex(rng, n, 4);
}

}  // namespace rgame::oracle
