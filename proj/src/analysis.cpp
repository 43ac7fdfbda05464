// Copyright 2026 The hetcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetcache/analysis.hpp"

#include <algorithm>
#include <numeric>

namespace hetcache {
namespace analysis {

namespace {

// (K1 - t)/(1 + t) evaluated at integer redundancy t.
Rational single_stream_point(int K1, long long t) {
  return Rational(K1 - t, 1 + t);
}

// K1(1-g)/(1+K1g) on the lower convex envelope: linear interpolation
// between the adjacent integer redundancy points (the function is convex
// in t, so the chord is the envelope).
Rational t_k1_envelope(int K1, const Rational& gamma1) {
  Rational t = Rational(K1) * gamma1;
  if (t.is_integer()) return single_stream_point(K1, t.as_integer());
  long long lo = t.floor();
  long long hi = lo + 1;
  Rational w = Rational(hi) - t;  // weight of the low point
  return w * single_stream_point(K1, lo) +
         (Rational(1) - w) * single_stream_point(K1, hi);
}

}  // namespace

Rational delay_theorem1(int K1, const Rational& gamma1, int K2) {
  return t_k1_envelope(K1, gamma1) + Rational(K2);
}

Rational delay_theorem2(int K1, const Rational& gamma1, int K2, int L) {
  Rational tk = t_k(K1, gamma1);
  Rational threshold = Rational(L - 1) * tk;
  if (Rational(K2) >= threshold) {
    if (K2 == 0) return tk;  // min{L, 0} degenerates; nothing to add
    Rational denom = Rational(std::min(L, K2));
    return tk + (Rational(K2) - threshold) / denom;
  }
  return (Rational(K2) + Rational(K1) * (Rational(1) - gamma1)) /
         (Rational(K1) * gamma1 + Rational(L));
}

Rational delay_theorem4(int K1, const Rational& gamma1, int K2, const Rational& gamma2, int L) {
  Rational tk = t_k(K1, gamma1);
  Rational load2 = Rational(K2) * (Rational(1) - gamma2);
  Rational g2bar = Rational(K2) * gamma2;
  Rational threshold = load2 / (Rational(L - 1) + g2bar);
  if (tk >= threshold) {
    Rational load1 = Rational(K1) * (Rational(1) - gamma1);
    return (load1 + load2) / (Rational(L) + Rational(K1) * gamma1 + g2bar);
  }
  Rational denom = Rational::min(Rational(K2), Rational(L) + g2bar);
  return tk + (load2 - (Rational(L - 1) + g2bar) * tk) / denom;
}

Rational delay_homogeneous(int K, const Rational& gamma, int L) {
  return Rational(K) * (Rational(1) - gamma) / (Rational(K) * gamma + Rational(L));
}

Rational dof(const Rational& delay, const Rational& served_load) {
  if (!(Rational(0) < delay)) throw Error("dof: delay must be positive");
  return served_load / delay;
}

Rational lower_bound(int K1, const Rational& gamma1, int K2, int L) {
  if (L == 1) return delay_theorem1(K1, gamma1, K2);
  Rational tk = t_k(K1, gamma1);
  Rational zf_only = Rational(std::min(K2, L), L);
  if (Rational(K2) >= Rational(L - 1) * tk) return zf_only;
  Rational cache_only_half =
      Rational(1, 2) * Rational(K1) * (Rational(1) - gamma1) /
      (Rational(K1) * gamma1 + Rational(L));
  return Rational::max(zf_only, cache_only_half);
}

Rational gap_ratio(int K1, const Rational& gamma1, int K2, int L) {
  return delay_theorem2(K1, gamma1, K2, L) / lower_bound(K1, gamma1, K2, L);
}

StreamAllocation optimal_stream_allocation(int K1, const Rational& gamma1, int K2, int L) {
  Rational tk = t_k(K1, gamma1);
  // K2 = (Ltilde - 1) T_K1 defines the parameterization.
  Rational ltilde = Rational(K2) / tk + Rational(1);
  if (Rational(L) > ltilde)
    throw Error("optimal_stream_allocation: requires L <= Ltilde");
  StreamAllocation a;
  a.l1 = Rational(L) / ltilde;
  a.T_star = tk * ltilde / Rational(L);
  return a;
}

HomogeneousEquivalent homogeneous_equivalent(int K1, const Rational& gamma1, int K2,
                                             const Rational& gamma2) {
  HomogeneousEquivalent h;
  h.K = K1 + K2;
  h.gamma_av = (Rational(K1) * gamma1 + Rational(K2) * gamma2) / Rational(h.K);
  return h;
}

Rational converse_counting_oracle(int K1, int K2, int N, int i) {
  const int K = K1 + K2;
  if (K1 > 5 || K > 7 || N > 7)
    throw InstanceTooLarge("counting oracle: brute force capped at K1 <= 5, K <= 7, N <= 7");
  if (N < K) throw Error("counting oracle: need N >= K");
  if (i < 0 || i > K1) throw Error("counting oracle: i out of range");

  // Fixed representative subfile W^n_T with n = 1, T = {1..i}; the count
  // is symmetric across files and across equal-size T.
  const int n_file = 1;
  const uint32_t T_mask = (i == 0) ? 0u : ((1u << i) - 1u);

  // sigma over the K1 cache-aided users.
  std::vector<int> sigma(static_cast<size_t>(K1));
  std::iota(sigma.begin(), sigma.end(), 1);

  long long hits = 0;
  long long demand_count = 0;
  do {
    // All distinct-demand vectors d: injections [K] -> [N].
    std::vector<int> d(static_cast<size_t>(K), 0);
    std::vector<bool> used(static_cast<size_t>(N) + 1, false);
    long long local = 0;
    std::function<void(int)> rec = [&](int user) {
      if (user > K) {
        ++local;
        // W^n_T is in the acyclic subgraph iff some position j has
        // d_sigma(j) = n and T avoids {sigma(1..j)}.
        uint32_t forbidden = 0;
        for (int j = 1; j <= K1; ++j) {
          forbidden |= 1u << (sigma[static_cast<size_t>(j - 1)] - 1);
          if (d[static_cast<size_t>(sigma[static_cast<size_t>(j - 1)] - 1)] == n_file &&
              (T_mask & forbidden) == 0)
            ++hits;
        }
        return;
      }
      for (int f = 1; f <= N; ++f) {
        if (used[static_cast<size_t>(f)]) continue;
        used[static_cast<size_t>(f)] = true;
        d[static_cast<size_t>(user - 1)] = f;
        rec(user + 1);
        used[static_cast<size_t>(f)] = false;
      }
    };
    rec(1);
    demand_count = local;
  } while (std::next_permutation(sigma.begin(), sigma.end()));

  long long k1_fact = 1;
  for (int v = 2; v <= K1; ++v) k1_fact *= v;
  return Rational(hits) / (Rational(k1_fact) * Rational(demand_count));
}

Rational converse_xi_bound(const std::vector<Rational>& x, int K1, int K2, int N,
                           const Rational& M) {
  if (static_cast<int>(x.size()) != K1 + 1)
    throw Error("xi bound: profile must have K1+1 entries");
  Rational total(0);
  Rational budget(0);
  Rational value(0);
  for (int i = 0; i <= K1; ++i) {
    const Rational& xi = x[static_cast<size_t>(i)];
    if (xi < Rational(0)) throw InfeasibleProfile("xi bound: negative mass");
    total += xi;
    budget += Rational(i) * xi;
    value += xi * Rational(K1 - i, static_cast<long long>(i + 1) * N);
  }
  if (total != Rational(N)) throw InfeasibleProfile("xi bound: profile mass must equal N");
  if (budget > Rational(K1) * M) throw InfeasibleProfile("xi bound: cache budget exceeded");
  return value + Rational(K2);
}

Rational converse_xi_bound_min(int K1, const Rational& gamma1, int K2, int N) {
  // Mass concentrated on the two integer points around t = K1*gamma1
  // minimizes the bound (the coefficient is convex in i).
  Rational t = Rational(K1) * gamma1;
  std::vector<Rational> x(static_cast<size_t>(K1) + 1, Rational(0));
  if (t.is_integer()) {
    x[static_cast<size_t>(t.as_integer())] = Rational(N);
  } else {
    long long lo = t.floor();
    Rational w = Rational(lo + 1) - t;
    x[static_cast<size_t>(lo)] = w * Rational(N);
    x[static_cast<size_t>(lo + 1)] = (Rational(1) - w) * Rational(N);
  }
  return converse_xi_bound(x, K1, K2, N, gamma1 * Rational(N));
}

}  // namespace analysis
}  // namespace hetcache
