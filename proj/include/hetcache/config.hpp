// Copyright 2026 The hetcache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "hetcache/errors.hpp"
#include "hetcache/rational.hpp"
#include "hetcache/userset.hpp"

namespace hetcache {

/// Binomial coefficient as long long; throws on 64-bit overflow.
inline long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > INT64_MAX) throw std::overflow_error("binom overflow");
  }
  return static_cast<long long>(r);
}

/// The MISO broadcast system under study: K1 users with cache fraction
/// gamma1, K2 users with gamma2 in [0, gamma1), L transmit antennas, a
/// library of N >= K1 + K2 files. Users are numbered globally: the first
/// group is 1..K1, the second K1+1..K1+K2.
struct SystemConfig {
  int K1 = 0;
  Rational gamma1;
  int K2 = 0;
  Rational gamma2;
  int L = 1;
  int N = 0;

  SystemConfig() = default;
  SystemConfig(int k1, Rational g1, int k2, Rational g2, int l, int n)
      : K1(k1), gamma1(g1), K2(k2), gamma2(g2), L(l), N(n) {
    validate();
  }

  void validate() const {
    if (K1 < 1) throw Error("config: K1 must be >= 1");
    if (K2 < 0) throw Error("config: K2 must be >= 0");
    if (L < 1) throw Error("config: L must be >= 1");
    if (!(Rational(0) < gamma1 && gamma1 < Rational(1)))
      throw Error("config: gamma1 must lie in (0,1)");
    if (gamma2 < Rational(0) || !(gamma2 < gamma1))
      throw Error("config: gamma2 must lie in [0, gamma1)");
    if (N < K1 + K2) throw Error("config: N must be >= K1 + K2");
    if (K1 + K2 > 31) throw Error("config: at most 31 users supported");
  }

  int K() const { return K1 + K2; }
  UserSet users1() const { return UserSet::range(1, K1); }
  UserSet users2() const { return UserSet::range(K1 + 1, K()); }
  UserSet all_users() const { return UserSet::range(1, K()); }

  Rational cache_redundancy1() const { return Rational(K1) * gamma1; }  // K1*gamma1
  Rational cache_redundancy2() const { return Rational(K2) * gamma2; }  // K2*gamma2

  bool integral_redundancy1() const { return cache_redundancy1().is_integer(); }
  bool integral_redundancy2() const { return K2 == 0 || cache_redundancy2().is_integer(); }

  /// K1*gamma1 as an integer; throws NonIntegerRedundancy otherwise.
  int t1() const {
    if (!integral_redundancy1())
      throw NonIntegerRedundancy("K1*gamma1 = " + cache_redundancy1().str() +
                                 " is not an integer");
    return static_cast<int>(cache_redundancy1().as_integer());
  }
  /// K2*gamma2 as an integer; throws NonIntegerRedundancy otherwise.
  int t2() const {
    if (K2 == 0) return 0;
    if (!integral_redundancy2())
      throw NonIntegerRedundancy("K2*gamma2 = " + cache_redundancy2().str() +
                                 " is not an integer");
    return static_cast<int>(cache_redundancy2().as_integer());
  }
};

/// Single-antenna delay K(1-gamma)/(1+K*gamma) for serving one user group
/// alone; also the regime threshold of the delivery theorems.
inline Rational t_k(int K, const Rational& gamma) {
  if (gamma < Rational(0) || !(gamma < Rational(1)))
    throw Error("t_k: gamma must lie in [0,1)");
  return Rational(K) * (Rational(1) - gamma) / (Rational(1) + Rational(K) * gamma);
}

}  // namespace hetcache
