// Copyright 2026 The hetcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetcache/placement.hpp"

namespace hetcache {

PlacementResult place_cacheless(const SystemConfig& config) {
  if (!(config.gamma2 == Rational(0)))
    throw Error("place_cacheless: gamma2 must be 0");
  const int t1 = config.t1();  // throws NonIntegerRedundancy
  PlacementResult p;
  p.kind = PlacementKind::Cacheless;
  p.config = config;
  const long long d1 = config.K1 - t1;  // K1(1-gamma1)
  Rational tk = t_k(config.K1, config.gamma1);
  p.multiplier = 1;
  if (!tk.is_integer() && config.L >= 2 &&
      (Rational(config.L - 1) * tk).is_integer()) {
    p.multiplier = config.L - 1;
  }
  p.Q1 = static_cast<int>(d1);
  p.Q2 = p.multiplier;
  p.S = p.multiplier * d1 * binom(config.K1, t1);
  return p;
}

PlacementResult place_twotype(const SystemConfig& config, int L1, int L2) {
  if (L1 + L2 != config.L || L1 < 1 || L2 < 1)
    throw InvalidStreamSplit("place_twotype: need L1 >= 1, L2 >= 1, L1+L2 = L");
  const int t1 = config.t1();
  const int t2 = config.t2();  // throws NonIntegerRedundancy
  if (config.K2 == 0 || config.gamma2 == Rational(0))
    throw Error("place_twotype: second group must be cache-aided");
  PlacementResult p;
  p.kind = PlacementKind::TwoType;
  p.config = config;
  p.Q1 = t1 + L1;
  p.Q2 = t2 + L2;
  p.S = static_cast<long long>(p.Q1) * binom(config.K1, t1) * p.Q2 * binom(config.K2, t2);
  p.multiplier = 1;
  return p;
}

PlacementResult place_homogeneous(int K, const Rational& gamma, int L, int N) {
  SystemConfig cfg(K, gamma, 0, Rational(0), L, N);
  const int t = cfg.t1();
  PlacementResult p;
  p.kind = PlacementKind::Homogeneous;
  p.config = cfg;
  p.Q1 = t + L;
  p.Q2 = 1;
  p.S = binom(K, t) * p.Q1;
  p.multiplier = 1;
  return p;
}

std::vector<SubfileId> PlacementResult::file_ids(int file) const {
  std::vector<SubfileId> out;
  out.reserve(static_cast<size_t>(S));
  switch (kind) {
    case PlacementKind::Cacheless: {
      const int t1 = config.t1();
      for (UserSet tau : enumerate_subsets(config.users1(), t1)) {
        for (int phi : config.users1().minus(tau).members()) {
          for (int rep = 0; rep < multiplier; ++rep) {
            out.push_back(SubfileId{file, tau, UserSet{}, phi, rep});
          }
        }
      }
      break;
    }
    case PlacementKind::TwoType: {
      const int t1 = config.t1();
      const int t2 = config.t2();
      for (UserSet tau1 : enumerate_subsets(config.users1(), t1)) {
        for (UserSet tau2 : enumerate_subsets(config.users2(), t2)) {
          for (int phi1 = 1; phi1 <= Q1; ++phi1) {
            for (int phi2 = 1; phi2 <= Q2; ++phi2) {
              out.push_back(SubfileId{file, tau1, tau2, phi1, phi2});
            }
          }
        }
      }
      break;
    }
    case PlacementKind::Homogeneous: {
      const int t = config.t1();
      for (UserSet tau : enumerate_subsets(config.users1(), t)) {
        for (int phi = 1; phi <= Q1; ++phi) {
          out.push_back(SubfileId{file, tau, UserSet{}, phi, 0});
        }
      }
      break;
    }
  }
  return out;
}

long long PlacementResult::cache_units_per_file(int user) const {
  switch (kind) {
    case PlacementKind::Cacheless: {
      if (user > config.K1) return 0;
      const int t1 = config.t1();
      // tau1 containing `user`, times the per-tau copy count.
      return binom(config.K1 - 1, t1 - 1) * (config.K1 - t1) * multiplier;
    }
    case PlacementKind::TwoType: {
      const int t1 = config.t1();
      const int t2 = config.t2();
      if (user <= config.K1) {
        return binom(config.K1 - 1, t1 - 1) * binom(config.K2, t2) *
               static_cast<long long>(Q1) * Q2;
      }
      return binom(config.K1, t1) * binom(config.K2 - 1, t2 - 1) *
             static_cast<long long>(Q1) * Q2;
    }
    case PlacementKind::Homogeneous: {
      const int t = config.t1();
      return binom(config.K1 - 1, t - 1) * Q1;
    }
  }
  return 0;
}

}  // namespace hetcache
