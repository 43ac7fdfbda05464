// Copyright 2026 The hetcache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "hetcache/config.hpp"
#include "hetcache/plan.hpp"

namespace hetcache {

enum class PlacementKind { Cacheless, TwoType, Homogeneous };

/// Subpacketization plus cache contents for one scheme. Subfiles are
/// identifiers with unit size 1/S; decodability is a property of the index
/// combinatorics, not of payload bytes, so no payloads are stored.
/// Cache membership is decided by the tau indices alone and is therefore
/// O(1) per query; the full per-file universe is enumerable for tests.
struct PlacementResult {
  PlacementKind kind = PlacementKind::Homogeneous;
  SystemConfig config;
  long long S = 0;      // subfile count per file
  int multiplier = 1;   // cache-less scheme: extra factor L-1 when applied
  // Copy-axis ranges. Cacheless: phi1 runs over K1 \ tau1 (K1(1-gamma1)
  // labels) and phi2 over [0, multiplier). Homogeneous: phi1 in 1..Q1.
  // Two-type: phi1 in 1..Q1, phi2 in 1..Q2.
  int Q1 = 0;
  int Q2 = 0;

  bool is_cached(int user, const SubfileId& id) const {
    if (kind == PlacementKind::TwoType && user > config.K1) return id.tau2.contains(user);
    if (user > config.K1) return false;  // cache-less user
    return id.tau1.contains(user);
  }

  /// Every SubfileId of one file, in deterministic order. Intended for
  /// tests and small configurations; size is exactly S.
  std::vector<SubfileId> file_ids(int file) const;

  /// Number of subfile units of one file held by `user`; exact.
  long long cache_units_per_file(int user) const;

  /// cache_units_per_file / S as an exact fraction.
  Rational cache_fraction(int user) const { return Rational(cache_units_per_file(user), S); }
};

/// Placement of the cache-less-coexistence scheme: S = K1(1-gamma1) *
/// C(K1, K1gamma1) subfiles per file, indices (tau1, phi) with phi a user
/// in K1 \ tau1; user k of group 1 caches every id with k in tau1, group-2
/// users cache nothing. When T_K1 is not an integer but (L-1)T_K1 is, the
/// subpacketization carries an extra factor L-1 (exposed as `multiplier`).
PlacementResult place_cacheless(const SystemConfig& config);

/// Two-type placement: S = (K1g1+L1)C(K1,K1g1)(K2g2+L2)C(K2,K2g2), indices
/// (tau1, tau2, phi1, phi2).
PlacementResult place_twotype(const SystemConfig& config, int L1, int L2);

/// Homogeneous placement for K users of cache fraction gamma and L
/// antennas: S = C(K,Kgamma) * (Kgamma+L).
PlacementResult place_homogeneous(int K, const Rational& gamma, int L, int N);

}  // namespace hetcache
