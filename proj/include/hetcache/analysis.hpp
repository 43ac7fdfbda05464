// Copyright 2026 The hetcache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "hetcache/config.hpp"
#include "hetcache/rational.hpp"

namespace hetcache {
namespace analysis {

/// Optimal single-stream delay with K2 cache-less users under uncoded
/// placement: K1(1-g1)/(1+K1g1) + K2. Non-integer K1g1 evaluates on the
/// lower convex envelope between the adjacent integer points.
Rational delay_theorem1(int K1, const Rational& gamma1, int K2);

/// L-antenna delay with cache-less users: T_K1 + (K2-(L-1)T_K1)/min{L,K2}
/// for K2 above the threshold (L-1)T_K1, else (K2+K1(1-g1))/(K1g1+L);
/// the two branches agree at the threshold.
Rational delay_theorem2(int K1, const Rational& gamma1, int K2, int L);

/// Two cache-aided groups. Below the threshold the system matches the
/// homogeneous equivalent: (K1(1-g1)+K2(1-g2))/(L+K1g1+K2g2); otherwise
/// group 2 needs a residual phase.
Rational delay_theorem4(int K1, const Rational& gamma1, int K2, const Rational& gamma2, int L);

/// Homogeneous K-user delay K(1-gamma)/(Kgamma+L).
Rational delay_homogeneous(int K, const Rational& gamma, int L);

/// Degrees of freedom: served load / delay.
Rational dof(const Rational& delay, const Rational& served_load);

/// Converse lower bound for gamma2 = 0: the single-stream optimum at
/// L = 1; min{K2,L}/L above the threshold; else the larger of min{K2,L}/L
/// and half the cache-aided-only delay.
Rational lower_bound(int K1, const Rational& gamma1, int K2, int L);

/// Achievable-to-bound ratio; at K2 = alpha(L-1)T_K1 with alpha >= 1 this
/// is 1 + 1/(alpha(L-1)) <= 2, and <= 3 below the threshold.
Rational gap_ratio(int K1, const Rational& gamma1, int K2, int L);

/// Stream-allocation optimum for K2 = (Ltilde-1)T_K1: l1 = L/Ltilde and
/// T* = T_K1 * Ltilde / L, which equals the theorem-2 delay there.
struct StreamAllocation {
  Rational l1;
  Rational T_star;
};
StreamAllocation optimal_stream_allocation(int K1, const Rational& gamma1, int K2, int L);

/// Homogeneous system with the same cumulative cache budget:
/// K = K1 + K2, gamma_av = (K1g1 + K2g2)/K.
struct HomogeneousEquivalent {
  int K = 0;
  Rational gamma_av;
};
HomogeneousEquivalent homogeneous_equivalent(int K1, const Rational& gamma1, int K2,
                                             const Rational& gamma2);

/// Brute-force counting oracle for the converse: enumerates all
/// permutations of the cache-aided users and all distinct-demand vectors,
/// counts how often the subfile W^n_T (|T| = i) lands in the acyclic
/// subgraph construction, and normalizes by K1! P(N,K). The closed form
/// is (K1-i)/((i+1)N). Tiny instances only.
Rational converse_counting_oracle(int K1, int K2, int N, int i);

/// Bound value sum_i x_i (K1-i)/((i+1)N) + K2 for a placement profile x
/// (x_i = mass cached at exactly i users), subject to sum x_i = N and the
/// cache budget sum i*x_i <= K1*M.
Rational converse_xi_bound(const std::vector<Rational>& x, int K1, int K2, int N,
                           const Rational& M);

/// Minimizes converse_xi_bound over feasible profiles via the two-point
/// envelope around t = K1*M/N; equals delay_theorem1.
Rational converse_xi_bound_min(int K1, const Rational& gamma1, int K2, int N);

}  // namespace analysis
}  // namespace hetcache
