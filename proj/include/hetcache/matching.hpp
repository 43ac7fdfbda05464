// Copyright 2026 The hetcache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "hetcache/config.hpp"
#include "hetcache/userset.hpp"

namespace hetcache {

/// Bipartite instance of the XOR-to-subfile pairing problem of the
/// cache-less scheme. Left nodes are copies of the XOR index sets chi
/// (|chi| = K1g1 + 1); right nodes are the (tau, copy) demands that the
/// cache-less recipients of one transmission share. An edge joins a chi
/// copy to a tau copy iff tau is a subset of chi.
///
/// Two copy conventions appear in the construction:
///   - GroupCopies: each tau appears once per cache-less group, T_K1
///     copies (requires integer T_K1); every left node then has degree
///     T_K1 * (K1g1 + 1) = K1(1 - g1).
///   - PhiCopies: the boosted subpacketization, one right node per
///     (tau, phi in K1 \ tau); this is the instance the explicit matching
///     solves.
struct MatchingInstance {
  enum class Copies { Group, Phi };
  Copies copies = Copies::Phi;
  int n_left = 0;
  int n_right = 0;
  std::vector<std::vector<int>> adj;  // left -> right
  std::vector<UserSet> left_chi;      // chi of each left node
  std::vector<int> left_copy;
  std::vector<UserSet> right_tau;  // tau of each right node
  std::vector<int> right_copy;     // phi label or group index
};

MatchingInstance make_matching_instance(const SystemConfig& config,
                                        MatchingInstance::Copies copies);

struct MatchingResult {
  int matched = 0;
  bool rhs_saturated = false;
  std::vector<int> match_of_left;   // right index or -1
  std::vector<int> match_of_right;  // left index or -1
};

/// Maximum bipartite matching by Hopcroft-Karp; reports whether every
/// right node is matched. Independent of the explicit construction below,
/// so the two can check each other.
MatchingResult verify_perfect_matching(const MatchingInstance& instance);

/// The explicit pairing of the scheme: right node (tau, phi) takes a copy
/// of the XOR with chi = tau + {phi}. Returned as one entry per right
/// node of the PhiCopies instance, giving the chi and the copy index used.
struct ExplicitMatch {
  UserSet tau;
  int phi = 0;
  UserSet chi;
  int chi_copy = 0;
};
std::vector<ExplicitMatch> build_matching(const SystemConfig& config);

}  // namespace hetcache
