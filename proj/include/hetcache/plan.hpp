// Copyright 2026 The hetcache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hetcache/config.hpp"
#include "hetcache/rational.hpp"
#include "hetcache/userset.hpp"

namespace hetcache {

/// Identifier of one subfile copy. `file` is the library index in 1..N.
/// tau1/tau2 are the caching index sets over the two user groups (tau2 is
/// empty for single-group schemes). phi1/phi2 are copy labels whose domain
/// depends on the scheme:
///   - cache-less scheme: phi1 is a user id in K1 \ tau1 (the copy axis of
///     the placement), phi2 is the refinement lane (0 unless the scheduler
///     had to subdivide copies further);
///   - homogeneous scheme: phi1 in 1..K*gamma+L, phi2 is the refinement
///     lane;
///   - two-type scheme: phi1 in 1..Q1 and phi2 in 1..Q2, the two copy axes
///     of the placement.
struct SubfileId {
  int file = 0;
  UserSet tau1;
  UserSet tau2;
  int phi1 = 0;
  int phi2 = 0;

  friend bool operator==(const SubfileId& a, const SubfileId& b) {
    return a.file == b.file && a.tau1 == b.tau1 && a.tau2 == b.tau2 && a.phi1 == b.phi1 &&
           a.phi2 == b.phi2;
  }
};

/// One entry of a transmission's information vector: a XOR of one demanded
/// subfile per user of a set chi, or a single uncoded subfile for one user.
struct InfoSlot {
  bool is_xor = false;
  // XOR: one (user, subfile) term per member of chi.
  // Uncoded: exactly one term, the recipient and its subfile.
  std::vector<std::pair<int, SubfileId>> terms;

  static InfoSlot make_xor(std::vector<std::pair<int, SubfileId>> t) {
    InfoSlot s;
    s.is_xor = true;
    s.terms = std::move(t);
    return s;
  }
  static InfoSlot make_uncoded(int user, SubfileId id) {
    InfoSlot s;
    s.is_xor = false;
    s.terms = {{user, id}};
    return s;
  }
};

/// An information vector together with the precoded user set lambda.
/// lambda[i] is the user whose zero-forcing column carries info[i]; the two
/// vectors always have equal length (= active streams, at most L).
struct Transmission {
  std::vector<InfoSlot> info;
  std::vector<int> lambda;
};

enum class SchemeKind {
  Cacheless,          // Algorithm-1 base case
  CachelessGeneral,   // phase-split generalization, gamma2 = 0
  TwoType,            // integer stream split
  TwoTypeFractional,  // mixed ceil/floor allocations, factor d
  TwoTypeResidual,    // phase 1 at (1, L-1), phase 2 serves group 2 alone
  Homogeneous,        // XOR + L-1 uncoded, single group
};

std::string scheme_name(SchemeKind k);

/// Static facts about a generated schedule. s_base is the subpacketization
/// of the spec'd placement; schedulers that need finer slots report
/// s_eff = refinement * s_base and size copies accordingly. Slot duration
/// is 1/s_eff, so measured delay = transmissions / s_eff exactly.
struct PlanMeta {
  SchemeKind scheme = SchemeKind::Homogeneous;
  long long s_base = 0;
  long long s_eff = 0;
  long long transmissions = 0;
  // Copy count of one (user, tau-class) for users of each group, in
  // refined units. A complete plan delivers exactly this many pieces of
  // every demanded class.
  long long copies_group1 = 0;
  long long copies_group2 = 0;
  int stream_split_l1 = 0;  // two-type schemes only, 0 otherwise
  int stream_split_l2 = 0;
  long long phase1_transmissions = 0;  // phase-split schemes only

  Rational slot_duration() const { return Rational(1, s_eff); }
  Rational measured_delay() const { return Rational(transmissions, s_eff); }
};

struct TransmissionPlan {
  PlanMeta meta;
  std::vector<Transmission> transmissions;

  Rational measured_delay() const { return meta.measured_delay(); }
};

/// Demand vector: user k requests file demands[k]. The paper's metric is
/// worst-case delivery, so all demands must be distinct.
struct Demands {
  std::vector<int> file_of;  // index 0 unused

  static Demands worst_case(const SystemConfig& cfg) {
    Demands d;
    d.file_of.resize(static_cast<size_t>(cfg.K()) + 1, 0);
    for (int k = 1; k <= cfg.K(); ++k) d.file_of[static_cast<size_t>(k)] = k;
    return d;
  }

  int operator[](int user) const { return file_of[static_cast<size_t>(user)]; }

  void validate(int K, int N) const;
};

/// Streaming consumer for generated transmissions. Large sweeps count and
/// census plans without materializing them.
using TxSink = std::function<void(const Transmission&)>;

inline void Demands::validate(int K, int N) const {
  if (static_cast<int>(file_of.size()) != K + 1) throw Error("demands: wrong size");
  std::vector<bool> seen(static_cast<size_t>(N) + 1, false);
  for (int k = 1; k <= K; ++k) {
    int f = file_of[static_cast<size_t>(k)];
    if (f < 1 || f > N) throw Error("demands: file index out of range");
    if (seen[static_cast<size_t>(f)])
      throw Error("demands: repeated demand; worst-case vectors are distinct");
    seen[static_cast<size_t>(f)] = true;
  }
}

inline std::string scheme_name(SchemeKind k) {
  switch (k) {
    case SchemeKind::Cacheless: return "cacheless";
    case SchemeKind::CachelessGeneral: return "cacheless-general";
    case SchemeKind::TwoType: return "twotype";
    case SchemeKind::TwoTypeFractional: return "twotype-fractional";
    case SchemeKind::TwoTypeResidual: return "twotype-residual";
    case SchemeKind::Homogeneous: return "homogeneous";
  }
  return "unknown";
}

}  // namespace hetcache
