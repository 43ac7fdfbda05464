// Copyright 2026 The hetcache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hetcache/placement.hpp"
#include "hetcache/plan.hpp"

namespace hetcache {

/// Exact stream split (L1, L2) equalizing the two groups' standalone
/// delays K_i(1-g_i)/(L_i + K_i g_i), with L1 + L2 = L. When the exact
/// solution has L1 < 1 it is clamped to (1, L-1) and `clamped` is set;
/// that is the regime where group 2 outlasts group 1 and the residual
/// scheduler applies.
struct StreamSplit {
  Rational L1;
  Rational L2;
  bool clamped = false;
};
StreamSplit split_streams(const SystemConfig& config);

// --- Schedule generators -------------------------------------------------
//
// Each generator streams transmissions into a sink and returns the plan
// facts; schedule_* wrappers materialize a TransmissionPlan. Generated
// schedules are exact: every copy of every demanded subfile class is
// delivered exactly once, and transmissions / s_eff equals the closed-form
// delay of the matching theorem as a rational identity.

/// Base cache-less algorithm: requires T_K1 integer and K2 = (L-1) T_K1.
PlanMeta plan_cacheless(const SystemConfig& config, const Demands& demands, const TxSink& sink);

/// Phase-split generalization for any gamma2 = 0 configuration that the
/// construction covers; dispatches to the base algorithm when it applies.
PlanMeta plan_cacheless_general(const SystemConfig& config, const Demands& demands,
                                const TxSink& sink);

/// XOR + L-1 uncoded deliveries for a single homogeneous group.
PlanMeta plan_homogeneous(int K, const Rational& gamma, int L, int N, const Demands& demands,
                          const TxSink& sink);

/// Two-type scheduler for an integer stream split satisfying the
/// equal-delay condition; the worked-example regime (both groups finish
/// together after one pass of the quadruple loop) is the d = 1 case.
PlanMeta plan_twotype(const SystemConfig& config, const Demands& demands, int L1, int L2,
                      const TxSink& sink);

/// Fractional split: per-type subpacketization scaled by d (dL1, dL2
/// integers), transmissions alternating ceil/floor stream allocations so
/// the average is (L1, L2).
PlanMeta plan_twotype_fractional(const SystemConfig& config, const Demands& demands,
                                 const Rational& L1, const Rational& L2, const TxSink& sink);

/// Residual regime: phase 1 runs at split (1, L-1) until group 1 finishes,
/// phase 2 serves group 2 alone at rate min{K2, L + K2 gamma2}.
PlanMeta plan_twotype_residual(const SystemConfig& config, const Demands& demands,
                               const TxSink& sink);

TransmissionPlan schedule_cacheless(const SystemConfig&, const Demands&);
TransmissionPlan schedule_cacheless_general(const SystemConfig&, const Demands&);
TransmissionPlan schedule_homogeneous(int K, const Rational& gamma, int L, int N, const Demands&);
TransmissionPlan schedule_twotype(const SystemConfig&, const Demands&, int L1, int L2);
TransmissionPlan schedule_twotype_fractional(const SystemConfig&, const Demands&,
                                             const Rational& L1, const Rational& L2);
TransmissionPlan schedule_twotype_residual(const SystemConfig&, const Demands&);

/// Scheme selection for `auto` mode: homogeneous when K2 = 0, the
/// cache-less path when gamma2 = 0, otherwise by the stream split
/// (clamped -> residual, integer -> two-type, else fractional).
SchemeKind choose_scheme(const SystemConfig& config);

/// Dispatch per choose_scheme; returns the plan facts.
PlanMeta plan_auto(const SystemConfig& config, const Demands& demands, const TxSink& sink);
TransmissionPlan schedule_auto(const SystemConfig& config, const Demands& demands);

/// Placement matching what plan_auto / the named scheduler uses for this
/// config, including internal copy-range scaling. Decode verification
/// needs only the tau-membership predicate, which scaling never changes.
PlacementResult placement_for(const SystemConfig& config, SchemeKind scheme);

// --- Delivery census ------------------------------------------------------

/// Per-(user, tau-class) delivery counts plus exact copy tracking. The
/// census proves schedule exhaustion: every demanded class is delivered
/// exactly as many times as it has copies, each copy exactly once.
class DeliveryCensus {
 public:
  /// copy_cap bounds the memory spent on exact per-copy duplicate
  /// detection; plans whose total piece count exceeds it fall back to
  /// count + checksum tracking (still exact for any single duplicate).
  explicit DeliveryCensus(long long copy_cap = 1 << 24) : copy_cap_(copy_cap) {}

  void observe(const Transmission& t);

  /// Folds another census (over a disjoint transmission range) into this
  /// one; duplicate copies across the two throw DuplicatePhi while exact
  /// tracking is live.
  void merge(const DeliveryCensus& other);

  long long count(int user, UserSet tau1, UserSet tau2 = UserSet{}) const;
  long long classes() const { return static_cast<long long>(by_class_.size()); }
  long long total() const { return total_; }

  /// True iff every demanded class of every user was delivered exactly
  /// `expected copies` times (group-wise values from the plan meta) and no
  /// copy twice. Mismatches are listed in `errors`.
  bool verify(const SystemConfig& config, const PlanMeta& meta, std::vector<std::string>* errors) const;

 private:
  struct Entry {
    long long count = 0;
    std::unordered_set<uint64_t> seen;  // exact per-copy record, while under copy_cap
  };
  static uint64_t class_key(int user, UserSet tau1, UserSet tau2);
  void observe_piece(int user, const SubfileId& id);

  std::unordered_map<uint64_t, Entry> by_class_;
  long long copy_cap_;
  long long total_ = 0;
  bool exact_ = true;
};

/// Census of a materialized plan. Throws DuplicatePhi if a copy repeats.
DeliveryCensus census(const TransmissionPlan& plan, const Demands& demands);

}  // namespace hetcache
