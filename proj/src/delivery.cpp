// Copyright 2026 The hetcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetcache/delivery.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace hetcache {
namespace {

uint64_t ckey(int user, UserSet tau1, UserSet tau2) {
  // Group masks are disjoint, so their union decomposes uniquely.
  return (static_cast<uint64_t>(user) << 32) |
         (static_cast<uint64_t>(tau1.bits() | tau2.bits()));
}

uint64_t copy_code(const SubfileId& id) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(id.phi1)) << 20) |
         static_cast<uint32_t>(id.phi2);
}

/// Lazy copy dispenser: one monotone counter per (user, tau1, tau2) class.
class CopyCounters {
 public:
  long long next(int user, UserSet tau1, UserSet tau2) {
    return counters_[ckey(user, tau1, tau2)]++;
  }
  long long peek(int user, UserSet tau1, UserSet tau2) const {
    auto it = counters_.find(ckey(user, tau1, tau2));
    return it == counters_.end() ? 0 : it->second;
  }

 private:
  std::unordered_map<uint64_t, long long> counters_;
};

/// Copy label order for the cache-less placement. A cache-aided user's
/// class (k, tau) consumes its own index k first, then the remaining
/// members of K1 \ tau ascending; cache-less users consume plain ascending
/// labels. This is the assignment the worked 40-transmission sequence of
/// the two-antenna example follows.
std::vector<int> cacheless_label_order(const SystemConfig& cfg, int user, UserSet tau) {
  std::vector<int> order;
  UserSet pool = cfg.users1().minus(tau);
  if (user <= cfg.K1) {
    order.push_back(user);
    for (int u : pool.members())
      if (u != user) order.push_back(u);
  } else {
    order = pool.members();
  }
  return order;
}

SubfileId cacheless_subfile(const SystemConfig& cfg, const Demands& demands, int user,
                            UserSet tau, long long counter, int reps) {
  std::vector<int> order = cacheless_label_order(cfg, user, tau);
  assert(counter < static_cast<long long>(order.size()) * reps);
  SubfileId id;
  id.file = demands[user];
  id.tau1 = tau;
  id.phi1 = order[static_cast<size_t>(counter / reps)];
  id.phi2 = static_cast<int>(counter % reps);  // refinement lane
  return id;
}

struct ClassSpec {
  UserSet tau1;
  UserSet tau2;
};

/// Demanded tau-classes of one user (the ones it does not cache).
std::vector<ClassSpec> demanded_classes(const SystemConfig& cfg, SchemeKind scheme, int user) {
  std::vector<ClassSpec> out;
  const int t1 = cfg.t1();
  if (scheme == SchemeKind::Homogeneous) {
    for (UserSet tau : enumerate_subsets(cfg.users1(), t1))
      if (!tau.contains(user)) out.push_back({tau, UserSet{}});
    return out;
  }
  if (scheme == SchemeKind::Cacheless || scheme == SchemeKind::CachelessGeneral) {
    for (UserSet tau : enumerate_subsets(cfg.users1(), t1))
      if (user > cfg.K1 || !tau.contains(user)) out.push_back({tau, UserSet{}});
    return out;
  }
  const int t2 = cfg.t2();
  for (UserSet tau1 : enumerate_subsets(cfg.users1(), t1)) {
    if (user <= cfg.K1 && tau1.contains(user)) continue;
    for (UserSet tau2 : enumerate_subsets(cfg.users2(), t2)) {
      if (user > cfg.K1 && tau2.contains(user)) continue;
      out.push_back({tau1, tau2});
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// Cache-less coexistence (gamma2 = 0)
// --------------------------------------------------------------------------

struct CachelessParams {
  int t1 = 0;
  long long D1 = 0;  // K1(1 - gamma1)
  long long C1 = 0;  // C(K1, t1)
  int m = 1;         // placement multiplier
  int r = 1;         // scheduler refinement
  int a = 0;         // cache-less recipients per coded slot
  int bfill = 0;     // cache-aided uncoded recipients per coded slot
  long long J = 0;   // coded slots per (tau, phi)
  long long rounds_b = 0;  // full XOR+beta rounds on group 1 after phase A
  long long zf_units = 0;  // leftover copies per (cache-less user, tau)
  int u = 0;               // users per zero-forcing-only slot
  bool gt_regime = false;
};

CachelessParams solve_cacheless(const SystemConfig& cfg, int multiplier) {
  CachelessParams p;
  p.t1 = cfg.t1();
  p.D1 = cfg.K1 - p.t1;
  p.C1 = binom(cfg.K1, p.t1);
  p.m = multiplier;
  const int K2 = cfg.K2;
  const int L = cfg.L;
  const long long t1 = p.t1;

  if (K2 == 0) {
    if (p.D1 < L)
      throw InsufficientGround("cacheless: K1(1-gamma1) < L, no beta window");
    for (int r = 1;; ++r) {
      long long pool = static_cast<long long>(r) * p.m * p.D1;
      if (pool % (t1 + L) == 0) {
        p.r = r;
        p.rounds_b = pool / (t1 + L);
        break;
      }
    }
    return p;
  }

  p.gt_regime = static_cast<long long>(K2) * (t1 + 1) > (L - 1) * p.D1;
  if (!p.gt_regime) {
    // Full coding gain for everyone: coded slots carry the XOR, a
    // cache-less subfiles and enough group-1 uncoded fill to keep the
    // per-slot rate at K1 gamma1 + L; leftovers of group 1 are finished
    // by plain XOR+beta rounds. Achieves (K2 + K1(1-gamma1))/(K1gamma1+L).
    p.a = std::min(L - 1, K2);
    p.bfill = (L - 1) - p.a;
    if (static_cast<long long>(K2) + p.D1 < t1 + L)
      throw UnsupportedRegime("cacheless: fewer demand units than per-slot rate");
    if (p.bfill > 0 && p.bfill > p.D1 - 1)
      throw UnsupportedRegime("cacheless: beta fill exceeds available group-1 users");
    for (int r = 1; r <= 1000000; ++r) {
      long long mr = static_cast<long long>(r) * p.m;
      if ((mr * K2) % p.a != 0) continue;
      long long J = mr * K2 / p.a;
      long long rem = mr * p.D1 - (t1 + L - p.a) * J;
      if (rem < 0 || rem % (t1 + L) != 0) continue;
      p.r = r;
      p.J = J;
      p.rounds_b = rem / (t1 + L);
      return p;
    }
    throw UnsupportedRegime("cacheless: no integral refinement found");
  }

  // More cache-less users than one coded phase can absorb: run the base
  // algorithm for exactly T_K1, then zero-force the remainder, L at a time.
  if (L >= 2 && K2 < L - 1)
    throw UnsupportedRegime("cacheless: K2 below L-1 makes the split delay unattainable");
  p.a = std::min(L - 1, K2);
  p.u = std::min(L, K2);
  for (int r = 1; r <= 1000000; ++r) {
    long long mr = static_cast<long long>(r) * p.m;
    if ((mr * p.D1) % (t1 + 1) != 0) continue;
    long long J = mr * p.D1 / (t1 + 1);
    if (p.a > 0 && (p.D1 * J * p.a) % K2 != 0) continue;
    long long served = p.a > 0 ? p.D1 * J * p.a / K2 : 0;
    long long v = mr * p.D1 - served;
    if (v < 0) continue;
    if ((static_cast<long long>(K2) * v) % p.u != 0) continue;
    p.r = r;
    p.J = J;
    p.zf_units = v;
    return p;
  }
  throw UnsupportedRegime("cacheless: no integral refinement found");
}

PlanMeta run_cacheless(const SystemConfig& cfg, const Demands& demands, const TxSink& sink,
                       bool strict_base) {
  cfg.validate();
  if (!(cfg.gamma2 == Rational(0)))
    throw RegimeMismatch("cache-less scheduler requires gamma2 = 0");
  demands.validate(cfg.K(), cfg.N);
  PlacementResult placement = place_cacheless(cfg);
  Rational tk = t_k(cfg.K1, cfg.gamma1);

  if (strict_base) {
    if (!tk.is_integer())
      throw RegimeMismatch("base algorithm requires integer T_K1 (= " + tk.str() + ")");
    if (!(Rational(cfg.K2) == Rational(cfg.L - 1) * tk))
      throw RegimeMismatch("base algorithm requires K2 = (L-1) T_K1");
    if (cfg.L < 2) throw RegimeMismatch("base algorithm requires L >= 2");
  }

  CachelessParams p = solve_cacheless(cfg, placement.multiplier);
  const int reps = p.m * p.r;
  const long long copies = p.D1 * reps;

  PlanMeta meta;
  meta.scheme = strict_base ? SchemeKind::Cacheless : SchemeKind::CachelessGeneral;
  meta.s_base = placement.S;
  meta.s_eff = placement.S * p.r;
  meta.copies_group1 = copies;
  meta.copies_group2 = copies;

  CopyCounters ctr;
  Transmission tx;
  long long emitted = 0;
  auto emit = [&] {
    sink(tx);
    ++emitted;
    tx.info.clear();
    tx.lambda.clear();
  };
  const std::vector<int> group2 = cfg.users2().members();
  const auto taus = enumerate_subsets(cfg.users1(), p.t1);

  auto xor_for = [&](UserSet chi) {
    std::vector<std::pair<int, SubfileId>> terms;
    for (int k : chi.members()) {
      UserSet idx = chi.without(k);
      terms.emplace_back(k, cacheless_subfile(cfg, demands, k, idx, ctr.next(k, idx, {}), reps));
    }
    return InfoSlot::make_xor(std::move(terms));
  };

  if (cfg.K2 > 0) {
    // Phase A: coded slots. For each (tau, phi) the group loop runs J
    // times; cache-less recipients advance along a cyclic pointer that
    // restarts at each tau so per-(user, tau) counts come out uniform.
    for (UserSet tau : taus) {
      long long ptr = 0;
      for (int phi : cfg.users1().minus(tau).members()) {
        UserSet chi = tau.with(phi);
        for (long long j = 0; j < p.J; ++j) {
          tx.info.push_back(xor_for(chi));
          tx.lambda.push_back(phi);
          for (int i = 0; i < p.a; ++i) {
            int k2 = group2[static_cast<size_t>((ptr + i) % cfg.K2)];
            tx.info.push_back(InfoSlot::make_uncoded(
                k2, cacheless_subfile(cfg, demands, k2, tau, ctr.next(k2, tau, {}), reps)));
            tx.lambda.push_back(k2);
          }
          ptr = (ptr + p.a) % cfg.K2;
          for (int b : beta_list(cfg.users1(), tau, phi, p.bfill)) {
            tx.info.push_back(InfoSlot::make_uncoded(
                b, cacheless_subfile(cfg, demands, b, tau, ctr.next(b, tau, {}), reps)));
            tx.lambda.push_back(b);
          }
          emit();
        }
      }
    }
  }

  // Group-1 completion rounds (XOR + L-1 uncoded on group 1 alone).
  for (long long round = 0; round < p.rounds_b; ++round) {
    for (UserSet chi : enumerate_subsets(cfg.users1(), p.t1 + 1)) {
      for (int s : chi.members()) {
        UserSet tau = chi.without(s);
        tx.info.push_back(xor_for(chi));
        tx.lambda.push_back(s);
        for (int b : beta_list(cfg.users1(), tau, s, cfg.L - 1)) {
          tx.info.push_back(InfoSlot::make_uncoded(
              b, cacheless_subfile(cfg, demands, b, tau, ctr.next(b, tau, {}), reps)));
          tx.lambda.push_back(b);
        }
        emit();
      }
    }
  }
  meta.phase1_transmissions = emitted;

  // Zero-forcing-only completion of the remaining cache-less load.
  if (p.zf_units > 0) {
    for (UserSet tau : taus) {
      long long ptr = 0;
      long long slots = static_cast<long long>(cfg.K2) * p.zf_units / p.u;
      for (long long sidx = 0; sidx < slots; ++sidx) {
        for (int i = 0; i < p.u; ++i) {
          int k2 = group2[static_cast<size_t>((ptr + i) % cfg.K2)];
          tx.info.push_back(InfoSlot::make_uncoded(
              k2, cacheless_subfile(cfg, demands, k2, tau, ctr.next(k2, tau, {}), reps)));
          tx.lambda.push_back(k2);
        }
        ptr = (ptr + p.u) % cfg.K2;
        emit();
      }
    }
  }

  meta.transmissions = emitted;
  return meta;
}

// --------------------------------------------------------------------------
// Homogeneous XOR + L-1 uncoded scheme
// --------------------------------------------------------------------------

PlanMeta run_homogeneous(int K, const Rational& gamma, int L, int N, const Demands& demands,
                         const TxSink& sink) {
  SystemConfig cfg(K, gamma, 0, Rational(0), L, N);
  const int t = cfg.t1();
  const long long D = K - t;
  if (D < L) throw InsufficientGround("homogeneous: requires K(1-gamma) >= L");
  demands.validate(K, N);

  PlanMeta meta;
  meta.scheme = SchemeKind::Homogeneous;
  meta.s_base = binom(K, t) * (t + L);
  meta.s_eff = meta.s_base;
  meta.copies_group1 = t + L;
  meta.copies_group2 = 0;

  CopyCounters ctr;
  Transmission tx;
  long long emitted = 0;
  UserSet all = cfg.users1();
  for (UserSet chi : enumerate_subsets(all, t + 1)) {
    for (int s : chi.members()) {
      UserSet tau = chi.without(s);
      std::vector<std::pair<int, SubfileId>> terms;
      for (int k : chi.members()) {
        UserSet idx = chi.without(k);
        SubfileId id;
        id.file = demands[k];
        id.tau1 = idx;
        id.phi1 = static_cast<int>(ctr.next(k, idx, {})) + 1;
        terms.emplace_back(k, id);
      }
      tx.info.push_back(InfoSlot::make_xor(std::move(terms)));
      tx.lambda.push_back(s);
      for (int b : beta_list(all, tau, s, L - 1)) {
        SubfileId id;
        id.file = demands[b];
        id.tau1 = tau;
        id.phi1 = static_cast<int>(ctr.next(b, tau, {})) + 1;
        tx.info.push_back(InfoSlot::make_uncoded(b, id));
        tx.lambda.push_back(b);
      }
      sink(tx);
      ++emitted;
      tx.info.clear();
      tx.lambda.clear();
    }
  }
  meta.transmissions = emitted;
  return meta;
}

// --------------------------------------------------------------------------
// Two-type schemes
// --------------------------------------------------------------------------

struct TwoTypeDims {
  int t1, t2;
  long long D1, D2, C1, C2;
};

TwoTypeDims twotype_dims(const SystemConfig& cfg) {
  TwoTypeDims d;
  d.t1 = cfg.t1();
  d.t2 = cfg.t2();
  d.D1 = cfg.K1 - d.t1;
  d.D2 = cfg.K2 - d.t2;
  d.C1 = binom(cfg.K1, d.t1);
  d.C2 = binom(cfg.K2, d.t2);
  if (cfg.K2 == 0 || cfg.gamma2 == Rational(0))
    throw RegimeMismatch("two-type scheduler requires gamma2 > 0");
  return d;
}

/// Unified zip for the integer (d = 1) and fractional stream splits.
/// Streams all transmissions; requires the equal-delay identity
/// D1 (d t2 + d L2) = D2 (d t1 + d L1) so the per-block dealing is exact.
PlanMeta run_twotype_zip(const SystemConfig& cfg, const Demands& demands, const Rational& L1,
                         const Rational& L2, const TxSink& sink) {
  demands.validate(cfg.K(), cfg.N);
  TwoTypeDims dm = twotype_dims(cfg);
  if (!(L1 + L2 == Rational(cfg.L)) || L1 < Rational(1) || L2 < Rational(1))
    throw InvalidStreamSplit("two-type: need L1 >= 1, L2 >= 1, L1 + L2 = L");

  const long long d = std::lcm(L1.den(), L2.den());
  const long long dL1 = (L1 * Rational(d)).as_integer();
  const long long dL2 = (L2 * Rational(d)).as_integer();
  const long long Q1 = d * dm.t1 + dL1;  // d * (t1 + L1), the phi1 range
  const long long Q2 = d * dm.t2 + dL2;
  // Equal standalone delays: D1/(t1+L1) == D2/(t2+L2).
  if (dm.D1 * Q2 != dm.D2 * Q1)
    throw RegimeMismatch("two-type: stream split does not equalize the group delays");
  const long long ceil_l1 = L1.ceil(), floor_l1 = L1.floor();
  const bool fractional = d > 1;
  // Occurrences per d-cycle that take the ceiling allocation: d * frac(L_i).
  const Rational frac1 = L1 - Rational(floor_l1);
  const long long occ_ceil1 = d * frac1.num() / frac1.den();
  if (ceil_l1 > dm.D1 || L2.ceil() > dm.D2)
    throw InvalidStreamSplit("two-type: allocation exceeds K_i(1-gamma_i), no beta window");

  PlanMeta meta;
  meta.scheme = d == 1 ? SchemeKind::TwoType : SchemeKind::TwoTypeFractional;
  meta.s_base = Q1 * dm.C1 * Q2 * dm.C2;
  meta.s_eff = meta.s_base;
  meta.copies_group1 = Q1 * Q2;
  meta.copies_group2 = Q1 * Q2;
  meta.stream_split_l1 = static_cast<int>(L1.is_integer() ? L1.as_integer() : 0);
  meta.stream_split_l2 = static_cast<int>(L2.is_integer() ? L2.as_integer() : 0);

  // Stream-2 occurrence types: occurrence j < occ_ceil2 uses ceil(L2).
  const long long floor_l2 = L2.floor();
  const Rational frac2 = L2 - Rational(floor_l2);
  const long long occ_ceil2 = d * frac2.num() / frac2.den();
  auto l1_of = [&](long long occ) { return occ < occ_ceil1 ? ceil_l1 : floor_l1; };
  auto l2_of = [&](long long occ) { return occ < occ_ceil2 ? L2.ceil() : floor_l2; };

  const auto taus2 = enumerate_subsets(cfg.users2(), dm.t2);
  const auto chis2 = enumerate_subsets(cfg.users2(), dm.t2 + 1);
  std::unordered_map<uint32_t, long long> chi2_rank;
  for (size_t i = 0; i < chis2.size(); ++i) chi2_rank[chis2[i].bits()] = static_cast<long long>(i);

  // Dealing counters per (tau1, tau2, slot type). Type 0 pairs ceil(L1)
  // slots with floor(L2) occurrences and type 1 the reverse; with an
  // integer split there is a single type.
  std::unordered_map<uint64_t, long long> deal;
  auto deal_key = [&](UserSet tau1, UserSet tau2, int type) {
    return (static_cast<uint64_t>(type) << 62) |
           (static_cast<uint64_t>(tau1.bits() | tau2.bits()));
  };

  CopyCounters ctr;
  Transmission tx;
  long long emitted = 0;

  struct InnerSlot {
    long long rank;
    int s2;
    long long occ2;
    UserSet chi2;
    long long l2;
  };
  std::vector<InnerSlot> inner;
  inner.reserve(static_cast<size_t>(dm.C2 * Q2));

  auto group1_subfile = [&](int user, UserSet tau1, UserSet tau2) {
    long long c = ctr.next(user, tau1, tau2);
    SubfileId id;
    id.file = demands[user];
    id.tau1 = tau1;
    id.tau2 = tau2;
    id.phi1 = static_cast<int>(c / Q2) + 1;
    id.phi2 = static_cast<int>(c % Q2) + 1;
    return id;
  };
  auto group2_subfile = [&](int user, UserSet tau1, UserSet tau2) {
    long long c = ctr.next(user, tau1, tau2);
    SubfileId id;
    id.file = demands[user];
    id.tau1 = tau1;
    id.tau2 = tau2;
    id.phi1 = static_cast<int>(c % Q1) + 1;
    id.phi2 = static_cast<int>(c / Q1) + 1;
    return id;
  };

  for (UserSet chi1 : enumerate_subsets(cfg.users1(), dm.t1 + 1)) {
    for (int s1 : chi1.members()) {
      UserSet tau1 = chi1.without(s1);
      for (long long occ1 = 0; occ1 < d; ++occ1) {
        const long long l1 = l1_of(occ1);
        const long long l2_needed = cfg.L - l1;
        const int type = (fractional && l1 == floor_l1) ? 1 : 0;
        // Occurrence indices on side 2 whose allocation matches.
        std::vector<long long> match;
        for (long long o2 = 0; o2 < d; ++o2)
          if (l2_of(o2) == l2_needed) match.push_back(o2);
        assert(!match.empty());
        const long long period = dm.D2 * static_cast<long long>(match.size());

        inner.clear();
        for (UserSet tau2 : taus2) {
          auto pool2 = cfg.users2().minus(tau2).members();
          long long& c = deal[deal_key(tau1, tau2, type)];
          for (long long q = 0; q < Q2; ++q) {
            long long phase = c % period;
            int s2 = pool2[static_cast<size_t>(phase % dm.D2)];
            long long occ2 = match[static_cast<size_t>(phase / dm.D2)];
            ++c;
            inner.push_back({chi2_rank[tau2.with(s2).bits()], s2, occ2, tau2.with(s2), l2_needed});
          }
        }
        std::sort(inner.begin(), inner.end(), [](const InnerSlot& a, const InnerSlot& b) {
          return std::tie(a.rank, a.s2, a.occ2) < std::tie(b.rank, b.s2, b.occ2);
        });

        for (const InnerSlot& sl : inner) {
          UserSet tau2 = sl.chi2.without(sl.s2);
          // X_{chi1, tau2}
          std::vector<std::pair<int, SubfileId>> terms1;
          for (int k : chi1.members())
            terms1.emplace_back(k, group1_subfile(k, chi1.without(k), tau2));
          tx.info.push_back(InfoSlot::make_xor(std::move(terms1)));
          tx.lambda.push_back(s1);
          for (int b : beta_list(cfg.users1(), tau1, s1, static_cast<int>(l1 - 1))) {
            tx.info.push_back(InfoSlot::make_uncoded(b, group1_subfile(b, tau1, tau2)));
            tx.lambda.push_back(b);
          }
          // X_{chi2, tau1}
          std::vector<std::pair<int, SubfileId>> terms2;
          for (int k : sl.chi2.members())
            terms2.emplace_back(k, group2_subfile(k, tau1, sl.chi2.without(k)));
          tx.info.push_back(InfoSlot::make_xor(std::move(terms2)));
          tx.lambda.push_back(sl.s2);
          for (int b : beta_list(cfg.users2(), tau2, sl.s2, static_cast<int>(sl.l2 - 1))) {
            tx.info.push_back(InfoSlot::make_uncoded(b, group2_subfile(b, tau1, tau2)));
            tx.lambda.push_back(b);
          }
          sink(tx);
          ++emitted;
          tx.info.clear();
          tx.lambda.clear();
        }
      }
    }
  }
  meta.transmissions = emitted;
  return meta;
}

/// Residual regime: group 1 is served at one stream and finishes first;
/// phase 2 completes group 2 alone. The phi2 range is scaled internally so
/// both the per-block dealing and the phase-2 round count are integral.
PlanMeta run_twotype_residual(const SystemConfig& cfg, const Demands& demands,
                              const TxSink& sink) {
  demands.validate(cfg.K(), cfg.N);
  TwoTypeDims dm = twotype_dims(cfg);
  if (cfg.L < 2) throw RegimeMismatch("residual scheme requires L >= 2");
  const long long Q1 = dm.t1 + 1;        // phi1 range (L1 = 1)
  const long long R2 = dm.t2 + cfg.L - 1;  // per-class relevance on side 2
  // Regime: T_K1 <= K2(1-gamma2)/(L-1+K2gamma2), i.e. group 2 outlasts.
  if (dm.D1 * R2 > Q1 * dm.D2)
    throw RegimeMismatch("residual scheme: group 1 does not finish first");
  if (cfg.L - 2 > static_cast<int>(dm.D2) - 1)
    throw UnsupportedRegime("residual scheme: no beta window on group 2");
  const int Lp = static_cast<int>(std::min<long long>(cfg.L, dm.D2));  // phase-2 streams
  const long long rate2 = dm.t2 + Lp;  // = min{K2, L + K2 gamma2}

  long long Q2 = 0, E = 0, w = 0, rounds = 0;
  for (long long mu = 1; mu <= dm.D2 * rate2 + 1; ++mu) {
    long long q2 = R2 * mu;
    if ((dm.D1 * q2) % dm.D2 != 0) continue;
    long long e = R2 * (dm.D1 * q2 / dm.D2);
    long long left = Q1 * q2 - e;
    assert(left >= 0);
    if ((dm.C1 * left) % rate2 != 0) continue;
    Q2 = q2;
    E = e;
    w = left;
    rounds = dm.C1 * left / rate2;
    break;
  }
  if (Q2 == 0) throw UnsupportedRegime("residual scheme: no integral scaling found");

  PlanMeta meta;
  meta.scheme = SchemeKind::TwoTypeResidual;
  meta.s_base = Q1 * dm.C1 * (dm.t2 + cfg.L - 1) * dm.C2;
  meta.s_eff = Q1 * dm.C1 * Q2 * dm.C2;
  meta.copies_group1 = Q1 * Q2;
  meta.copies_group2 = Q1 * Q2;
  meta.stream_split_l1 = 1;
  meta.stream_split_l2 = cfg.L - 1;

  const auto taus1 = enumerate_subsets(cfg.users1(), dm.t1);
  const auto taus2 = enumerate_subsets(cfg.users2(), dm.t2);
  std::unordered_map<uint64_t, long long> deal;
  CopyCounters ctr;       // group-1 classes
  CopyCounters ctr2;      // group-2 per-(k2, tau2) phase-2 cursor
  CopyCounters ctr2_p1;   // group-2 per-(k2, tau1, tau2) phase-1 cursor
  Transmission tx;
  long long emitted = 0;

  auto group1_subfile = [&](int user, UserSet tau1, UserSet tau2) {
    long long c = ctr.next(user, tau1, tau2);
    SubfileId id;
    id.file = demands[user];
    id.tau1 = tau1;
    id.tau2 = tau2;
    id.phi1 = static_cast<int>(c / Q2) + 1;
    id.phi2 = static_cast<int>(c % Q2) + 1;
    return id;
  };
  auto group2_subfile_p1 = [&](int user, UserSet tau1, UserSet tau2) {
    long long c = ctr2_p1.next(user, tau1, tau2);
    assert(c < E);
    SubfileId id;
    id.file = demands[user];
    id.tau1 = tau1;
    id.tau2 = tau2;
    id.phi1 = static_cast<int>(c / Q2) + 1;
    id.phi2 = static_cast<int>(c % Q2) + 1;
    return id;
  };

  // Phase 1: one stream to group 1, L-1 to group 2.
  for (UserSet chi1 : enumerate_subsets(cfg.users1(), dm.t1 + 1)) {
    for (int s1 : chi1.members()) {
      UserSet tau1 = chi1.without(s1);
      for (UserSet tau2 : taus2) {
        auto pool2 = cfg.users2().minus(tau2).members();
        long long& c = deal[static_cast<uint64_t>(tau1.bits() | tau2.bits())];
        for (long long q = 0; q < Q2; ++q) {
          int s2 = pool2[static_cast<size_t>(c % dm.D2)];
          ++c;
          UserSet chi2 = tau2.with(s2);
          std::vector<std::pair<int, SubfileId>> terms1;
          for (int k : chi1.members())
            terms1.emplace_back(k, group1_subfile(k, chi1.without(k), tau2));
          tx.info.push_back(InfoSlot::make_xor(std::move(terms1)));
          tx.lambda.push_back(s1);
          std::vector<std::pair<int, SubfileId>> terms2;
          for (int k : chi2.members())
            terms2.emplace_back(k, group2_subfile_p1(k, tau1, chi2.without(k)));
          tx.info.push_back(InfoSlot::make_xor(std::move(terms2)));
          tx.lambda.push_back(s2);
          for (int b : beta_list(cfg.users2(), tau2, s2, cfg.L - 2)) {
            tx.info.push_back(InfoSlot::make_uncoded(b, group2_subfile_p1(b, tau1, tau2)));
            tx.lambda.push_back(b);
          }
          sink(tx);
          ++emitted;
          tx.info.clear();
          tx.lambda.clear();
        }
      }
    }
  }
  meta.phase1_transmissions = emitted;

  // Phase 2: group 2 alone, XOR + Lp-1 uncoded per slot. Each class
  // (k2, tau2) drains its leftover pool in lexicographic tau1 order,
  // w pieces per tau1 block starting at offset E.
  auto group2_subfile_p2 = [&](int user, UserSet tau2) {
    long long j = ctr2.next(user, tau2, {});
    assert(j < dm.C1 * w);
    UserSet tau1 = taus1[static_cast<size_t>(j / w)];
    long long idx = E + (j % w);
    SubfileId id;
    id.file = demands[user];
    id.tau1 = tau1;
    id.tau2 = tau2;
    id.phi1 = static_cast<int>(idx / Q2) + 1;
    id.phi2 = static_cast<int>(idx % Q2) + 1;
    return id;
  };
  for (long long round = 0; round < rounds; ++round) {
    for (UserSet chi2 : enumerate_subsets(cfg.users2(), dm.t2 + 1)) {
      for (int s : chi2.members()) {
        UserSet tau2 = chi2.without(s);
        std::vector<std::pair<int, SubfileId>> terms;
        for (int k : chi2.members()) terms.emplace_back(k, group2_subfile_p2(k, chi2.without(k)));
        tx.info.push_back(InfoSlot::make_xor(std::move(terms)));
        tx.lambda.push_back(s);
        for (int b : beta_list(cfg.users2(), tau2, s, Lp - 1)) {
          tx.info.push_back(InfoSlot::make_uncoded(b, group2_subfile_p2(b, tau2)));
          tx.lambda.push_back(b);
        }
        sink(tx);
        ++emitted;
        tx.info.clear();
        tx.lambda.clear();
      }
    }
  }
  meta.transmissions = emitted;
  return meta;
}

}  // namespace

StreamSplit split_streams(const SystemConfig& cfg) {
  cfg.validate();
  if (cfg.gamma2 == Rational(0) || cfg.K2 == 0)
    throw RegimeMismatch("split_streams requires gamma2 > 0");
  if (cfg.L < 2) throw RegimeMismatch("split_streams requires L >= 2");
  // Solve K1(1-g1)/(L1 + K1g1) = K2(1-g2)/(L2 + K2g2) with L1 + L2 = L.
  Rational A = Rational(cfg.K1) * (Rational(1) - cfg.gamma1);
  Rational B = Rational(cfg.K2) * (Rational(1) - cfg.gamma2);
  Rational G1 = cfg.cache_redundancy1();
  Rational G2 = cfg.cache_redundancy2();
  // A (L - L1 + G2) = B (L1 + G1)  =>  L1 = (A(L + G2) - B G1) / (A + B)
  Rational L1 = (A * (Rational(cfg.L) + G2) - B * G1) / (A + B);
  StreamSplit s;
  if (L1 < Rational(1)) {
    s.L1 = Rational(1);
    s.L2 = Rational(cfg.L - 1);
    s.clamped = true;
  } else {
    s.L1 = L1;
    s.L2 = Rational(cfg.L) - L1;
    s.clamped = false;
  }
  return s;
}

PlanMeta plan_cacheless(const SystemConfig& cfg, const Demands& demands, const TxSink& sink) {
  return run_cacheless(cfg, demands, sink, /*strict_base=*/true);
}

PlanMeta plan_cacheless_general(const SystemConfig& cfg, const Demands& demands,
                                const TxSink& sink) {
  return run_cacheless(cfg, demands, sink, /*strict_base=*/false);
}

PlanMeta plan_homogeneous(int K, const Rational& gamma, int L, int N, const Demands& demands,
                          const TxSink& sink) {
  return run_homogeneous(K, gamma, L, N, demands, sink);
}

PlanMeta plan_twotype(const SystemConfig& cfg, const Demands& demands, int L1, int L2,
                      const TxSink& sink) {
  return run_twotype_zip(cfg, demands, Rational(L1), Rational(L2), sink);
}

PlanMeta plan_twotype_fractional(const SystemConfig& cfg, const Demands& demands,
                                 const Rational& L1, const Rational& L2, const TxSink& sink) {
  return run_twotype_zip(cfg, demands, L1, L2, sink);
}

PlanMeta plan_twotype_residual(const SystemConfig& cfg, const Demands& demands,
                               const TxSink& sink) {
  return run_twotype_residual(cfg, demands, sink);
}

namespace {
TransmissionPlan materialize(const std::function<PlanMeta(const TxSink&)>& gen) {
  TransmissionPlan plan;
  plan.meta = gen([&plan](const Transmission& t) { plan.transmissions.push_back(t); });
  return plan;
}
}  // namespace

TransmissionPlan schedule_cacheless(const SystemConfig& c, const Demands& d) {
  return materialize([&](const TxSink& s) { return plan_cacheless(c, d, s); });
}
TransmissionPlan schedule_cacheless_general(const SystemConfig& c, const Demands& d) {
  return materialize([&](const TxSink& s) { return plan_cacheless_general(c, d, s); });
}
TransmissionPlan schedule_homogeneous(int K, const Rational& g, int L, int N, const Demands& d) {
  return materialize([&](const TxSink& s) { return plan_homogeneous(K, g, L, N, d, s); });
}
TransmissionPlan schedule_twotype(const SystemConfig& c, const Demands& d, int L1, int L2) {
  return materialize([&](const TxSink& s) { return plan_twotype(c, d, L1, L2, s); });
}
TransmissionPlan schedule_twotype_fractional(const SystemConfig& c, const Demands& d,
                                             const Rational& L1, const Rational& L2) {
  return materialize([&](const TxSink& s) { return plan_twotype_fractional(c, d, L1, L2, s); });
}
TransmissionPlan schedule_twotype_residual(const SystemConfig& c, const Demands& d) {
  return materialize([&](const TxSink& s) { return plan_twotype_residual(c, d, s); });
}

SchemeKind choose_scheme(const SystemConfig& cfg) {
  cfg.validate();
  if (cfg.K2 == 0) return SchemeKind::Homogeneous;
  if (cfg.gamma2 == Rational(0)) {
    Rational tk = t_k(cfg.K1, cfg.gamma1);
    if (tk.is_integer() && Rational(cfg.K2) == Rational(cfg.L - 1) * tk)
      return SchemeKind::Cacheless;
    return SchemeKind::CachelessGeneral;
  }
  StreamSplit s = split_streams(cfg);
  if (s.clamped) return SchemeKind::TwoTypeResidual;
  if (s.L1.is_integer()) return SchemeKind::TwoType;
  return SchemeKind::TwoTypeFractional;
}

PlanMeta plan_auto(const SystemConfig& cfg, const Demands& demands, const TxSink& sink) {
  switch (choose_scheme(cfg)) {
    case SchemeKind::Homogeneous:
      return plan_homogeneous(cfg.K1, cfg.gamma1, cfg.L, cfg.N, demands, sink);
    case SchemeKind::Cacheless:
      return plan_cacheless(cfg, demands, sink);
    case SchemeKind::CachelessGeneral:
      return plan_cacheless_general(cfg, demands, sink);
    case SchemeKind::TwoTypeResidual:
      return plan_twotype_residual(cfg, demands, sink);
    case SchemeKind::TwoType:
    case SchemeKind::TwoTypeFractional: {
      StreamSplit s = split_streams(cfg);
      return plan_twotype_fractional(cfg, demands, s.L1, s.L2, sink);
    }
  }
  throw Error("unreachable");
}

TransmissionPlan schedule_auto(const SystemConfig& c, const Demands& d) {
  return materialize([&](const TxSink& s) { return plan_auto(c, d, s); });
}

PlacementResult placement_for(const SystemConfig& cfg, SchemeKind scheme) {
  switch (scheme) {
    case SchemeKind::Homogeneous:
      return place_homogeneous(cfg.K1, cfg.gamma1, cfg.L, cfg.N);
    case SchemeKind::Cacheless:
    case SchemeKind::CachelessGeneral:
      return place_cacheless(cfg);
    case SchemeKind::TwoType:
    case SchemeKind::TwoTypeFractional: {
      StreamSplit s = split_streams(cfg);
      const long long d = std::lcm(s.L1.den(), s.L2.den());
      PlacementResult p;
      p.kind = PlacementKind::TwoType;
      p.config = cfg;
      p.Q1 = static_cast<int>(d * cfg.t1() + (s.L1 * Rational(d)).as_integer());
      p.Q2 = static_cast<int>(d * cfg.t2() + (s.L2 * Rational(d)).as_integer());
      p.S = static_cast<long long>(p.Q1) * binom(cfg.K1, cfg.t1()) * p.Q2 *
            binom(cfg.K2, cfg.t2());
      return p;
    }
    case SchemeKind::TwoTypeResidual: {
      // Ranges are computed by the scheduler; cache membership depends on
      // tau only, so a nominal (1, L-1) placement serves verification.
      PlacementResult p;
      p.kind = PlacementKind::TwoType;
      p.config = cfg;
      p.Q1 = cfg.t1() + 1;
      p.Q2 = cfg.t2() + cfg.L - 1;
      p.S = static_cast<long long>(p.Q1) * binom(cfg.K1, cfg.t1()) * p.Q2 *
            binom(cfg.K2, cfg.t2());
      return p;
    }
  }
  throw Error("unreachable");
}

// --------------------------------------------------------------------------
// Census
// --------------------------------------------------------------------------

uint64_t DeliveryCensus::class_key(int user, UserSet tau1, UserSet tau2) {
  return ckey(user, tau1, tau2);
}

void DeliveryCensus::observe_piece(int user, const SubfileId& id) {
  Entry& e = by_class_[class_key(user, id.tau1, id.tau2)];
  uint64_t code = copy_code(id);
  e.count += 1;
  ++total_;
  if (exact_) {
    if (total_ > copy_cap_) {
      exact_ = false;
    } else if (!e.seen.insert(code).second) {
      throw DuplicatePhi("copy (phi1=" + std::to_string(id.phi1) +
                         ", phi2=" + std::to_string(id.phi2) + ") of user " +
                         std::to_string(user) + " class " + id.tau1.str() + "/" + id.tau2.str() +
                         " scheduled twice");
    }
  }
}

void DeliveryCensus::observe(const Transmission& t) {
  for (const InfoSlot& slot : t.info)
    for (const auto& [user, id] : slot.terms) observe_piece(user, id);
}

void DeliveryCensus::merge(const DeliveryCensus& other) {
  for (const auto& [key, entry] : other.by_class_) {
    Entry& mine = by_class_[key];
    mine.count += entry.count;
    total_ += entry.count;
    if (exact_ && other.exact_) {
      for (uint64_t code : entry.seen) {
        if (!mine.seen.insert(code).second)
          throw DuplicatePhi("copy scheduled twice (found while merging censuses)");
      }
      if (total_ > copy_cap_) exact_ = false;
    } else {
      exact_ = false;
    }
  }
}

long long DeliveryCensus::count(int user, UserSet tau1, UserSet tau2) const {
  auto it = by_class_.find(class_key(user, tau1, tau2));
  return it == by_class_.end() ? 0 : it->second.count;
}

bool DeliveryCensus::verify(const SystemConfig& cfg, const PlanMeta& meta,
                            std::vector<std::string>* errors) const {
  bool ok = true;
  auto fail = [&](const std::string& msg) {
    ok = false;
    if (errors) errors->push_back(msg);
  };
  long long expected_classes = 0;
  for (int user = 1; user <= cfg.K(); ++user) {
    long long expect = user <= cfg.K1 ? meta.copies_group1 : meta.copies_group2;
    for (const ClassSpec& cs : demanded_classes(cfg, meta.scheme, user)) {
      ++expected_classes;
      long long got = count(user, cs.tau1, cs.tau2);
      if (got != expect) {
        fail("user " + std::to_string(user) + " class " + cs.tau1.str() + "/" + cs.tau2.str() +
             ": delivered " + std::to_string(got) + ", expected " + std::to_string(expect));
      }
    }
  }
  if (expected_classes != classes())
    fail("plan delivered " + std::to_string(classes()) + " classes, expected " +
         std::to_string(expected_classes));
  return ok;
}

DeliveryCensus census(const TransmissionPlan& plan, const Demands& demands) {
  (void)demands;
  DeliveryCensus c;
  for (const Transmission& t : plan.transmissions) c.observe(t);
  return c;
}

}  // namespace hetcache
