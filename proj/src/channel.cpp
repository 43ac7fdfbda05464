// Copyright 2026 The hetcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetcache/channel.hpp"

#include <algorithm>
#include <map>
#include <random>

#ifdef HETCACHE_HAVE_OPENMP
#include <omp.h>
#endif

#include "hetcache/delivery.hpp"

namespace hetcache {

ChannelMatrix gen_channel(int K, int L, uint64_t seed, uint64_t prime) {
  if (K < L || L < 1) throw Error("gen_channel: need K >= L >= 1");
  if (prime <= static_cast<uint64_t>(K) * static_cast<uint64_t>(L))
    throw Error("gen_channel: prime too small for K*L genericity margin");
  ChannelMatrix ch;
  ch.K = K;
  ch.L = L;
  ch.prime = prime;
  ch.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<uint64_t> dist(1, prime - 1);
  ch.h.resize(static_cast<size_t>(K) * static_cast<size_t>(L));
  for (auto& v : ch.h) v = dist(rng);
  return ch;
}

Precoder zf_precoder(const ChannelMatrix& ch, const std::vector<int>& lambda) {
  const int u = static_cast<int>(lambda.size());
  if (u < 1 || u > ch.L) throw Error("zf_precoder: bad precoded-set size");
  Fp f(ch.prime);
  // Gauss-Jordan inverse of the u x u submatrix (lambda rows, first u
  // antenna columns).
  std::vector<uint64_t> a(static_cast<size_t>(u) * static_cast<size_t>(u));
  std::vector<uint64_t> inv(static_cast<size_t>(u) * static_cast<size_t>(u), 0);
  for (int i = 0; i < u; ++i) {
    for (int j = 0; j < u; ++j)
      a[static_cast<size_t>(i) * u + static_cast<size_t>(j)] = ch.at(lambda[static_cast<size_t>(i)], j);
    inv[static_cast<size_t>(i) * u + static_cast<size_t>(i)] = 1;
  }
  for (int col = 0; col < u; ++col) {
    int pivot = -1;
    for (int row = col; row < u; ++row) {
      if (a[static_cast<size_t>(row) * u + static_cast<size_t>(col)] != 0) {
        pivot = row;
        break;
      }
    }
    if (pivot < 0) throw SingularSubmatrix("zf_precoder: singular submatrix");
    if (pivot != col) {
      for (int j = 0; j < u; ++j) {
        std::swap(a[static_cast<size_t>(pivot) * u + static_cast<size_t>(j)],
                  a[static_cast<size_t>(col) * u + static_cast<size_t>(j)]);
        std::swap(inv[static_cast<size_t>(pivot) * u + static_cast<size_t>(j)],
                  inv[static_cast<size_t>(col) * u + static_cast<size_t>(j)]);
      }
    }
    uint64_t d = f.inv(a[static_cast<size_t>(col) * u + static_cast<size_t>(col)]);
    for (int j = 0; j < u; ++j) {
      a[static_cast<size_t>(col) * u + static_cast<size_t>(j)] =
          f.mul(a[static_cast<size_t>(col) * u + static_cast<size_t>(j)], d);
      inv[static_cast<size_t>(col) * u + static_cast<size_t>(j)] =
          f.mul(inv[static_cast<size_t>(col) * u + static_cast<size_t>(j)], d);
    }
    for (int row = 0; row < u; ++row) {
      if (row == col) continue;
      uint64_t factor = a[static_cast<size_t>(row) * u + static_cast<size_t>(col)];
      if (factor == 0) continue;
      for (int j = 0; j < u; ++j) {
        a[static_cast<size_t>(row) * u + static_cast<size_t>(j)] =
            f.sub(a[static_cast<size_t>(row) * u + static_cast<size_t>(j)],
                  f.mul(factor, a[static_cast<size_t>(col) * u + static_cast<size_t>(j)]));
        inv[static_cast<size_t>(row) * u + static_cast<size_t>(j)] =
            f.sub(inv[static_cast<size_t>(row) * u + static_cast<size_t>(j)],
                  f.mul(factor, inv[static_cast<size_t>(col) * u + static_cast<size_t>(j)]));
      }
    }
  }
  Precoder p;
  p.u = u;
  p.cols.resize(static_cast<size_t>(u) * static_cast<size_t>(u));
  // inv is row-major inverse; store column-major (column j = beamformer of
  // lambda[j], i.e. inverse column j).
  for (int j = 0; j < u; ++j)
    for (int i = 0; i < u; ++i)
      p.cols[static_cast<size_t>(j) * u + static_cast<size_t>(i)] =
          inv[static_cast<size_t>(i) * u + static_cast<size_t>(j)];
  return p;
}

CoefficientLedger receive(const Transmission& t, const ChannelMatrix& ch, const Precoder& pre) {
  const int u = pre.u;
  if (static_cast<int>(t.info.size()) != u || static_cast<int>(t.lambda.size()) != u)
    throw Error("receive: precoder size does not match transmission");
  Fp f(ch.prime);
  CoefficientLedger led;
  led.K = ch.K;
  led.u = u;
  led.coef.resize(static_cast<size_t>(ch.K) * static_cast<size_t>(u));
  for (int k = 1; k <= ch.K; ++k) {
    for (int j = 0; j < u; ++j) {
      uint64_t acc = 0;
      for (int a = 0; a < u; ++a) acc = f.add(acc, f.mul(ch.at(k, a), pre.col(a, j)));
      led.coef[static_cast<size_t>(k - 1) * u + static_cast<size_t>(j)] = acc;
    }
  }
  return led;
}

DecodeOutcome decode_user(const CoefficientLedger& ledger, int user,
                          const PlacementResult& placement, int demanded_file,
                          const Transmission& t) {
  DecodeOutcome out;
  int desired = -1;
  for (int j = 0; j < static_cast<int>(t.info.size()); ++j) {
    const InfoSlot& slot = t.info[static_cast<size_t>(j)];
    for (const auto& [k, id] : slot.terms) {
      if (k == user && id.file == demanded_file) {
        if (desired >= 0) {
          out.status = DecodeStatus::Uncancelable;  // two desired slots never occur
          return out;
        }
        desired = j;
      }
    }
  }
  if (desired < 0) {
    out.status = DecodeStatus::NotAddressed;
    return out;
  }

  if (ledger.at(user, desired) == 0) {
    out.status = DecodeStatus::ZeroCoefficient;
    return out;
  }
  // Every other slot must vanish at this receiver or be fully cached.
  for (int j = 0; j < static_cast<int>(t.info.size()); ++j) {
    if (j == desired || ledger.at(user, j) == 0) continue;
    const InfoSlot& slot = t.info[static_cast<size_t>(j)];
    bool cached = true;
    for (const auto& [k, id] : slot.terms) {
      (void)k;
      if (!placement.is_cached(user, id)) {
        cached = false;
        break;
      }
    }
    if (!cached) {
      out.status = DecodeStatus::Uncancelable;
      return out;
    }
  }
  // Resolve the desired slot.
  const InfoSlot& slot = t.info[static_cast<size_t>(desired)];
  SubfileId own;
  for (const auto& [k, id] : slot.terms) {
    if (k == user) {
      own = id;
    } else if (!placement.is_cached(user, id)) {
      out.status = DecodeStatus::XorUnresolvable;
      return out;
    }
  }
  out.status = DecodeStatus::Recovered;
  out.recovered = own;
  return out;
}

namespace {

std::vector<std::vector<int>> unique_lambdas(const TransmissionPlan& plan) {
  std::map<std::vector<int>, bool> seen;
  for (const Transmission& t : plan.transmissions) seen.emplace(t.lambda, true);
  std::vector<std::vector<int>> out;
  out.reserve(seen.size());
  for (auto& [l, _] : seen) out.push_back(l);
  return out;
}

bool channel_is_generic(const ChannelMatrix& ch, const std::vector<std::vector<int>>& lambdas,
                        std::map<std::vector<int>, Precoder>* precoders) {
  for (const auto& lambda : lambdas) {
    Precoder pre;
    try {
      pre = zf_precoder(ch, lambda);
    } catch (const SingularSubmatrix&) {
      return false;
    }
    // No accidental zero at any receiver outside lambda: every
    // interference coefficient a cache must cancel, and every desired
    // coefficient, must be nonzero.
    Fp f(ch.prime);
    for (int k = 1; k <= ch.K; ++k) {
      if (std::find(lambda.begin(), lambda.end(), k) != lambda.end()) continue;
      for (int j = 0; j < pre.u; ++j) {
        uint64_t acc = 0;
        for (int a = 0; a < pre.u; ++a) acc = f.add(acc, f.mul(ch.at(k, a), pre.col(a, j)));
        if (acc == 0) return false;
      }
    }
    if (precoders) precoders->emplace(lambda, std::move(pre));
  }
  return true;
}

}  // namespace

ChannelMatrix gen_channel_generic(int K, int L, uint64_t seed, uint64_t prime,
                                  const std::vector<std::vector<int>>& lambdas,
                                  int max_attempts) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    ChannelMatrix ch = gen_channel(K, L, seed + static_cast<uint64_t>(attempt), prime);
    if (channel_is_generic(ch, lambdas, nullptr)) return ch;
  }
  throw GenericityFailure("no generic channel after " + std::to_string(max_attempts) +
                          " attempts (prime too small?)");
}

DecodeReport verify_plan(const TransmissionPlan& plan, const PlacementResult& placement,
                         const Demands& demands, uint64_t seed, uint64_t prime, ExecMode mode) {
  const SystemConfig& cfg = placement.config;
  demands.validate(cfg.K(), cfg.N);
  DecodeReport report;
  report.transmissions = static_cast<long long>(plan.transmissions.size());
  report.prime = prime;

  auto lambdas = unique_lambdas(plan);
  std::map<std::vector<int>, Precoder> precoders;
  int attempt = 0;
  ChannelMatrix ch;
  for (;; ++attempt) {
    if (attempt >= 32)
      throw GenericityFailure("no generic channel after 32 attempts (prime too small?)");
    ch = gen_channel(cfg.K(), cfg.L, seed + static_cast<uint64_t>(attempt), prime);
    precoders.clear();
    if (channel_is_generic(ch, lambdas, &precoders)) break;
  }
  report.channel_seed = ch.seed;
  report.resamples = attempt;

  const int K = cfg.K();
  const long long n = static_cast<long long>(plan.transmissions.size());
  // Recovered piece counts per user and a per-user census of recovered
  // classes; decode of distinct transmissions is independent, so the
  // parallel path just merges per-thread accumulators.
  std::vector<long long> recovered(static_cast<size_t>(K) + 1, 0);
  std::vector<DecodeFailure> failures;
  DeliveryCensus recovered_census;

  auto process_range = [&](long long lo, long long hi, std::vector<long long>& rec,
                           std::vector<DecodeFailure>& fails, DeliveryCensus& cen) {
    for (long long i = lo; i < hi; ++i) {
      const Transmission& t = plan.transmissions[static_cast<size_t>(i)];
      const Precoder& pre = precoders.at(t.lambda);
      CoefficientLedger led = receive(t, ch, pre);
      Transmission recovered_tx;  // census input: recovered pieces only
      for (int user = 1; user <= K; ++user) {
        DecodeOutcome out = decode_user(led, user, placement, demands[user], t);
        switch (out.status) {
          case DecodeStatus::Recovered:
            rec[static_cast<size_t>(user)]++;
            recovered_tx.info.push_back(InfoSlot::make_uncoded(user, *out.recovered));
            break;
          case DecodeStatus::NotAddressed:
            break;
          default:
            fails.push_back({i, user, out.status});
        }
      }
      cen.observe(recovered_tx);
    }
  };

#ifdef HETCACHE_HAVE_OPENMP
  if (mode == ExecMode::Parallel && n > 256) {
    int threads = omp_get_max_threads();
    std::vector<std::vector<long long>> rec_t(static_cast<size_t>(threads),
                                              std::vector<long long>(static_cast<size_t>(K) + 1, 0));
    std::vector<std::vector<DecodeFailure>> fail_t(static_cast<size_t>(threads));
    std::vector<DeliveryCensus> cen_t(static_cast<size_t>(threads));
#pragma omp parallel num_threads(threads)
    {
      int tid = omp_get_thread_num();
      long long chunk = (n + threads - 1) / threads;
      long long lo = tid * chunk;
      long long hi = std::min(n, lo + chunk);
      if (lo < hi)
        process_range(lo, hi, rec_t[static_cast<size_t>(tid)], fail_t[static_cast<size_t>(tid)],
                      cen_t[static_cast<size_t>(tid)]);
    }
    // Deterministic merge in thread-range order; every count is additive.
    for (int tid = 0; tid < threads; ++tid) {
      for (int u = 1; u <= K; ++u)
        recovered[static_cast<size_t>(u)] += rec_t[static_cast<size_t>(tid)][static_cast<size_t>(u)];
      failures.insert(failures.end(), fail_t[static_cast<size_t>(tid)].begin(),
                      fail_t[static_cast<size_t>(tid)].end());
      recovered_census.merge(cen_t[static_cast<size_t>(tid)]);
    }
  } else
#endif
  {
    process_range(0, n, recovered, failures, recovered_census);
  }

  std::sort(failures.begin(), failures.end(), [](const DecodeFailure& a, const DecodeFailure& b) {
    return std::tie(a.transmission, a.user) < std::tie(b.transmission, b.user);
  });
  report.failures = std::move(failures);
  report.recovered_per_user = std::move(recovered);

  bool census_ok =
      recovered_census.verify(cfg, plan.meta, &report.census_errors);
  report.success = report.failures.empty() && census_ok;
  return report;
}

std::string decode_status_name(DecodeStatus s) {
  switch (s) {
    case DecodeStatus::Recovered: return "recovered";
    case DecodeStatus::NotAddressed: return "not-addressed";
    case DecodeStatus::Uncancelable: return "uncancelable";
    case DecodeStatus::ZeroCoefficient: return "zero-coefficient";
    case DecodeStatus::XorUnresolvable: return "xor-unresolvable";
  }
  return "unknown";
}

}  // namespace hetcache
