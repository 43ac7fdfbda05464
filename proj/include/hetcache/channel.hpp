// Copyright 2026 The hetcache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetcache/placement.hpp"
#include "hetcache/plan.hpp"

namespace hetcache {

/// Arithmetic over the prime field F_p. The channel simulation runs at the
/// degrees-of-freedom level: no noise, and field arithmetic stands in for
/// generic complex coefficients (a generic complex matrix is invertible
/// exactly when a random matrix over a large prime field is, up to
/// vanishing probability).
class Fp {
 public:
  explicit Fp(uint64_t p) : p_(p) {}
  uint64_t p() const { return p_; }
  uint64_t add(uint64_t a, uint64_t b) const { return (a + b) % p_; }
  uint64_t sub(uint64_t a, uint64_t b) const { return (a + p_ - b) % p_; }
  uint64_t mul(uint64_t a, uint64_t b) const {
    return static_cast<uint64_t>((static_cast<__uint128_t>(a) * b) % p_);
  }
  uint64_t pow(uint64_t a, uint64_t e) const {
    uint64_t r = 1;
    a %= p_;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  uint64_t inv(uint64_t a) const { return pow(a, p_ - 2); }

 private:
  uint64_t p_;
};

constexpr uint64_t kDefaultPrime = 2147483647ull;  // 2^31 - 1

/// K x L channel over F_p, reproducible from the seed.
struct ChannelMatrix {
  int K = 0;
  int L = 0;
  uint64_t prime = kDefaultPrime;
  uint64_t seed = 0;
  std::vector<uint64_t> h;  // row-major K x L

  uint64_t at(int user, int antenna) const {  // user 1-based, antenna 0-based
    return h[static_cast<size_t>(user - 1) * static_cast<size_t>(L) +
             static_cast<size_t>(antenna)];
  }
};

/// Draws a pseudo-random channel; entries are nonzero. Throws
/// GenericityFailure only via the checked helpers below.
ChannelMatrix gen_channel(int K, int L, uint64_t seed, uint64_t prime = kDefaultPrime);

/// Zero-forcing precoder for an ordered precoded set lambda: the inverse of
/// the |lambda| x |lambda| channel submatrix (rows = lambda users, columns
/// = the first |lambda| antennas). Column j is the beamformer of
/// lambda[j]: h_k . col_j = 1 for k = lambda[j], 0 for other members, and
/// generically nonzero for outsiders.
struct Precoder {
  int u = 0;                   // active streams
  std::vector<uint64_t> cols;  // u x u, column-major
  uint64_t col(int row, int j) const {
    return cols[static_cast<size_t>(j) * static_cast<size_t>(u) + static_cast<size_t>(row)];
  }
};
Precoder zf_precoder(const ChannelMatrix& ch, const std::vector<int>& lambda);

/// Exact received coefficients of every user for one transmission:
/// ledger.coef(k, j) multiplies info slot j at receiver k.
struct CoefficientLedger {
  int K = 0;
  int u = 0;
  std::vector<uint64_t> coef;  // K x u row-major
  uint64_t at(int user, int slot) const {
    return coef[static_cast<size_t>(user - 1) * static_cast<size_t>(u) +
                static_cast<size_t>(slot)];
  }
};
CoefficientLedger receive(const Transmission& t, const ChannelMatrix& ch, const Precoder& pre);

enum class DecodeStatus {
  Recovered,
  NotAddressed,      // no demanded content in this transmission; not a failure
  Uncancelable,      // two or more uncached slots with nonzero coefficients
  ZeroCoefficient,   // desired slot vanished at the receiver
  XorUnresolvable,   // a non-desired XOR term is missing from the cache
};

struct DecodeOutcome {
  DecodeStatus status = DecodeStatus::NotAddressed;
  std::optional<SubfileId> recovered;
};

/// One user's decoding of one transmission from its ledger row, its cache
/// and full CSI: cancel every slot that is entirely cached or nulled by
/// precoding; succeed iff exactly the desired slot remains and, for a XOR,
/// all other terms are cached.
DecodeOutcome decode_user(const CoefficientLedger& ledger, int user,
                          const PlacementResult& placement, int demanded_file,
                          const Transmission& t);

struct DecodeFailure {
  long long transmission = 0;
  int user = 0;
  DecodeStatus status = DecodeStatus::NotAddressed;
};

struct DecodeReport {
  bool success = false;
  long long transmissions = 0;
  uint64_t channel_seed = 0;
  uint64_t prime = 0;
  int resamples = 0;
  std::vector<DecodeFailure> failures;
  // per user: number of recovered pieces
  std::vector<long long> recovered_per_user;  // index 0 unused
  std::vector<std::string> census_errors;
};

enum class ExecMode { Serial, Parallel };

/// Runs receive + decode_user for every transmission and user of a
/// materialized plan, checks the recovered pieces against the plan's copy
/// counts, and reports. The channel is resampled (bounded) until every
/// precoded set of the plan is invertible and free of accidental zeros.
/// Serial and parallel execution produce identical reports.
DecodeReport verify_plan(const TransmissionPlan& plan, const PlacementResult& placement,
                         const Demands& demands, uint64_t seed,
                         uint64_t prime = kDefaultPrime, ExecMode mode = ExecMode::Parallel);

/// Channel generation that additionally guarantees genericity for every
/// precoded set in `lambdas` (resampling up to max_attempts, then
/// GenericityFailure).
ChannelMatrix gen_channel_generic(int K, int L, uint64_t seed, uint64_t prime,
                                  const std::vector<std::vector<int>>& lambdas,
                                  int max_attempts = 32);

std::string decode_status_name(DecodeStatus s);

}  // namespace hetcache
