// Copyright 2026 The hetcache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "hetcache/errors.hpp"

namespace hetcache {

/// Set of user ids out of a global numbering 1..K (K <= 32), backed by a
/// bitmask. Users of the first (larger-cache) group are 1..K1, the second
/// group occupies K1+1..K.
class UserSet {
 public:
  constexpr UserSet() : bits_(0) {}
  explicit constexpr UserSet(uint32_t bits) : bits_(bits) {}
  UserSet(std::initializer_list<int> users) : bits_(0) {
    for (int u : users) add(u);
  }

  static UserSet range(int first, int last) {  // inclusive, empty if last < first
    UserSet s;
    for (int u = first; u <= last; ++u) s.add(u);
    return s;
  }

  uint32_t bits() const { return bits_; }
  int size() const { return std::popcount(bits_); }
  bool empty() const { return bits_ == 0; }
  bool contains(int user) const { return (bits_ >> (user - 1)) & 1u; }

  void add(int user) { bits_ |= 1u << (user - 1); }
  void remove(int user) { bits_ &= ~(1u << (user - 1)); }

  UserSet with(int user) const {
    UserSet s = *this;
    s.add(user);
    return s;
  }
  UserSet without(int user) const {
    UserSet s = *this;
    s.remove(user);
    return s;
  }

  friend UserSet operator|(UserSet a, UserSet b) { return UserSet(a.bits_ | b.bits_); }
  friend UserSet operator&(UserSet a, UserSet b) { return UserSet(a.bits_ & b.bits_); }
  UserSet minus(UserSet o) const { return UserSet(bits_ & ~o.bits_); }
  bool subset_of(UserSet o) const { return (bits_ & ~o.bits_) == 0; }

  friend bool operator==(UserSet a, UserSet b) { return a.bits_ == b.bits_; }
  friend bool operator!=(UserSet a, UserSet b) { return a.bits_ != b.bits_; }
  friend bool operator<(UserSet a, UserSet b) { return a.bits_ < b.bits_; }

  /// Members in ascending order.
  std::vector<int> members() const {
    std::vector<int> out;
    out.reserve(size());
    uint32_t b = bits_;
    while (b) {
      out.push_back(std::countr_zero(b) + 1);
      b &= b - 1;
    }
    return out;
  }

  /// k-th member (0-based) in ascending order.
  int nth(int k) const {
    uint32_t b = bits_;
    while (k-- > 0) b &= b - 1;
    return std::countr_zero(b) + 1;
  }

  std::string str() const {
    std::string s = "{";
    bool first = true;
    for (int u : members()) {
      if (!first) s += ",";
      s += std::to_string(u);
      first = false;
    }
    return s + "}";
  }

 private:
  uint32_t bits_;
};

/// All subsets of `ground` with `size` elements, in lexicographic order of
/// the ascending member lists. Order is deterministic and stable; it drives
/// every scheduler loop, so golden traces depend on it.
std::vector<UserSet> enumerate_subsets(UserSet ground, int size);

/// The `size` elements of ground \ tau that cyclically succeed `s` in
/// ascending-position order. `s` must lie in ground \ tau. Throws
/// InsufficientGround when fewer than `size` other elements exist.
UserSet beta_set(UserSet ground, UserSet tau, int s, int size);

/// beta_set with the selection order preserved (cyclic successor order
/// rather than ascending ids); this is the recipient order of the uncoded
/// slots of a transmission.
std::vector<int> beta_list(UserSet ground, UserSet tau, int s, int size);

inline std::vector<UserSet> enumerate_subsets(UserSet ground, int size) {
  if (size < 0 || size > ground.size())
    throw Error("enumerate_subsets: size out of range");
  std::vector<int> elems = ground.members();
  std::vector<UserSet> out;
  std::vector<int> idx(size);
  for (int i = 0; i < size; ++i) idx[i] = i;
  const int n = static_cast<int>(elems.size());
  if (size == 0) {
    out.push_back(UserSet{});
    return out;
  }
  while (true) {
    UserSet s;
    for (int i : idx) s.add(elems[i]);
    out.push_back(s);
    int pos = size - 1;
    while (pos >= 0 && idx[pos] == n - size + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < size; ++i) idx[i] = idx[i - 1] + 1;
  }
  return out;
}

inline std::vector<int> beta_list(UserSet ground, UserSet tau, int s, int size) {
  UserSet pool = ground.minus(tau);
  if (!pool.contains(s)) throw Error("beta_set: s not in ground minus tau");
  if (pool.size() - 1 < size)
    throw InsufficientGround("beta_set: need " + std::to_string(size) +
                             " successors of " + std::to_string(s) + " in " + pool.str());
  std::vector<int> elems = pool.members();
  int pos = 0;
  while (elems[static_cast<size_t>(pos)] != s) ++pos;
  std::vector<int> out;
  out.reserve(static_cast<size_t>(size));
  const int n = static_cast<int>(elems.size());
  for (int i = 1; i <= size; ++i) out.push_back(elems[static_cast<size_t>((pos + i) % n)]);
  return out;
}

inline UserSet beta_set(UserSet ground, UserSet tau, int s, int size) {
  UserSet out;
  for (int u : beta_list(ground, tau, s, size)) out.add(u);
  return out;
}

}  // namespace hetcache

template <>
struct std::hash<hetcache::UserSet> {
  size_t operator()(const hetcache::UserSet& s) const noexcept {
    return std::hash<uint32_t>()(s.bits());
  }
};
