// Copyright 2026 The hetcache Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetcache/matching.hpp"

#include <functional>
#include <limits>
#include <queue>
#include <unordered_map>

namespace hetcache {

MatchingInstance make_matching_instance(const SystemConfig& cfg,
                                        MatchingInstance::Copies copies) {
  const int t1 = cfg.t1();
  const int d1 = cfg.K1 - t1;
  MatchingInstance inst;
  inst.copies = copies;

  int right_per_tau;
  if (copies == MatchingInstance::Copies::Group) {
    Rational tk = t_k(cfg.K1, cfg.gamma1);
    if (!tk.is_integer())
      throw RegimeMismatch("group-copy instance requires integer T_K1");
    right_per_tau = static_cast<int>(tk.as_integer());
  } else {
    right_per_tau = d1;
  }

  std::vector<UserSet> taus = enumerate_subsets(cfg.users1(), t1);
  std::unordered_map<uint32_t, int> tau_base;
  for (UserSet tau : taus) {
    tau_base[tau.bits()] = inst.n_right;
    auto labels = copies == MatchingInstance::Copies::Phi
                      ? cfg.users1().minus(tau).members()
                      : std::vector<int>{};
    for (int c = 0; c < right_per_tau; ++c) {
      inst.right_tau.push_back(tau);
      inst.right_copy.push_back(copies == MatchingInstance::Copies::Phi
                                    ? labels[static_cast<size_t>(c)]
                                    : c + 1);
      ++inst.n_right;
    }
  }

  for (UserSet chi : enumerate_subsets(cfg.users1(), t1 + 1)) {
    for (int c = 0; c < d1; ++c) {
      inst.left_chi.push_back(chi);
      inst.left_copy.push_back(c + 1);
      std::vector<int> edges;
      for (int s : chi.members()) {
        UserSet tau = chi.without(s);
        int base = tau_base[tau.bits()];
        for (int rc = 0; rc < right_per_tau; ++rc) edges.push_back(base + rc);
      }
      inst.adj.push_back(std::move(edges));
      ++inst.n_left;
    }
  }
  return inst;
}

MatchingResult verify_perfect_matching(const MatchingInstance& inst) {
  // Hopcroft-Karp over the left/right adjacency.
  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<int> match_l(static_cast<size_t>(inst.n_left), -1);
  std::vector<int> match_r(static_cast<size_t>(inst.n_right), -1);
  std::vector<int> dist(static_cast<size_t>(inst.n_left), 0);

  auto bfs = [&]() {
    std::queue<int> q;
    bool found = false;
    for (int u = 0; u < inst.n_left; ++u) {
      if (match_l[static_cast<size_t>(u)] == -1) {
        dist[static_cast<size_t>(u)] = 0;
        q.push(u);
      } else {
        dist[static_cast<size_t>(u)] = kInf;
      }
    }
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : inst.adj[static_cast<size_t>(u)]) {
        int w = match_r[static_cast<size_t>(v)];
        if (w == -1) {
          found = true;
        } else if (dist[static_cast<size_t>(w)] == kInf) {
          dist[static_cast<size_t>(w)] = dist[static_cast<size_t>(u)] + 1;
          q.push(w);
        }
      }
    }
    return found;
  };

  std::function<bool(int)> dfs = [&](int u) {
    for (int v : inst.adj[static_cast<size_t>(u)]) {
      int w = match_r[static_cast<size_t>(v)];
      if (w == -1 ||
          (dist[static_cast<size_t>(w)] == dist[static_cast<size_t>(u)] + 1 && dfs(w))) {
        match_l[static_cast<size_t>(u)] = v;
        match_r[static_cast<size_t>(v)] = u;
        return true;
      }
    }
    dist[static_cast<size_t>(u)] = kInf;
    return false;
  };

  MatchingResult res;
  while (bfs()) {
    for (int u = 0; u < inst.n_left; ++u)
      if (match_l[static_cast<size_t>(u)] == -1 && dfs(u)) ++res.matched;
  }
  res.match_of_left = std::move(match_l);
  res.match_of_right = std::move(match_r);
  res.rhs_saturated = res.matched == inst.n_right;
  return res;
}

std::vector<ExplicitMatch> build_matching(const SystemConfig& cfg) {
  const int t1 = cfg.t1();
  std::vector<ExplicitMatch> out;
  std::unordered_map<uint32_t, int> copies_used;
  for (UserSet tau : enumerate_subsets(cfg.users1(), t1)) {
    for (int phi : cfg.users1().minus(tau).members()) {
      ExplicitMatch m;
      m.tau = tau;
      m.phi = phi;
      m.chi = tau.with(phi);
      m.chi_copy = ++copies_used[m.chi.bits()];
      out.push_back(m);
    }
  }
  return out;
}

}  // namespace hetcache
