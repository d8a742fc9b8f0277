#pragma once

// Independent reference implementations used only by the tests. They trade
// speed for directness: explicit party loops instead of bit tricks, full
// subset enumeration instead of pruning.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "actbe/core_model.hpp"

namespace oracle {

using actbe::Mask;
using actbe::PartySet;

/// side[p] = 0 for side A (holding party n), 1 for side B.
inline std::vector<int> sides(int n, Mask mask) {
  std::vector<int> side(static_cast<std::size_t>(n) + 1, 0);
  for (int p = 1; p < n; ++p) side[static_cast<std::size_t>(p)] = (mask >> (p - 1)) & 1U;
  return side;
}

inline bool all_on(const std::vector<int>& side, PartySet g, int which) {
  for (int p : g.parties()) {
    if (side[static_cast<std::size_t>(p)] != which) return false;
  }
  return true;
}

inline bool separates(int n, Mask mask, PartySet c, PartySet d) {
  const auto side = sides(n, mask);
  return (all_on(side, c, 0) && all_on(side, d, 1)) || (all_on(side, c, 1) && all_on(side, d, 0));
}

inline bool straddles(int n, Mask mask, PartySet g) {
  const auto side = sides(n, mask);
  return !all_on(side, g, 0) && !all_on(side, g, 1);
}

inline std::vector<Mask> separating(int n, PartySet c, PartySet d) {
  std::vector<Mask> out;
  for (Mask m = 1; m < (Mask{1} << (n - 1)); ++m) {
    if (separates(n, m, c, d)) out.push_back(m);
  }
  return out;
}

inline int s_bit(const actbe::RhoN& state, Mask mask) {
  return state.lam(mask) < (state.lam0_plus() - state.lam0_minus()) / 2.0 ? 1 : 0;
}

/// Brute-force verdict: a separating splitting that is separable and that no
/// group straddles blocks distillation. Returns the lowest blocking mask or 0.
inline Mask blocking_mask(const actbe::RhoN& state, const actbe::Grouping& g, PartySet c, PartySet d) {
  const int n = state.parties();
  for (Mask m : separating(n, c, d)) {
    if (s_bit(state, m)) continue;
    const bool flippable = std::any_of(g.groups().begin(), g.groups().end(), [&](PartySet grp) { return straddles(n, m, grp); });
    if (!flippable) return m;
  }
  return 0;
}

inline bool verdict(const actbe::RhoN& state, const actbe::Grouping& g, PartySet c, PartySet d) {
  return blocking_mask(state, g, c, d) == 0;
}

/// All maximal sets (size >= 2) of group indices that are pairwise distillable.
inline std::vector<std::vector<std::size_t>> ghz_sets(const actbe::RhoN& state, const actbe::Grouping& g) {
  const std::size_t k = g.size();
  std::vector<std::vector<int>> ok(k, std::vector<int>(k, 0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) ok[i][j] = ok[j][i] = verdict(state, g, g[i], g[j]);
  }
  auto clique = [&](std::uint32_t s) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        if ((s >> i & 1U) && (s >> j & 1U) && !ok[i][j]) return false;
      }
    }
    return true;
  };
  std::vector<std::uint32_t> cliques;
  for (std::uint32_t s = 1; s < (1U << k); ++s) {
    if (std::popcount(s) >= 2 && clique(s)) cliques.push_back(s);
  }
  std::vector<std::vector<std::size_t>> out;
  for (auto s : cliques) {
    const bool maximal = std::none_of(cliques.begin(), cliques.end(), [&](std::uint32_t t) { return t != s && (t & s) == s; });
    if (!maximal) continue;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < k; ++i) {
      if (s >> i & 1U) members.push_back(i);
    }
    out.push_back(members);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// |+> measurement of `party` by scattering every parent label onto its
/// reduced label (the library gathers instead). Unnormalized.
inline actbe::RhoN scatter_measure(const actbe::RhoN& state, int party) {
  const int n = state.parties();
  std::vector<double> lam(actbe::splitting_count(n - 1), 0.0);
  double extra = 0.0;
  for (Mask k = 1; k < (Mask{1} << (n - 1)); ++k) {
    Mask reduced = 0;
    int out_bit = 0;
    for (int p = 1; p < n; ++p) {
      if (p == party) continue;
      if ((k >> (p - 1)) & 1U) reduced |= Mask{1} << out_bit;
      ++out_bit;
    }
    if (reduced == 0) {
      extra += state.lam(k);
    } else {
      lam[reduced - 1] += state.lam(k);
    }
  }
  return actbe::RhoN(n - 1, state.lam0_plus() + extra, state.lam0_minus() + extra, std::move(lam));
}

inline std::uint64_t bell_number(int n) {
  // Bell triangle
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i <= n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (auto v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

/// Random grouping: every party draws one of up to `max_groups` labels.
inline actbe::Grouping random_grouping(int n, int max_groups, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, max_groups - 1);
  std::vector<PartySet> buckets(static_cast<std::size_t>(max_groups));
  for (int p = 1; p <= n; ++p) {
    auto& b = buckets[static_cast<std::size_t>(pick(rng))];
    b = b | PartySet::single(p);
  }
  std::vector<PartySet> groups;
  for (auto b : buckets) {
    if (!b.empty()) groups.push_back(b);
  }
  return actbe::Grouping(n, std::move(groups));
}

inline PartySet random_subset(int n, int min_size, std::mt19937_64& rng) {
  std::uniform_int_distribution<Mask> pick(0, (Mask{1} << n) - 1);
  while (true) {
    PartySet s(pick(rng));
    if (s.size() >= min_size) return s;
  }
}

}  // namespace oracle
