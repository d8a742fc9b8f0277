#pragma once

// Distillability verdicts between groups of parties.
//
// A splitting that places C and D on opposite sides blocks distillation when
// it is separable (s_k = 0) and no group of the grouping straddles it: a
// straddling group can flip it to inseparable by acting jointly, an
// unstraddled separable one can never be crossed. Inside the family this
// necessary condition is also sufficient (see protocols.hpp).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "actbe/constructors.hpp"
#include "actbe/core_model.hpp"

namespace actbe {

namespace detail {

inline std::size_t require_member(const Grouping& grouping, PartySet g, const char* what) {
  auto idx = grouping.index_of(g);
  if (!idx) throw argument_error(std::string(what) + " " + to_string(g) + " is not a group of grouping " + grouping.to_string());
  return *idx;
}

inline void require_same_n(const RhoN& state, const Grouping& grouping) {
  if (state.parties() != grouping.parties()) {
    throw argument_error("grouping is for n=" + std::to_string(grouping.parties()) + " but state has n=" +
                         std::to_string(state.parties()));
  }
}

/// The separable splittings that no group straddles, i.e. separable
/// splittings in which every group sits whole on one side. Each is an
/// assignment of groups to sides with the group holding party n pinned to A.
class BlockingSplittings {
 public:
  BlockingSplittings(const RhoN& state, const Grouping& grouping) : groups_(grouping.size()) {
    const int n = state.parties();
    ref_ = grouping.group_of(n);
    // Non-reference groups in order; bit i of an assignment moves movable_[i] to side B.
    for (std::size_t i = 0; i < grouping.size(); ++i) {
      if (i != ref_) movable_.push_back(i);
    }
    const std::size_t m = movable_.size();
    const double half = state.delta() / 2.0;
    std::vector<Mask> split_of(std::size_t{1} << m, 0);
    for (std::size_t a = 1; a < split_of.size(); ++a) {
      const std::size_t low = static_cast<std::size_t>(std::countr_zero(a));
      split_of[a] = split_of[a & (a - 1)] | grouping[movable_[low]].bits();
      if (!(state.lam_unchecked(split_of[a]) < half)) blocking_.push_back({static_cast<Mask>(a), split_of[a]});
    }
    std::sort(blocking_.begin(), blocking_.end(), [](const Entry& x, const Entry& y) { return x.split < y.split; });
    position_.assign(groups_, -1);
    for (std::size_t i = 0; i < m; ++i) position_[movable_[i]] = static_cast<int>(i);
  }

  /// Lowest-mask blocking splitting separating groups i and j, if any.
  std::optional<Mask> witness(std::size_t i, std::size_t j) const {
    for (const auto& e : blocking_) {
      if (side(e.assignment, i) != side(e.assignment, j)) return e.split;
    }
    return std::nullopt;
  }

 private:
  struct Entry {
    Mask assignment;
    Mask split;
  };

  int side(Mask assignment, std::size_t group) const {
    const int pos = position_[group];
    return pos < 0 ? 0 : static_cast<int>((assignment >> pos) & 1U);
  }

  std::size_t groups_;
  std::size_t ref_ = 0;
  std::vector<std::size_t> movable_;
  std::vector<int> position_;
  std::vector<Entry> blocking_;
};

}  // namespace detail

/// Lowest-mask splitting that separates c from d, is separable, and is
/// straddled by no group. Empty when the groups can distill.
inline std::optional<Splitting> find_witness(const RhoN& state, const Grouping& grouping, PartySet c, PartySet d) {
  detail::require_same_n(state, grouping);
  const std::size_t i = detail::require_member(grouping, c, "group");
  const std::size_t j = detail::require_member(grouping, d, "group");
  if (i == j) throw argument_error("the two groups must differ");
  detail::BlockingSplittings blocking(state, grouping);
  auto w = blocking.witness(i, j);
  if (!w) return std::nullopt;
  return Splitting(state.parties(), *w);
}

/// Every splitting separating c and d is inseparable or straddled by a group.
/// Necessary for any state; exact for family states.
inline bool necessary_distillable(const RhoN& state, const Grouping& grouping, PartySet c, PartySet d) {
  return !find_witness(state, grouping, c, d).has_value();
}

/// Exact distillability of a maximally entangled pair between groups c and d
/// when all parties cooperate. Same predicate as `necessary_distillable`; for
/// family states the joining and measurement protocols make it sufficient.
inline bool distillable_between_groups(const RhoN& state, const Grouping& grouping, PartySet c, PartySet d) {
  return necessary_distillable(state, grouping, c, d);
}

struct PairVerdict {
  std::size_t first;   // group indices into the grouping, first < second
  std::size_t second;
  bool distillable;
  std::optional<Splitting> witness;
};

struct GroupingReport {
  Grouping grouping;
  std::vector<PairVerdict> pairs;
  std::vector<std::vector<std::size_t>> ghz_sets;
};

namespace detail {

// Bron-Kerbosch with pivoting over <= 32 vertices.
inline void maximal_cliques(const std::vector<Mask>& adj, Mask r, Mask p, Mask x, std::vector<Mask>& out) {
  if (p == 0 && x == 0) {
    out.push_back(r);
    return;
  }
  const Mask px = p | x;
  const int pivot = std::countr_zero(px);
  Mask candidates = p & ~adj[pivot];
  while (candidates != 0) {
    const int v = std::countr_zero(candidates);
    const Mask bit = Mask{1} << v;
    maximal_cliques(adj, r | bit, p & adj[v], x & adj[v], out);
    p &= ~bit;
    x |= bit;
    candidates &= ~bit;
  }
}

inline std::vector<std::vector<std::size_t>> ghz_sets_from_pairs(std::size_t groups, const std::vector<PairVerdict>& pairs) {
  std::vector<Mask> adj(groups, 0);
  for (const auto& pv : pairs) {
    if (!pv.distillable) continue;
    adj[pv.first] |= Mask{1} << pv.second;
    adj[pv.second] |= Mask{1} << pv.first;
  }
  std::vector<Mask> cliques;
  const Mask everyone = groups >= 32 ? ~Mask{0} : (Mask{1} << groups) - 1;
  if (groups > 0) maximal_cliques(adj, 0, everyone, 0, cliques);
  std::vector<std::vector<std::size_t>> out;
  for (Mask c : cliques) {
    if (std::popcount(c) < 2) continue;
    std::vector<std::size_t> members;
    for (Mask b = c; b != 0; b &= b - 1) members.push_back(static_cast<std::size_t>(std::countr_zero(b)));
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Every pair verdict of the grouping plus the GHZ sets.
inline GroupingReport grouping_report(const RhoN& state, const Grouping& grouping) {
  detail::require_same_n(state, grouping);
  GroupingReport report{grouping, {}, {}};
  if (grouping.size() < 2) return report;
  detail::BlockingSplittings blocking(state, grouping);
  for (std::size_t i = 0; i < grouping.size(); ++i) {
    for (std::size_t j = i + 1; j < grouping.size(); ++j) {
      auto w = blocking.witness(i, j);
      report.pairs.push_back({i, j, !w.has_value(), w ? std::optional<Splitting>(Splitting(state.parties(), *w)) : std::nullopt});
    }
  }
  report.ghz_sets = detail::ghz_sets_from_pairs(grouping.size(), report.pairs);
  return report;
}

/// Maximal sets (of at least two groups) in which every pair can distill;
/// such a set can share a GHZ-like state. Entries are group indices.
inline std::vector<std::vector<std::size_t>> ghz_groups(const RhoN& state, const Grouping& grouping) {
  return grouping_report(state, grouping).ghz_sets;
}

/// Visits every set partition of {1..n} as restricted-growth strings in
/// lexicographic order; group g of the partition holds the parties labeled g.
template <class F>
void for_each_set_partition(int n, F&& f) {
  detail::check_party_count(n);
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  std::vector<int> prefix_max(static_cast<std::size_t>(n), 0);
  while (true) {
    int blocks = 0;
    for (int v : rgs) blocks = std::max(blocks, v + 1);
    std::vector<PartySet> groups(static_cast<std::size_t>(blocks));
    for (int p = 0; p < n; ++p) groups[static_cast<std::size_t>(rgs[p])] = groups[static_cast<std::size_t>(rgs[p])] | PartySet::single(p + 1);
    f(Grouping(n, std::move(groups)));

    int i = n - 1;
    while (i > 0 && rgs[i] > prefix_max[i - 1]) --i;
    if (i == 0) return;
    ++rgs[i];
    prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
    for (int k = i + 1; k < n; ++k) {
      rgs[k] = 0;
      prefix_max[k] = prefix_max[k - 1];
    }
  }
}

inline bool is_two_group(const Grouping& g) { return g.size() == 2; }

struct ClassifyOptions {
  int guard = 10;
  std::function<bool(const Grouping&)> filter;  // empty: every partition
};

/// grouping_report for every set partition of the parties (optionally
/// filtered). Refuses n > guard because the Bell numbers explode.
inline std::vector<GroupingReport> classify_groupings(const RhoN& state, const ClassifyOptions& options = {}) {
  const int n = state.parties();
  if (n > options.guard) {
    throw argument_error("refusing to enumerate set partitions of " + std::to_string(n) + " parties (guard " +
                         std::to_string(options.guard) + "); their number grows like the Bell numbers");
  }
  std::vector<GroupingReport> out;
  for_each_set_partition(n, [&](const Grouping& g) {
    if (options.filter && !options.filter(g)) return;
    out.push_back(grouping_report(state, g));
  });
  return out;
}

/// Predicate over specifications; evaluates the activation behavior of the
/// family state realizing the specification.
using Requirement = std::function<bool(const Specification&)>;

struct SearchResult {
  std::optional<Specification> witness;
  std::uint64_t examined = 0;
  bool exhausted() const { return !witness.has_value(); }
};

inline constexpr int kSearchMaxParties = 6;

/// Exhaustive search over all 2^(2^{n-1}-1) specifications. Candidates run
/// from the all-inseparable pattern downward: bit (k-1) of a descending
/// counter is the entry for label k.
inline SearchResult impossibility_search(int n, const Requirement& requirement) {
  detail::check_party_count(n);
  if (n > kSearchMaxParties) {
    throw argument_error("specification search is limited to n <= " + std::to_string(kSearchMaxParties));
  }
  const std::size_t labels = splitting_count(n);
  const std::uint64_t count = std::uint64_t{1} << labels;
  SearchResult result;
  std::vector<std::uint8_t> bits(labels);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t code = count - 1 - i;
    for (std::size_t b = 0; b < labels; ++b) bits[b] = static_cast<std::uint8_t>((code >> b) & 1U);
    Specification spec(n, bits);
    ++result.examined;
    if (requirement(spec)) {
      result.witness = std::move(spec);
      return result;
    }
  }
  return result;
}

namespace requirements {

namespace impl {

inline Grouping with_joined(int n, PartySet joined) {
  std::vector<PartySet> gs{joined};
  for (int p = 1; p <= n; ++p)
    if (!joined.contains(p)) gs.push_back(PartySet::single(p));
  return Grouping(n, std::move(gs));
}

inline bool no_pair_distillable(const RhoN& state, const Grouping& g) {
  const auto report = grouping_report(state, g);
  return std::none_of(report.pairs.begin(), report.pairs.end(), [](const PairVerdict& p) { return p.distillable; });
}

/// Entangled, yet no pair of separate parties can distill.
inline bool bound_entangled(const RhoN& state) {
  const auto s = s_vector(state);
  const bool entangled = std::any_of(s.begin(), s.end(), [](std::uint8_t b) { return b != 0; });
  return entangled && no_pair_distillable(state, Grouping::singletons(state.parties()));
}

inline bool pair12_distillable(const RhoN& state, PartySet joined) {
  return distillable_between_groups(state, with_joined(state.parties(), joined), PartySet{1}, PartySet{2});
}

}  // namespace impl

/// Bound entangled with all parties separate, and A1-A2 becomes distillable
/// whenever any two of the helpers A3..An join.
inline Requirement any_two_helpers_activate() {
  return [](const Specification& spec) {
    const int n = spec.parties();
    if (n < 4) return false;
    const RhoN state = from_specification(spec);
    if (!impl::bound_entangled(state)) return false;
    for (int a = 3; a <= n; ++a) {
      for (int b = a + 1; b <= n; ++b) {
        if (!impl::pair12_distillable(state, PartySet{a, b})) return false;
      }
    }
    return true;
  };
}

/// Five parties: bound entangled when separate; A1-A2 activated by joining
/// (A3A4) or (A3A5); nothing distillable when (A4A5) join; and no bipartition
/// keeping A1 with A2 is distillable.
inline Requirement example_vii_activation() {
  return [](const Specification& spec) {
    if (spec.parties() != 5) return false;
    const RhoN state = from_specification(spec);
    if (!impl::bound_entangled(state)) return false;
    if (!impl::pair12_distillable(state, PartySet{3, 4})) return false;
    if (!impl::pair12_distillable(state, PartySet{3, 5})) return false;
    if (!impl::no_pair_distillable(state, impl::with_joined(5, PartySet{4, 5}))) return false;
    for (Mask k = 1; k <= splitting_count(5); ++k) {
      const Splitting s(5, k);
      if (s.separates(PartySet{1}, PartySet{2})) continue;
      const Grouping two(5, {s.side_a(), s.side_b()});
      if (distillable_between_groups(state, two, s.side_a(), s.side_b())) return false;
    }
    return true;
  };
}

inline Requirement always() {
  return [](const Specification&) { return true; };
}

}  // namespace requirements

}  // namespace actbe
