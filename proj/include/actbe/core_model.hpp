#pragma once

// Coefficient model of the N-qubit GHZ-diagonal family
//
//   rho = sum_{s=+,-} lam0^s |Psi_0^s><Psi_0^s|
//       + sum_{k != 0} lam_k (|Psi_k^+><Psi_k^+| + |Psi_k^-><Psi_k^-|),
//
//   |Psi_k^+-> = (|k_1 ... k_{n-1} 0> +- |~k_1 ... ~k_{n-1} 1>) / sqrt(2),
//
// together with the bipartite-splitting combinatorics that decide its
// separability.
//
// Bit convention (used everywhere, including file formats and the dense
// oracle): party i in {1..n} owns bit (i-1). A splitting label k stores k_i at
// bit (i-1), so k_1 is the least significant bit. Party n is the reference
// party; it always sits on side A and never appears in a label.

#include <algorithm>
#include <bit>
#include <compare>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "actbe/error.hpp"

namespace actbe {

using Mask = std::uint32_t;

/// Largest party count the coefficient engine accepts (2^23 labels).
inline constexpr int kMaxParties = 24;

/// Tolerance on lam0_plus + lam0_minus + 2 sum lam_k = 1.
inline constexpr double kNormalizationTolerance = 1e-12;

namespace detail {

inline void check_party_count(int n) {
  if (n < 2 || n > kMaxParties) {
    throw argument_error("party count must lie in [2, " + std::to_string(kMaxParties) +
                         "], got " + std::to_string(n));
  }
}

constexpr Mask label_space(int n) { return Mask{1} << (n - 1); }

}  // namespace detail

/// Set of parties, party i stored at bit (i-1).
class PartySet {
 public:
  constexpr PartySet() = default;
  constexpr explicit PartySet(Mask bits) : bits_(bits) {}
  PartySet(std::initializer_list<int> parties) {
    for (int p : parties) {
      if (p < 1 || p > kMaxParties) throw argument_error("party index out of range: " + std::to_string(p));
      bits_ |= Mask{1} << (p - 1);
    }
  }

  static constexpr PartySet all(int n) { return PartySet((Mask{1} << n) - 1); }
  static constexpr PartySet single(int p) { return PartySet(Mask{1} << (p - 1)); }

  constexpr Mask bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool contains(int p) const { return p >= 1 && p <= 32 && ((bits_ >> (p - 1)) & 1U) != 0; }
  constexpr bool subset_of(PartySet o) const { return (bits_ & ~o.bits_) == 0; }
  constexpr bool intersects(PartySet o) const { return (bits_ & o.bits_) != 0; }
  /// Highest party index in the set (0 when empty).
  constexpr int max_party() const { return bits_ == 0 ? 0 : 32 - std::countl_zero(bits_); }
  constexpr int min_party() const { return bits_ == 0 ? 0 : std::countr_zero(bits_) + 1; }

  std::vector<int> parties() const {
    std::vector<int> out;
    for (Mask b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b) + 1);
    return out;
  }

  friend constexpr PartySet operator|(PartySet a, PartySet b) { return PartySet(a.bits_ | b.bits_); }
  friend constexpr PartySet operator&(PartySet a, PartySet b) { return PartySet(a.bits_ & b.bits_); }
  friend constexpr PartySet operator-(PartySet a, PartySet b) { return PartySet(a.bits_ & ~b.bits_); }
  friend constexpr auto operator<=>(PartySet, PartySet) = default;

 private:
  Mask bits_ = 0;
};

/// "{1,3,5}"
inline std::string to_string(PartySet s) {
  std::string out = "{";
  bool first = true;
  for (int p : s.parties()) {
    if (!first) out += ',';
    out += std::to_string(p);
    first = false;
  }
  return out + "}";
}

/// "A1A3A5"
inline std::string party_names(PartySet s) {
  std::string out;
  for (int p : s.parties()) out += "A" + std::to_string(p);
  return out;
}

/// Bipartition of n parties, identified by the side B that does not contain
/// party n.
class Splitting {
 public:
  Splitting(int n, Mask mask) : n_(n), mask_(mask) {
    detail::check_party_count(n);
    if (mask == 0 || mask >= detail::label_space(n)) {
      throw argument_error("splitting mask " + std::to_string(mask) + " out of range for n=" + std::to_string(n));
    }
  }

  /// Builds the splitting that has `side` on one side (either orientation).
  static Splitting from_side(int n, PartySet side) {
    detail::check_party_count(n);
    const PartySet everyone = PartySet::all(n);
    if (!side.subset_of(everyone)) throw argument_error("side " + to_string(side) + " not within parties of n=" + std::to_string(n));
    const PartySet b = side.contains(n) ? everyone - side : side;
    return Splitting(n, b.bits());
  }

  int parties() const { return n_; }
  Mask mask() const { return mask_; }
  PartySet side_b() const { return PartySet(mask_); }
  PartySet side_a() const { return PartySet::all(n_) - side_b(); }

  /// True when c and d lie entirely on opposite sides.
  bool separates(PartySet c, PartySet d) const {
    const PartySet a = side_a(), b = side_b();
    return (c.subset_of(a) && d.subset_of(b)) || (c.subset_of(b) && d.subset_of(a));
  }

  /// The bit chain k_1 k_2 ... k_{n-1} written left to right.
  std::string label() const {
    std::string out;
    for (int i = 0; i < n_ - 1; ++i) out += ((mask_ >> i) & 1U) ? '1' : '0';
    return out;
  }

  /// "(A1A3)-(A2)", side A first.
  std::string describe() const { return "(" + party_names(side_a()) + ")-(" + party_names(side_b()) + ")"; }

  friend bool operator==(const Splitting&, const Splitting&) = default;

 private:
  int n_;
  Mask mask_;
};

/// Number of bipartite splittings of n parties, 2^{n-1} - 1.
constexpr Mask splitting_count(int n) { return detail::label_space(n) - 1; }

/// Coefficient vector of a family state. Values are immutable; the
/// constructor only checks shape, `validate` checks the physical invariants.
class RhoN {
 public:
  /// `lam[i]` is the weight of label i+1.
  RhoN(int n, double lam0_plus, double lam0_minus, std::vector<double> lam)
      : n_(n), lam0_plus_(lam0_plus), lam0_minus_(lam0_minus), delta_(lam0_plus - lam0_minus) {
    detail::check_party_count(n);
    if (lam.size() != splitting_count(n)) {
      throw argument_error("expected " + std::to_string(splitting_count(n)) + " label coefficients for n=" +
                           std::to_string(n) + ", got " + std::to_string(lam.size()));
    }
    lam_.reserve(lam.size() + 1);
    lam_.push_back(0.0);
    lam_.insert(lam_.end(), lam.begin(), lam.end());
  }

  /// Builds lam0+- = mean +- delta/2 while keeping delta itself as given.
  /// Repeated amplification drives delta far below the rounding error of
  /// lam0+ - lam0-, and every s_k depends on it.
  static RhoN from_mean_and_delta(int n, double mean, double delta, std::vector<double> lam) {
    return with_delta(n, mean + delta / 2.0, mean - delta / 2.0, delta, std::move(lam));
  }

  /// Same coefficients as the plain constructor, with delta supplied by a caller that knows it more precisely.
  static RhoN with_delta(int n, double lam0_plus, double lam0_minus, double delta, std::vector<double> lam) {
    RhoN out(n, lam0_plus, lam0_minus, std::move(lam));
    out.delta_ = delta;
    return out;
  }

  int parties() const { return n_; }
  double lam0_plus() const { return lam0_plus_; }
  double lam0_minus() const { return lam0_minus_; }
  double lam(Mask label) const {
    if (label == 0 || label >= lam_.size()) throw argument_error("label " + std::to_string(label) + " out of range");
    return lam_[label];
  }
  /// Unchecked access for hot loops; label must be in [1, 2^{n-1}).
  double lam_unchecked(Mask label) const { return lam_[label]; }
  /// Coefficients for labels 1 .. 2^{n-1}-1, in label order.
  std::span<const double> lams() const { return std::span<const double>(lam_).subspan(1); }

  double delta() const { return delta_; }

  double total_weight() const {
    double sum = 0.0;
    for (double v : lams()) sum += v;
    return lam0_plus_ + lam0_minus_ + 2.0 * sum;
  }

  RhoN normalized() const {
    const double t = total_weight();
    if (!(t > 0.0) || !std::isfinite(t)) throw unsupported_error("cannot normalize a state of total weight " + std::to_string(t));
    std::vector<double> lam(lams().begin(), lams().end());
    for (double& v : lam) v /= t;
    RhoN out(n_, lam0_plus_ / t, lam0_minus_ / t, std::move(lam));
    out.delta_ = delta_ / t;
    return out;
  }

 private:
  int n_;
  double lam0_plus_;
  double lam0_minus_;
  double delta_;
  std::vector<double> lam_;  // slot 0 unused
};

inline double delta(const RhoN& state) { return state.delta(); }

/// Every violated invariant of `state`; empty when the state is valid.
inline std::vector<Violation> validate(const RhoN& state) {
  std::vector<Violation> out;
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };

  bool finite = std::isfinite(state.lam0_plus()) && std::isfinite(state.lam0_minus());
  if (state.lam0_plus() < 0.0) out.push_back({"non-negative coefficients", "lam0_plus = " + fmt(state.lam0_plus())});
  if (state.lam0_minus() < 0.0) out.push_back({"non-negative coefficients", "lam0_minus = " + fmt(state.lam0_minus())});
  Mask label = 1;
  for (double v : state.lams()) {
    if (!std::isfinite(v)) finite = false;
    if (v < 0.0) out.push_back({"non-negative coefficients", "lam[" + std::to_string(label) + "] = " + fmt(v)});
    ++label;
  }
  if (!finite) out.push_back({"finite coefficients", "a coefficient is NaN or infinite"});
  if (state.delta() < 0.0) {
    out.push_back({"Δ < 0", "lam0_minus (" + fmt(state.lam0_minus()) + ") exceeds lam0_plus (" + fmt(state.lam0_plus()) + ")"});
  }
  const double total = state.total_weight();
  if (!(std::abs(total - 1.0) <= kNormalizationTolerance)) {
    out.push_back({"normalization", "lam0_plus + lam0_minus + 2*sum(lam) = " + fmt(total)});
  }
  return out;
}

inline void require_valid(const RhoN& state) {
  auto v = validate(state);
  if (!v.empty()) throw validation_error(std::move(v));
}

/// 1 iff lam_k < Delta/2 (strict); equals the NPT indicator of the splitting.
inline int s_coefficient(const RhoN& state, const Splitting& split) {
  if (split.parties() != state.parties()) {
    throw argument_error("splitting is for n=" + std::to_string(split.parties()) + " but state has n=" +
                         std::to_string(state.parties()));
  }
  return state.lam_unchecked(split.mask()) < state.delta() / 2.0 ? 1 : 0;
}

/// s_k for every label, index label-1.
inline std::vector<std::uint8_t> s_vector(const RhoN& state) {
  const double half = state.delta() / 2.0;
  std::vector<std::uint8_t> out;
  out.reserve(state.lams().size());
  for (double v : state.lams()) out.push_back(v < half ? 1 : 0);
  return out;
}

inline std::string s_string(const std::vector<std::uint8_t>& s) {
  std::string out;
  out.reserve(s.size());
  for (auto b : s) out += b ? '1' : '0';
  return out;
}

/// Set partition of the parties into non-empty groups.
class Grouping {
 public:
  Grouping(int n, std::vector<PartySet> groups) : n_(n), groups_(std::move(groups)) {
    detail::check_party_count(n);
    PartySet seen;
    for (const auto& g : groups_) {
      if (g.empty()) throw argument_error("grouping contains an empty group");
      if (!g.subset_of(PartySet::all(n))) throw argument_error("group " + actbe::to_string(g) + " names a party outside 1.." + std::to_string(n));
      if (g.intersects(seen)) throw argument_error("groups overlap at " + actbe::to_string(g & seen));
      seen = seen | g;
    }
    if (seen != PartySet::all(n)) throw argument_error("grouping does not cover parties " + actbe::to_string(PartySet::all(n) - seen));
  }

  static Grouping singletons(int n) {
    detail::check_party_count(n);
    std::vector<PartySet> gs;
    for (int p = 1; p <= n; ++p) gs.push_back(PartySet::single(p));
    return Grouping(n, std::move(gs));
  }

  /// Parses "1,2,3|4,5": groups separated by '|', parties by ','.
  static Grouping parse(int n, std::string_view text) {
    std::vector<PartySet> groups;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t bar = text.find('|', start);
      if (bar == std::string_view::npos) bar = text.size();
      groups.push_back(parse_party_list(text.substr(start, bar - start)));
      start = bar + 1;
    }
    return Grouping(n, std::move(groups));
  }

  static PartySet parse_party_list(std::string_view text) {
    PartySet out;
    std::size_t start = 0;
    bool any = false;
    while (start <= text.size()) {
      std::size_t comma = text.find(',', start);
      if (comma == std::string_view::npos) comma = text.size();
      std::string item(text.substr(start, comma - start));
      std::size_t b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
      if (b == std::string::npos) throw argument_error("empty party entry in '" + std::string(text) + "'");
      item = item.substr(b, e - b + 1);
      int p = 0;
      try {
        std::size_t used = 0;
        p = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw argument_error("bad party index '" + item + "'");
      }
      if (p < 1 || p > kMaxParties) throw argument_error("party index out of range: " + item);
      if (out.contains(p)) throw argument_error("party " + item + " listed twice");
      out = out | PartySet::single(p);
      any = true;
      start = comma + 1;
    }
    if (!any) throw argument_error("empty party list");
    return out;
  }

  int parties() const { return n_; }
  std::size_t size() const { return groups_.size(); }
  const std::vector<PartySet>& groups() const { return groups_; }
  const PartySet& operator[](std::size_t i) const { return groups_.at(i); }

  std::optional<std::size_t> index_of(PartySet g) const {
    for (std::size_t i = 0; i < groups_.size(); ++i)
      if (groups_[i] == g) return i;
    return std::nullopt;
  }

  std::size_t group_of(int party) const {
    for (std::size_t i = 0; i < groups_.size(); ++i)
      if (groups_[i].contains(party)) return i;
    throw argument_error("party " + std::to_string(party) + " not in grouping");
  }

  /// "1,2,3|4,5"
  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < groups_.size(); ++i) {
      if (i) out += '|';
      bool first = true;
      for (int p : groups_[i].parties()) {
        if (!first) out += ',';
        out += std::to_string(p);
        first = false;
      }
    }
    return out;
  }

  friend bool operator==(const Grouping&, const Grouping&) = default;

 private:
  int n_;
  std::vector<PartySet> groups_;
};

/// Desired s pattern: a bit for every splitting, index label-1.
class Specification {
 public:
  Specification(int n, std::vector<std::uint8_t> bits) : n_(n), bits_(std::move(bits)) {
    detail::check_party_count(n);
    if (bits_.size() != splitting_count(n)) {
      throw argument_error("specification for n=" + std::to_string(n) + " needs " + std::to_string(splitting_count(n)) +
                           " entries, got " + std::to_string(bits_.size()));
    }
    for (auto& b : bits_) {
      if (b > 1) throw argument_error("specification entries must be 0 or 1");
    }
  }

  template <class Pred>
  static Specification from_predicate(int n, Pred&& pred) {
    detail::check_party_count(n);
    std::vector<std::uint8_t> bits(splitting_count(n));
    for (Mask k = 1; k <= splitting_count(n); ++k) bits[k - 1] = pred(Splitting(n, k)) ? 1 : 0;
    return Specification(n, std::move(bits));
  }

  static Specification from_state(const RhoN& state) { return Specification(state.parties(), s_vector(state)); }

  int parties() const { return n_; }
  int bit(Mask label) const { return bits_.at(label - 1); }
  int operator()(const Splitting& s) const { return bit(s.mask()); }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::size_t count_ones() const {
    std::size_t c = 0;
    for (auto b : bits_) c += b;
    return c;
  }

  friend bool operator==(const Specification&, const Specification&) = default;

 private:
  int n_;
  std::vector<std::uint8_t> bits_;
};

namespace detail {

inline void check_groups(int n, PartySet c, PartySet d) {
  check_party_count(n);
  if (c.empty() || d.empty()) throw argument_error("groups must be non-empty");
  if (c.intersects(d)) throw argument_error("groups " + to_string(c) + " and " + to_string(d) + " overlap");
  if (!(c | d).subset_of(PartySet::all(n))) throw argument_error("groups name parties outside 1.." + std::to_string(n));
}

}  // namespace detail

/// Calls f(Splitting) for every splitting with c and d on opposite sides, in
/// no particular order.
template <class F>
void for_each_separating_splitting(int n, PartySet c, PartySet d, F&& f) {
  detail::check_groups(n, c, d);
  const PartySet ref = PartySet::single(n);
  const Mask free = (PartySet::all(n) - c - d - ref).bits();
  auto emit_from = [&](PartySet base) {
    // All submasks of `free`, including zero.
    Mask sub = free;
    while (true) {
      f(Splitting(n, base.bits() | sub));
      if (sub == 0) break;
      sub = (sub - 1) & free;
    }
  };
  if (c.contains(n)) {
    emit_from(d);
  } else if (d.contains(n)) {
    emit_from(c);
  } else {
    emit_from(c);
    emit_from(d);
  }
}

/// Every splitting placing c and d on opposite sides, ascending by mask.
/// There are exactly 2^{n-|c|-|d|} of them.
inline std::vector<Splitting> separating_splittings(int n, PartySet c, PartySet d) {
  std::vector<Splitting> out;
  for_each_separating_splitting(n, c, d, [&](const Splitting& s) { out.push_back(s); });
  std::sort(out.begin(), out.end(), [](const Splitting& a, const Splitting& b) { return a.mask() < b.mask(); });
  return out;
}

/// True iff `group` has members on both sides of `split`.
inline bool straddles(const Splitting& split, PartySet group) {
  return group.intersects(split.side_a()) && group.intersects(split.side_b());
}

}  // namespace actbe
