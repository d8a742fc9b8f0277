#pragma once

// Coefficient-level state transformations on the family: multi-copy
// amplification, single-party |+> measurement, joint diagonal POVMs on a
// group, relabeling, the projection onto an effective two-party state, and
// the full distillation pipeline built from them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "actbe/analysis.hpp"
#include "actbe/core_model.hpp"

namespace actbe {

/// Default upper bound on the number of copies auto-amplification may use.
inline constexpr int kDefaultAmplificationCap = 64;

/// Relative slack demanded of a merged label below Delta/2. Exact ties
/// (two parents at a quarter of Delta each) otherwise come out inseparable
/// or not depending on rounding.
inline constexpr double kPropagationMargin = 1e-9;

/// M-copy filtering: every party CNOTs its first copy onto the others and
/// keeps the run where all targets read 0. The surviving copy has
///   lam'_k = lam_k^M,  lam0'^(+-) = ((lam0+ + lam0-)/2)^M +- (Delta/2)^M,
/// so Delta'/2 = (Delta/2)^M and every s_k is preserved. Returned normalized.
inline RhoN amplify(const RhoN& state, int copies) {
  require_valid(state);
  if (copies < 1) throw argument_error("copies must be >= 1");
  const double half = state.delta() / 2.0;
  if (!(half > 0.0)) throw unsupported_error("amplification needs Delta > 0");

  const double m = copies;
  const double log_half = m * std::log(half);
  const double log_mean = m * std::log((state.lam0_plus() + state.lam0_minus()) / 2.0);
  // Work relative to the largest power so nothing overflows.
  double top = log_mean;
  std::vector<double> logs(state.lams().size());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const double v = state.lams()[i];
    logs[i] = v > 0.0 ? m * std::log(v) : -std::numeric_limits<double>::infinity();
    top = std::max(top, logs[i]);
  }
  const double mean_pow = std::exp(log_mean - top);
  const double half_pow = std::exp(log_half - top);
  std::vector<double> lam(logs.size());
  for (std::size_t i = 0; i < lam.size(); ++i) lam[i] = std::exp(logs[i] - top);
  return RhoN::from_mean_and_delta(state.parties(), mean_pow, 2.0 * half_pow, std::move(lam)).normalized();
}

namespace detail {

/// Reduced label j -> parent label with bit (party-1) cleared.
inline Mask expand_label(Mask reduced, int party) {
  const Mask low = (Mask{1} << (party - 1)) - 1;
  return (reduced & low) | ((reduced & ~low) << 1);
}

/// |+> projection of `party` without renormalization checks.
inline RhoN merge_out(const RhoN& state, int party) {
  const int n = state.parties();
  const Mask bit = Mask{1} << (party - 1);
  const Mask reduced_labels = splitting_count(n - 1);
  std::vector<double> lam(reduced_labels);
  for (Mask j = 1; j <= reduced_labels; ++j) {
    const Mask p0 = expand_label(j, party);
    lam[j - 1] = state.lam_unchecked(p0) + state.lam_unchecked(p0 | bit);
  }
  const double e = state.lam_unchecked(bit);
  return RhoN::with_delta(n - 1, state.lam0_plus() + e, state.lam0_minus() + e, state.delta(), std::move(lam)).normalized();
}

/// Every reduced label whose two parents are inseparable must come out
/// inseparable.
inline bool propagates(const RhoN& before, const RhoN& after, int party) {
  const double half_before = before.delta() / 2.0;
  const double half_after = after.delta() / 2.0;
  const Mask bit = Mask{1} << (party - 1);
  for (Mask j = 1; j <= splitting_count(after.parties()); ++j) {
    const Mask p0 = expand_label(j, party);
    const bool parents = before.lam_unchecked(p0) < half_before && before.lam_unchecked(p0 | bit) < half_before;
    if (parents && !(after.lam_unchecked(j) < half_after * (1.0 - kPropagationMargin))) return false;
  }
  return true;
}

}  // namespace detail

/// Smallest copy count M for which measuring `party` after M-copy
/// amplification keeps every reduced splitting inseparable whose two parent
/// splittings were inseparable.
inline int required_copies(const RhoN& state, int party, int cap = kDefaultAmplificationCap) {
  const double half = state.delta() / 2.0;
  if (!(half > 0.0)) throw unsupported_error("auto-amplification needs Delta > 0");
  const int n = state.parties();
  const Mask bit = Mask{1} << (party - 1);

  // Analytic lower bound from (r0^M + r1^M < 1) with r = lam / (Delta/2).
  int guess = 1;
  for (Mask j = 1; j <= splitting_count(n - 1); ++j) {
    const Mask p0 = detail::expand_label(j, party);
    const double r0 = state.lam_unchecked(p0) / half, r1 = state.lam_unchecked(p0 | bit) / half;
    if (!(r0 < 1.0 && r1 < 1.0)) continue;
    int m = guess;
    while (m <= cap && !(std::pow(r0, m) + std::pow(r1, m) < 1.0 - kPropagationMargin)) ++m;
    if (m > cap) throw unsupported_error("amplification beyond " + std::to_string(cap) + " copies required; state is too close to the separability boundary");
    guess = m;
  }
  // Confirm on the actual floating-point result.
  for (int m = guess; m <= cap; ++m) {
    const RhoN amplified = m == 1 ? state : amplify(state, m);
    if (detail::propagates(amplified, detail::merge_out(amplified, party), party)) return m;
  }
  throw unsupported_error("amplification beyond " + std::to_string(cap) + " copies required; state is too close to the separability boundary");
}

struct MeasuredState {
  RhoN state;      // n-1 parties, normalized
  int copies = 1;  // amplification applied before the measurement
};

/// Projects party `party` (not the reference party n) onto |+> and returns
/// the (n-1)-party family state: lam~_j = lam_{j,0} + lam_{j,1} and
/// lam0~ = lam0 + lam_{e_party}, so Delta~ = Delta. With `auto_amplify` the
/// state is first amplified with `required_copies`.
inline MeasuredState measure_out_party(const RhoN& state, int party, bool auto_amplify,
                                       int cap = kDefaultAmplificationCap) {
  require_valid(state);
  const int n = state.parties();
  if (party < 1 || party > n) throw argument_error("party " + std::to_string(party) + " out of range 1.." + std::to_string(n));
  if (party == n) {
    throw argument_error("party " + std::to_string(n) + " is the reference party; relabel with permute_parties before measuring it");
  }
  if (n < 3) throw argument_error("measuring a party needs at least 3 parties");
  int copies = 1;
  RhoN source = state;
  if (auto_amplify) {
    copies = required_copies(state, party, cap);
    if (copies > 1) source = amplify(state, copies);
  }
  return {detail::merge_out(source, party), copies};
}

struct JoinResult {
  RhoN state;
  std::vector<double> weights;  // indexed by pattern over the group's parties, ascending
  std::string warning;          // non-empty when the POVM was a no-op
};

namespace detail {

/// Pattern of label k restricted to `group`: bit i is party (i-th smallest
/// member)'s bit in (k, 0).
inline Mask group_pattern(Mask label, const std::vector<int>& members, int n) {
  Mask p = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const int party = members[i];
    if (party != n && ((label >> (party - 1)) & 1U)) p |= Mask{1} << i;
  }
  return p;
}

}  // namespace detail

/// Weights y with y(p) = y(~p), y(0) = y(1..1) = 1 that push every label
/// straddled by `group` to at most Delta/4 and leave the others alone.
inline std::vector<double> auto_join_weights(const RhoN& state, PartySet group) {
  const int n = state.parties();
  const double half = state.delta() / 2.0;
  if (!(half > 0.0)) throw unsupported_error("automatic join weights need Delta > 0");
  const auto members = group.parties();
  const Mask patterns = Mask{1} << members.size();
  const Mask full = patterns - 1;
  std::vector<double> y(patterns, 1.0);
  for (Mask k = 1; k <= splitting_count(n); ++k) {
    const double v = state.lam_unchecked(k);
    if (!(v > 0.0)) continue;
    const Mask p = detail::group_pattern(k, members, n);
    if (p == 0 || p == full) continue;
    const double w = std::min(1.0, half / (2.0 * v));
    y[p] = std::min(y[p], w);
    y[full ^ p] = std::min(y[full ^ p], w);
  }
  return y;
}

/// Diagonal POVM element sum_j sqrt(y_j) |j><j| on the joined group:
/// lam~_k = y(pattern of k) lam_k, Delta unchanged. Weights must be
/// complement-symmetric (anything else leaves the family) and equal 1 on the
/// two constant patterns. Without weights, `auto_join_weights` is used.
inline JoinResult join_povm(const RhoN& state, PartySet group, std::optional<std::vector<double>> weights = std::nullopt) {
  require_valid(state);
  const int n = state.parties();
  if (group.empty() || !group.subset_of(PartySet::all(n))) throw argument_error("group " + to_string(group) + " is not a non-empty subset of the parties");
  const auto members = group.parties();
  const Mask patterns = Mask{1} << members.size();
  const Mask full = patterns - 1;

  if (members.size() == 1) {
    return {state, std::vector<double>(2, 1.0), "single-party group " + to_string(group) + ": joining is a no-op"};
  }
  std::vector<double> y;
  if (weights) {
    y = std::move(*weights);
    if (y.size() != patterns) throw argument_error("expected " + std::to_string(patterns) + " weights for group " + to_string(group));
    if (y[0] != 1.0 || y[full] != 1.0) throw argument_error("weights of the all-0 and all-1 patterns must be 1");
    for (Mask p = 0; p < patterns; ++p) {
      if (!(y[p] >= 0.0 && y[p] <= 1.0)) throw argument_error("weights must lie in [0, 1]");
      if (y[p] != y[full ^ p]) throw argument_error("weights must satisfy y(p) = y(~p); asymmetric weights leave the family");
    }
  } else {
    y = auto_join_weights(state, group);
  }

  std::vector<double> lam(state.lams().begin(), state.lams().end());
  for (Mask k = 1; k <= splitting_count(n); ++k) lam[k - 1] *= y[detail::group_pattern(k, members, n)];
  return {RhoN::with_delta(n, state.lam0_plus(), state.lam0_minus(), state.delta(), std::move(lam)).normalized(), std::move(y), {}};
}

/// Residual two-party state after projecting both sides of a splitting onto
/// span{|0..0>, |1..1>}:
///   lam0+ |Psi0+><Psi0+| + lam0- |Psi0-><Psi0-| + lam_k (|01><01| + |10><10|).
struct EffectivePairState {
  double lam0_plus;
  double lam0_minus;
  double lam_k;
  double delta;  // lam0_plus - lam0_minus, carried from the state

  double fidelity() const { return lam0_plus / (lam0_plus + lam0_minus + 2.0 * lam_k); }
  bool distillable() const { return lam_k < delta / 2.0; }
};

struct EffectivePair {
  EffectivePairState pair;
  bool distillable;
};

inline EffectivePair project_to_effective_pair(const RhoN& state, const Splitting& split) {
  require_valid(state);
  if (split.parties() != state.parties()) throw argument_error("splitting and state disagree on the party count");
  const EffectivePairState pair{state.lam0_plus(), state.lam0_minus(), state.lam(split.mask()), state.delta()};
  return {pair, pair.distillable()};
}

/// Checks that `perm` (perm[i-1] = new index of party i) is a bijection on 1..n.
inline void check_permutation(std::span<const int> perm, int n) {
  if (perm.size() != static_cast<std::size_t>(n)) throw argument_error("permutation must have " + std::to_string(n) + " entries");
  Mask seen = 0;
  for (int v : perm) {
    if (v < 1 || v > n) throw argument_error("permutation entry " + std::to_string(v) + " out of range");
    const Mask bit = Mask{1} << (v - 1);
    if (seen & bit) throw argument_error("permutation is not a bijection (repeated " + std::to_string(v) + ")");
    seen |= bit;
  }
}

inline std::vector<int> inverse_permutation(std::span<const int> perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[static_cast<std::size_t>(perm[i] - 1)] = static_cast<int>(i) + 1;
  return inv;
}

/// Relabels parties: old party i becomes party perm[i-1]. Labels follow
/// their bit patterns; a pattern that puts a 1 on the new reference party is
/// complemented, which maps |Psi_k^+-> onto the family basis up to phase.
inline RhoN permute_parties(const RhoN& state, std::span<const int> perm) {
  require_valid(state);
  const int n = state.parties();
  check_permutation(perm, n);
  const Mask all = PartySet::all(n).bits();
  const Mask ref_bit = Mask{1} << (n - 1);
  std::vector<double> lam(state.lams().size());
  for (Mask k = 1; k <= splitting_count(n); ++k) {
    Mask moved = 0;
    for (int i = 1; i <= n; ++i) {
      if ((k >> (i - 1)) & 1U) moved |= Mask{1} << (perm[static_cast<std::size_t>(i - 1)] - 1);
    }
    if (moved & ref_bit) moved = all ^ moved;
    lam[moved - 1] = state.lam_unchecked(k);
  }
  return RhoN::with_delta(n, state.lam0_plus(), state.lam0_minus(), state.delta(), std::move(lam));
}

/// Short fingerprint of a state's s-vector for traces: the bit string for up
/// to 64 splittings, otherwise the count of ones and an FNV-1a hash.
inline std::string s_digest(const RhoN& state) {
  const auto s = s_vector(state);
  if (s.size() <= 64) return s_string(s);
  std::uint64_t h = 14695981039346656037ULL;
  std::size_t ones = 0;
  for (auto b : s) {
    h = (h ^ b) * 1099511628211ULL;
    ones += b;
  }
  std::ostringstream os;
  os << "ones=" << ones << "/" << s.size() << " fnv=" << std::hex << h;
  return os.str();
}

struct PipelineStep {
  std::string operation;
  std::string parameters;
  int parties;
  std::string s_digest;
};

struct PipelineTrace {
  std::vector<PipelineStep> steps;
  std::optional<EffectivePairState> result;  // set when the pipeline ran to the end
  std::optional<Splitting> witness;          // set when the precondition failed

  bool succeeded() const { return result.has_value() && result->distillable(); }
};

/// Distills a maximally entangled pair between groups c and d of `grouping`:
///  1. joint POVM on every multi-party group (flips every splitting it straddles),
///  2. relabel so the reference party belongs to c,
///  3. measure every helper outside c and d onto |+> with auto-amplification,
///  4. project onto the effective c-d pair state.
/// When some separable separating splitting is straddled by no group the
/// trace stops at once and names it as the witness.
inline PipelineTrace distill_pipeline(const RhoN& state, const Grouping& grouping, PartySet c, PartySet d) {
  require_valid(state);
  PipelineTrace trace;
  const int n = state.parties();
  trace.steps.push_back({"start", "grouping=" + grouping.to_string() + " c=" + to_string(c) + " d=" + to_string(d), n, s_digest(state)});

  if (auto w = find_witness(state, grouping, c, d)) {
    trace.witness = w;
    trace.steps.push_back({"precondition-failed", "witness=" + w->describe() + " label=" + w->label(), n, s_digest(state)});
    return trace;
  }

  RhoN current = state;
  for (const PartySet& g : grouping.groups()) {
    if (g.size() < 2) continue;
    auto joined = join_povm(current, g);
    const double smallest = *std::min_element(joined.weights.begin(), joined.weights.end());
    std::ostringstream params;
    params << "group=" << to_string(g) << " min_weight=" << smallest;
    current = std::move(joined.state);
    trace.steps.push_back({"join_povm", params.str(), n, s_digest(current)});
  }

  // origin[pos-1] = original index of the party now at position pos.
  std::vector<int> origin(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) origin[static_cast<std::size_t>(i)] = i + 1;
  if (!c.contains(n)) {
    const int p = c.max_party();
    std::vector<int> perm = origin;
    std::swap(perm[static_cast<std::size_t>(p - 1)], perm[static_cast<std::size_t>(n - 1)]);
    current = permute_parties(current, perm);
    std::swap(origin[static_cast<std::size_t>(p - 1)], origin[static_cast<std::size_t>(n - 1)]);
    trace.steps.push_back({"permute_parties", "swap A" + std::to_string(p) + "<->A" + std::to_string(n), n, s_digest(current)});
  }

  const PartySet kept = c | d;
  for (int pos = current.parties(); pos >= 1; --pos) {
    const int who = origin[static_cast<std::size_t>(pos - 1)];
    if (kept.contains(who)) continue;
    auto measured = measure_out_party(current, pos, true);
    current = std::move(measured.state);
    origin.erase(origin.begin() + (pos - 1));
    trace.steps.push_back({"measure_out_party", "party=A" + std::to_string(who) + " copies=" + std::to_string(measured.copies),
                           current.parties(), s_digest(current)});
  }

  PartySet d_positions;
  for (std::size_t i = 0; i < origin.size(); ++i) {
    if (d.contains(origin[i])) d_positions = d_positions | PartySet::single(static_cast<int>(i) + 1);
  }
  const Splitting final_split(current.parties(), d_positions.bits());
  const auto pair = project_to_effective_pair(current, final_split);
  std::ostringstream params;
  params.precision(17);
  params << "split=" << final_split.label() << " fidelity=" << pair.pair.fidelity();
  trace.steps.push_back({"project_to_effective_pair", params.str(), current.parties(), s_digest(current)});
  trace.result = pair.pair;
  return trace;
}

}  // namespace actbe
