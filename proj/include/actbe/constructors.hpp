#pragma once

// Family states realizing a prescribed s pattern, and the named activation
// examples I-VII expressed as patterns.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "actbe/core_model.hpp"

namespace actbe {

/// Builds a normalized state whose s-vector equals `spec`.
///
/// Unnormalized coefficients: lam0_plus = 1 + lam0_minus (so Delta = 1),
/// lam_k = 0 where the pattern asks for 1 and lam_k = Delta (1 + margin) / 2
/// where it asks for 0. s_k is invariant under rescaling, so normalization
/// keeps the pattern.
inline RhoN from_specification(const Specification& spec, double margin = 0.5, double lam0_minus = 0.0) {
  if (!(margin > 0.0 && margin <= 1.0)) throw argument_error("margin must lie in (0, 1]");
  if (!(lam0_minus >= 0.0) || !std::isfinite(lam0_minus)) throw argument_error("lam0_minus must be finite and >= 0");
  const double delta = 1.0;
  const double separable_weight = delta * (0.5 + margin / 2.0);
  std::vector<double> lam(spec.bits().size());
  for (std::size_t i = 0; i < lam.size(); ++i) lam[i] = spec.bits()[i] ? 0.0 : separable_weight;
  return RhoN(spec.parties(), delta + lam0_minus, lam0_minus, std::move(lam)).normalized();
}

enum class ExampleId { I, II, III, IV, V, VI, VII };

inline std::string to_string(ExampleId id) {
  switch (id) {
    case ExampleId::I: return "I";
    case ExampleId::II: return "II";
    case ExampleId::III: return "III";
    case ExampleId::IV: return "IV";
    case ExampleId::V: return "V";
    case ExampleId::VI: return "VI";
    case ExampleId::VII: return "VII";
  }
  return "?";
}

inline ExampleId parse_example_id(std::string_view text) {
  for (auto id : {ExampleId::I, ExampleId::II, ExampleId::III, ExampleId::IV, ExampleId::V, ExampleId::VI, ExampleId::VII}) {
    if (text == to_string(id)) return id;
  }
  throw argument_error("unknown example '" + std::string(text) + "' (expected I..VII)");
}

/// Parameters for the named examples; only the fields an example uses are read.
struct ExampleParams {
  int j = 0;                 // I: exact group size; IV: minimum cluster size
  double band_lo = 40.0;     // II: percent of parties on the smaller side, inclusive
  double band_hi = 60.0;
  PartySet members;          // III: the distinguished group
};

/// Pattern of example `id` on n parties.
inline Specification example_specification(ExampleId id, int n, const ExampleParams& params = {}) {
  detail::check_party_count(n);
  auto side_b_size = [](const Splitting& s) { return std::popcount(s.mask()); };

  switch (id) {
    case ExampleId::I: {
      const int j = params.j;
      if (j < 1 || j >= n) throw argument_error("example I needs 1 <= j < n");
      return Specification::from_predicate(n, [&](const Splitting& s) {
        const int b = side_b_size(s);
        return b == j || b == n - j;
      });
    }
    case ExampleId::II: {
      const double lo = params.band_lo, hi = params.band_hi;
      if (!(lo >= 0.0 && hi <= 100.0 && lo <= hi)) throw argument_error("example II band must satisfy 0 <= lo <= hi <= 100");
      return Specification::from_predicate(n, [&](const Splitting& s) {
        const int b = side_b_size(s);
        const double smaller = std::min(b, n - b);
        // smaller/n in [lo%, hi%], compared without division
        return smaller * 100.0 >= lo * n && smaller * 100.0 <= hi * n;
      });
    }
    case ExampleId::III: {
      const PartySet a = params.members;
      if (a.empty() || !a.subset_of(PartySet::all(n)) || a == PartySet::all(n)) {
        throw argument_error("example III needs a non-empty proper subset of the parties");
      }
      const Splitting target = Splitting::from_side(n, a);
      return Specification::from_predicate(n, [&](const Splitting& s) { return s == target; });
    }
    case ExampleId::IV: {
      const int j = params.j;
      if (j < 1 || j >= n) throw argument_error("example IV needs 1 <= j < n");
      return Specification::from_predicate(n, [&](const Splitting& s) {
        const int b = side_b_size(s);
        return b >= j && n - b >= j;
      });
    }
    case ExampleId::V: {
      if (n < 3) throw argument_error("example V needs n >= 3");
      return Specification::from_predicate(n, [&](const Splitting& s) {
        const int b = side_b_size(s);
        return b == 1 || b == n - 1;
      });
    }
    case ExampleId::VI: {
      if (n != 4) throw argument_error("example VI is defined for n = 4");
      const Splitting a{Splitting::from_side(4, {1, 2})}, b{Splitting::from_side(4, {1})}, c{Splitting::from_side(4, {2})};
      return Specification::from_predicate(4, [&](const Splitting& s) { return s == a || s == b || s == c; });
    }
    case ExampleId::VII: {
      if (n != 5) throw argument_error("example VII is defined for n = 5");
      const Splitting excluded = Splitting::from_side(5, {1, 3});
      return Specification::from_predicate(5, [&](const Splitting& s) {
        return s.separates(PartySet{1}, PartySet{2}) && !(s == excluded);
      });
    }
  }
  throw argument_error("unknown example id");
}

inline RhoN example_state(ExampleId id, int n, const ExampleParams& params = {}, double margin = 0.5) {
  return from_specification(example_specification(id, n, params), margin);
}

/// Deterministic pseudo-random valid state with Delta > 0. Each lam_k keeps a
/// relative distance of at least 10% of Delta/2 from the s boundary.
inline RhoN random_family_state(int n, std::uint64_t seed) {
  detail::check_party_count(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double lam0_plus = 1.0;
  const double lam0_minus = 0.5 * unit(rng);
  const double half_delta = (lam0_plus - lam0_minus) / 2.0;
  std::vector<double> lam(splitting_count(n));
  for (double& v : lam) {
    const bool entangled = unit(rng) < 0.5;
    v = entangled ? half_delta * 0.9 * unit(rng) : half_delta * (1.1 + 0.9 * unit(rng));
  }
  return RhoN(n, lam0_plus, lam0_minus, std::move(lam)).normalized();
}

}  // namespace actbe
