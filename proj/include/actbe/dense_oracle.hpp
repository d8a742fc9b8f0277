#pragma once

// Brute-force reference: full 2^n x 2^n density matrices for family states,
// partial transposes and their spectra, and dense simulations of the
// protocol steps. Test-time tool only; n is capped.
//
// Computational index convention: bit (i-1) of an index is party i's qubit.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "actbe/core_model.hpp"
#include "actbe/protocols.hpp"

namespace actbe::dense {

inline constexpr int kDenseMaxParties = 8;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kEigenTolerance = 1e-10;

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace detail {

inline void check_cap(int n) {
  actbe::detail::check_party_count(n);
  if (n > kDenseMaxParties) {
    throw argument_error("dense oracle is capped at " + std::to_string(kDenseMaxParties) + " parties (got " + std::to_string(n) + ")");
  }
}

inline std::size_t dim(int n) { return std::size_t{1} << n; }

/// The two computational indices carrying |Psi_k^+->: (k, 0) and (~k, 1).
inline std::pair<std::size_t, std::size_t> support(Mask k, int n) {
  const Mask ref = Mask{1} << (n - 1);
  return {k, ((~k) & (ref - 1)) | ref};
}

}  // namespace detail

/// |Psi_k^sign> = (|k,0> + sign |~k,1>) / sqrt 2.
inline Vector basis_state(Mask k, int sign, int n) {
  detail::check_cap(n);
  if (k >= (Mask{1} << (n - 1))) throw argument_error("label out of range");
  if (sign != 1 && sign != -1) throw argument_error("sign must be +1 or -1");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(detail::dim(n)));
  const auto [a, b] = detail::support(k, n);
  const double r = 1.0 / std::sqrt(2.0);
  v(static_cast<Eigen::Index>(a)) = r;
  v(static_cast<Eigen::Index>(b)) = sign * r;
  return v;
}

inline double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

inline Eigen::VectorXd eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

struct DenseState {
  int n = 0;
  Matrix matrix;

  /// Invariant violations (Hermitian, unit trace, PSD); empty when valid.
  std::vector<Violation> check() const {
    std::vector<Violation> out;
    const double herm = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermitianTolerance) out.push_back({"hermitian", "max |rho - rho^dagger| = " + std::to_string(herm)});
    const double tr = std::abs(matrix.trace() - std::complex<double>(1.0));
    if (tr > kTraceTolerance) out.push_back({"unit trace", "|tr - 1| = " + std::to_string(tr)});
    const double lo = min_eigenvalue(matrix);
    if (lo < -kEigenTolerance) out.push_back({"positive semidefinite", "min eigenvalue = " + std::to_string(lo)});
    return out;
  }
};

/// sum_sigma lam0^sigma P(Psi_0^sigma) + sum_k lam_k (P(Psi_k^+) + P(Psi_k^-)).
/// The projectors are added explicitly, not read off a closed form.
inline Matrix assemble_matrix(const RhoN& state) {
  const int n = state.parties();
  detail::check_cap(n);
  const auto d = static_cast<Eigen::Index>(detail::dim(n));
  Matrix rho = Matrix::Zero(d, d);
  auto add = [&](double w, const Vector& v) {
    if (w != 0.0) rho.noalias() += w * (v * v.adjoint());
  };
  add(state.lam0_plus(), basis_state(0, 1, n));
  add(state.lam0_minus(), basis_state(0, -1, n));
  for (Mask k = 1; k <= splitting_count(n); ++k) {
    add(state.lam_unchecked(k), basis_state(k, 1, n));
    add(state.lam_unchecked(k), basis_state(k, -1, n));
  }
  return rho;
}

inline DenseState assemble_density(const RhoN& state) {
  require_valid(state);
  return {state.parties(), assemble_matrix(state)};
}

/// Transposes the tensor factors of `subset`: entry (a, b) moves to the pair
/// obtained by exchanging the subset's bits between a and b.
inline Matrix partial_transpose(const Matrix& m, int n, PartySet subset) {
  detail::check_cap(n);
  if (!subset.subset_of(PartySet::all(n))) throw argument_error("subset exceeds the party range");
  const std::size_t d = detail::dim(n);
  if (static_cast<std::size_t>(m.rows()) != d || static_cast<std::size_t>(m.cols()) != d) throw argument_error("matrix dimension does not match n");
  const std::size_t s = subset.bits();
  Matrix out(m.rows(), m.cols());
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      const std::size_t a2 = (a & ~s) | (b & s);
      const std::size_t b2 = (b & ~s) | (a & s);
      out(static_cast<Eigen::Index>(a2), static_cast<Eigen::Index>(b2)) = m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  return out;
}

inline Matrix partial_transpose(const DenseState& d, PartySet subset) { return partial_transpose(d.matrix, d.n, subset); }

inline double min_pt_eigenvalue(const Matrix& rho, int n, const Splitting& split) {
  return min_eigenvalue(partial_transpose(rho, n, split.side_a()));
}

inline double min_pt_eigenvalue(const RhoN& state, const Splitting& split) {
  if (split.parties() != state.parties()) throw argument_error("splitting and state disagree on the party count");
  return min_pt_eigenvalue(assemble_density(state).matrix, state.parties(), split);
}

struct PptEntry {
  Splitting split;
  int s;
  double min_eigenvalue;
  bool agree;
};

struct PptReport {
  std::vector<PptEntry> entries;
  bool passed = true;
};

/// For every splitting: s_k = 1 must coincide with a partial-transpose
/// eigenvalue below -1e-10, s_k = 0 with none.
inline PptReport verify_ppt_agreement(const RhoN& state) {
  const DenseState d = assemble_density(state);
  PptReport report;
  for (Mask k = 1; k <= splitting_count(state.parties()); ++k) {
    const Splitting split(state.parties(), k);
    const auto s = s_coefficient(state, split);
    const double e = min_pt_eigenvalue(d.matrix, d.n, split);
    const bool agree = s ? e < -kEigenTolerance : e >= -kEigenTolerance;
    report.entries.push_back({split, s, e, agree});
    report.passed = report.passed && agree;
  }
  return report;
}

/// Reads family coefficients back from a matrix (any trace) and reports how
/// far the matrix is from the family form they describe.
struct Extracted {
  RhoN state;       // unnormalized
  double residual;  // max entry-wise deviation from the reassembled matrix
};

inline Extracted extract_coefficients(const Matrix& rho, int n) {
  detail::check_cap(n);
  auto expect = [&](const Vector& v) { return (v.adjoint() * rho * v)(0).real(); };
  const double p = expect(basis_state(0, 1, n));
  const double m = expect(basis_state(0, -1, n));
  std::vector<double> lam(splitting_count(n));
  for (Mask k = 1; k <= splitting_count(n); ++k) {
    lam[k - 1] = (expect(basis_state(k, 1, n)) + expect(basis_state(k, -1, n))) / 2.0;
  }
  RhoN state(n, p, m, std::move(lam));
  const double residual = (rho - assemble_matrix(state)).cwiseAbs().maxCoeff();
  return {std::move(state), residual};
}

/// M-copy filter on explicit tensor products. rho^{(x)M} is expanded as a
/// mixture of products of family basis vectors; each product is pushed
/// through the bilateral CNOTs (copy 1 controls every other copy, per party)
/// and the all-targets-zero projection. Output is the unnormalized first-copy
/// matrix.
inline Matrix simulate_amplify(const RhoN& state, int copies) {
  const int n = state.parties();
  detail::check_cap(n);
  if (copies < 1 || n * copies > 30) throw argument_error("copies out of range for the dense simulation");

  struct Term {
    double weight;
    std::size_t index[2];
    double amp[2];
  };
  std::vector<Term> terms;
  const double r = 1.0 / std::sqrt(2.0);
  auto push = [&](double w, Mask k, int sign) {
    if (w == 0.0) return;
    const auto [a, b] = detail::support(k, n);
    terms.push_back({w, {a, b}, {r, sign * r}});
  };
  push(state.lam0_plus(), 0, 1);
  push(state.lam0_minus(), 0, -1);
  for (Mask k = 1; k <= splitting_count(n); ++k) {
    push(state.lam_unchecked(k), k, 1);
    push(state.lam_unchecked(k), k, -1);
  }

  const std::size_t d = detail::dim(n);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  std::vector<std::size_t> choice(static_cast<std::size_t>(copies), 0);
  while (true) {
    double w = 1.0;
    for (auto c : choice) w *= terms[c].weight;
    Vector v = Vector::Zero(static_cast<Eigen::Index>(d));
    // Each factor has two amplitudes; walk all 2^M branches of the product.
    for (std::size_t branch = 0; branch < (std::size_t{1} << copies); ++branch) {
      double amp = 1.0;
      std::size_t first = 0;
      bool survives = true;
      for (int c = 0; c < copies; ++c) {
        const Term& t = terms[choice[static_cast<std::size_t>(c)]];
        const int side = static_cast<int>((branch >> c) & 1U);
        amp *= t.amp[side];
        const std::size_t idx = t.index[side];
        if (c == 0) {
          first = idx;
        } else if ((idx ^ first) != 0) {
          // CNOT from copy 1 maps this copy to idx ^ first; postselect on 0.
          survives = false;
        }
      }
      if (survives) v(static_cast<Eigen::Index>(first)) += amp;
    }
    out.noalias() += w * (v * v.adjoint());

    std::size_t c = 0;
    while (c < choice.size() && ++choice[c] == terms.size()) choice[c++] = 0;
    if (c == choice.size()) break;
  }
  return out;
}

/// Projects party `party` onto |+> with the Kraus operator <+|_party; the
/// remaining qubits keep their order. Unnormalized (n-1)-party matrix.
inline Matrix simulate_measure_plus(const Matrix& rho, int n, int party) {
  detail::check_cap(n);
  if (party < 1 || party > n || n < 2) throw argument_error("party out of range");
  const std::size_t d = detail::dim(n - 1);
  const std::size_t low = (std::size_t{1} << (party - 1)) - 1;
  const std::size_t bit = std::size_t{1} << (party - 1);
  auto lift = [&](std::size_t j) { return (j & low) | ((j & ~low) << 1); };
  Matrix out(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      std::complex<double> acc = 0.0;
      for (std::size_t x : {std::size_t{0}, bit}) {
        for (std::size_t y : {std::size_t{0}, bit}) {
          acc += rho(static_cast<Eigen::Index>(lift(a) | x), static_cast<Eigen::Index>(lift(b) | y));
        }
      }
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc / 2.0;
    }
  }
  return out;
}

/// Applies K = sum_j sqrt(y_j) |j><j| on the qubits of `group` (pattern bit i
/// = i-th smallest member). Unnormalized.
inline Matrix simulate_diagonal_povm(const Matrix& rho, int n, PartySet group, std::span<const double> weights) {
  detail::check_cap(n);
  const auto members = group.parties();
  if (weights.size() != (std::size_t{1} << members.size())) throw argument_error("weight count does not match the group size");
  const std::size_t d = detail::dim(n);
  std::vector<double> scale(d);
  for (std::size_t a = 0; a < d; ++a) {
    std::size_t p = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      if ((a >> (members[i] - 1)) & 1U) p |= std::size_t{1} << i;
    }
    scale[a] = std::sqrt(weights[p]);
  }
  Matrix out = rho;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) *= scale[a] * scale[b];
  }
  return out;
}

/// Projects side A and side B of `split` onto span{|0..0>, |1..1>}, each
/// encoded as one qubit. Output index = a + 2 b. Unnormalized 4x4 matrix.
inline Matrix simulate_pair_projection(const Matrix& rho, int n, const Splitting& split) {
  detail::check_cap(n);
  const std::size_t a_bits = split.side_a().bits(), b_bits = split.side_b().bits();
  Matrix out(4, 4);
  auto full = [&](std::size_t q) { return ((q & 1U) ? a_bits : 0) | ((q & 2U) ? b_bits : 0); };
  for (std::size_t x = 0; x < 4; ++x) {
    for (std::size_t y = 0; y < 4; ++y) out(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = rho(static_cast<Eigen::Index>(full(x)), static_cast<Eigen::Index>(full(y)));
  }
  return out;
}

/// lam0+ Phi+ + lam0- Phi- + lam_k (|01><01| + |10><10|) in the a + 2b layout.
inline Matrix effective_pair_matrix(const EffectivePairState& pair) {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(3, 3) = (pair.lam0_plus + pair.lam0_minus) / 2.0;
  m(0, 3) = m(3, 0) = pair.delta / 2.0;
  m(1, 1) = m(2, 2) = pair.lam_k;
  return m;
}

/// Conjugation by the qubit permutation sending party i to perm[i-1].
inline Matrix permute_qubits(const Matrix& rho, int n, std::span<const int> perm) {
  detail::check_cap(n);
  check_permutation(perm, n);
  const std::size_t d = detail::dim(n);
  std::vector<std::size_t> map(d);
  for (std::size_t a = 0; a < d; ++a) {
    std::size_t to = 0;
    for (int i = 1; i <= n; ++i) {
      if ((a >> (i - 1)) & 1U) to |= std::size_t{1} << (perm[static_cast<std::size_t>(i - 1)] - 1);
    }
    map[a] = to;
  }
  Matrix out(rho.rows(), rho.cols());
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) out(static_cast<Eigen::Index>(map[a]), static_cast<Eigen::Index>(map[b])) = rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  return out;
}

inline Matrix normalized(const Matrix& m) { return m / m.trace().real(); }

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace actbe::dense
