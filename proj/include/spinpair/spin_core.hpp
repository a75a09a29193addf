#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "spinpair/types.hpp"

// Linear-algebra substrate for the two-atom five-level spin space: basis
// indexing, the symmetric pair states populated by spin-changing collisions,
// mixed-state assembly, exchange symmetry, the +-1-block concurrence, and the
// parity-dephasing channel used to destroy pair coherence.

namespace spinpair {

constexpr bool is_valid_level(int m) { return m >= -2 && m <= 2; }

inline int level_index(int m) {
  if (!is_valid_level(m)) {
    throw std::invalid_argument("spin level m must lie in [-2, 2]");
  }
  return m + 2;
}

inline int level_from_index(int index) {
  if (index < 0 || index >= kLevels) {
    throw std::invalid_argument("level index must lie in [0, 4]");
  }
  return index - 2;
}

/// Row-major pair index: |m1,m2> -> 5*(m1+2) + (m2+2).
inline int basis_index(int m1, int m2) {
  return kLevels * level_index(m1) + level_index(m2);
}

inline std::pair<int, int> levels_from_basis_index(int index) {
  if (index < 0 || index >= kPairDim) {
    throw std::invalid_argument("pair basis index must lie in [0, 24]");
  }
  return {index / kLevels - 2, index % kLevels - 2};
}

template <typename Scalar = double>
Ket<Scalar> basis_ket(int m1, int m2) {
  Ket<Scalar> k = Ket<Scalar>::Zero();
  k(basis_index(m1, m2)) = std::complex<Scalar>(1, 0);
  return k;
}

/// (|m,-m> + sign*|-m,m>)/sqrt(2). sign=+1 gives the exchange-symmetric
/// states chi_1 (m=1) and chi_2 (m=2) that collisions can populate; sign=-1
/// gives the antisymmetric partner chi_-.
template <typename Scalar = double>
Ket<Scalar> symmetric_pair_state(int m, int sign) {
  if (m != 1 && m != 2) {
    throw std::invalid_argument(
        "symmetric_pair_state: m must be 1 or 2 (m=0 has no two-component superposition)");
  }
  if (sign != 1 && sign != -1) {
    throw std::invalid_argument("symmetric_pair_state: sign must be +1 or -1");
  }
  const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
  Ket<Scalar> k = Ket<Scalar>::Zero();
  k(basis_index(m, -m)) = std::complex<Scalar>(inv_sqrt2, 0);
  k(basis_index(-m, m)) = std::complex<Scalar>(Scalar(sign) * inv_sqrt2, 0);
  return k;
}

/// (|1,1> + |-1,-1>)/sqrt(2), the image of chi_1 under a resonant pi/2 pulse.
template <typename Scalar = double>
Ket<Scalar> pair_phi_plus() {
  const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
  Ket<Scalar> k = Ket<Scalar>::Zero();
  k(basis_index(1, 1)) = std::complex<Scalar>(inv_sqrt2, 0);
  k(basis_index(-1, -1)) = std::complex<Scalar>(inv_sqrt2, 0);
  return k;
}

template <typename Scalar>
DensityMatrix<Scalar> projector(const Ket<Scalar>& k) {
  return k * k.adjoint();
}

/// Perfectly correlated but unentangled mixture
/// (|m,-m><m,-m| + |-m,m><-m,m|)/2.
template <typename Scalar = double>
DensityMatrix<Scalar> correlated_mixture(int m = 1) {
  if (m != 1 && m != 2) {
    throw std::invalid_argument("correlated_mixture: m must be 1 or 2");
  }
  DensityMatrix<Scalar> rho = DensityMatrix<Scalar>::Zero();
  rho(basis_index(m, -m), basis_index(m, -m)) = Scalar(0.5);
  rho(basis_index(-m, m), basis_index(-m, m)) = Scalar(0.5);
  return rho;
}

/// SWAP on the pair space: |m1,m2> -> |m2,m1>.
template <typename Scalar = double>
const PairOperator<Scalar>& swap_operator() {
  static const PairOperator<Scalar> swap = [] {
    PairOperator<Scalar> s = PairOperator<Scalar>::Zero();
    for (int m1 = -2; m1 <= 2; ++m1) {
      for (int m2 = -2; m2 <= 2; ++m2) {
        s(basis_index(m2, m1), basis_index(m1, m2)) = std::complex<Scalar>(1, 0);
      }
    }
    return s;
  }();
  return swap;
}

namespace detail {

template <typename Scalar>
void check_probability(Scalar p, const char* name) {
  if (!(p >= Scalar(-1e-12))) {
    throw std::invalid_argument(std::string(name) + ": negative probability");
  }
}

template <typename Scalar>
Scalar clamp01(Scalar p) {
  return std::max(Scalar(0), p);
}

}  // namespace detail

/// Assemble the post-collision spin state:
///   p00 |0,0><0,0|
/// + p_chi1 [ f |chi1><chi1| + (1-f) correlated_mixture ]
/// + p_chi2 |chi2><chi2|
/// + p_spectator diag(spectator_dist)
/// The coherence fraction f interpolates linearly between the unentangled
/// correlated mixture (f=0) and the pure symmetric state (f=1); on the
/// +-1 block the concurrence then equals f.
template <typename Scalar>
DensityMatrix<Scalar> spin_mixture(Scalar p00, Scalar p_chi1, Scalar p_chi2,
                                   Scalar p_spectator, Scalar coherence_fraction,
                                   const PairWeights<Scalar>& spectator_dist) {
  detail::check_probability(p00, "p00");
  detail::check_probability(p_chi1, "p_chi1");
  detail::check_probability(p_chi2, "p_chi2");
  detail::check_probability(p_spectator, "p_spectator");
  const Scalar sum = p00 + p_chi1 + p_chi2 + p_spectator;
  if (std::abs(sum - Scalar(1)) > Scalar(1e-12)) {
    throw std::invalid_argument("spin_mixture: probabilities must sum to 1");
  }
  if (!(coherence_fraction >= Scalar(0) && coherence_fraction <= Scalar(1))) {
    throw std::invalid_argument("spin_mixture: coherence fraction must lie in [0, 1]");
  }
  p00 = detail::clamp01(p00);
  p_chi1 = detail::clamp01(p_chi1);
  p_chi2 = detail::clamp01(p_chi2);
  p_spectator = detail::clamp01(p_spectator);

  DensityMatrix<Scalar> rho = DensityMatrix<Scalar>::Zero();
  rho(basis_index(0, 0), basis_index(0, 0)) = p00;
  rho += p_chi1 * (coherence_fraction * projector(symmetric_pair_state<Scalar>(1, +1)) +
                   (Scalar(1) - coherence_fraction) * correlated_mixture<Scalar>(1));
  rho += p_chi2 * projector(symmetric_pair_state<Scalar>(2, +1));

  if (p_spectator > Scalar(0)) {
    Scalar wsum = 0;
    for (int i = 0; i < kPairDim; ++i) {
      detail::check_probability(spectator_dist(i), "spectator_dist");
      wsum += spectator_dist(i);
    }
    if (std::abs(wsum - Scalar(1)) > Scalar(1e-12)) {
      throw std::invalid_argument("spin_mixture: spectator distribution must sum to 1");
    }
    for (int i = 0; i < kPairDim; ++i) {
      rho(i, i) += p_spectator * detail::clamp01(spectator_dist(i));
    }
  }
  return rho;
}

template <typename Scalar>
DensityMatrix<Scalar> spin_mixture(Scalar p00, Scalar p_chi1, Scalar p_chi2,
                                   Scalar p_spectator, Scalar coherence_fraction) {
  return spin_mixture(p00, p_chi1, p_chi2, p_spectator, coherence_fraction,
                      PairWeights<Scalar>(PairWeights<Scalar>::Zero()));
}

/// Tr(P_sym rho P_sym) with P_sym = (I + SWAP)/2.
template <typename Scalar>
Scalar exchange_symmetric_weight(const DensityMatrix<Scalar>& rho) {
  static const PairOperator<Scalar> p_sym =
      ((PairOperator<Scalar>::Identity() + swap_operator<Scalar>()) * Scalar(0.5)).eval();
  return (p_sym * rho * p_sym).trace().real();
}

/// Wootters concurrence of the renormalized 4x4 block on
/// span{|1>,|-1>} x span{|1>,|-1>}, ordered (+1,+1),(+1,-1),(-1,+1),(-1,-1).
template <typename Scalar>
Scalar concurrence_pm1(const DensityMatrix<Scalar>& rho) {
  using C = std::complex<Scalar>;
  using Block = Eigen::Matrix<C, 4, 4>;
  const std::array<int, 4> idx = {basis_index(1, 1), basis_index(1, -1),
                                  basis_index(-1, 1), basis_index(-1, -1)};
  Block block;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      block(i, j) = rho(idx[i], idx[j]);
    }
  }
  const Scalar tr = block.trace().real();
  if (!(tr > Scalar(1e-14))) {
    throw std::domain_error("concurrence_pm1: the +-1 block has zero trace");
  }
  block /= tr;

  static const Block spin_flip = [] {
    Block f = Block::Zero();
    f(0, 3) = C(-1, 0);
    f(1, 2) = C(1, 0);
    f(2, 1) = C(1, 0);
    f(3, 0) = C(-1, 0);
    return f;
  }();
  const Block rho_tilde = spin_flip * block.conjugate() * spin_flip;
  Eigen::ComplexEigenSolver<Block> solver(block * rho_tilde, false);
  std::array<Scalar, 4> lambdas;
  for (int i = 0; i < 4; ++i) {
    lambdas[i] = std::sqrt(std::max(Scalar(0), solver.eigenvalues()(i).real()));
  }
  std::sort(lambdas.begin(), lambdas.end(), std::greater<Scalar>());
  return std::max(Scalar(0), lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]);
}

namespace detail {

// Per-pair dephasing channel on span{|m,-m>, |-m,m>}: with q = lambda/2 the
// three Kraus operators below multiply the in-pair coherence by 1-lambda and
// leave every diagonal entry fixed.
template <typename Scalar>
std::array<PairOperator<Scalar>, 3> pair_dephasing_kraus(int m, Scalar lambda) {
  const Scalar q = lambda / Scalar(2);
  const int a = basis_index(m, -m);
  const int b = basis_index(-m, m);
  PairOperator<Scalar> outside = PairOperator<Scalar>::Identity();
  outside(a, a) = 0;
  outside(b, b) = 0;
  PairOperator<Scalar> z = PairOperator<Scalar>::Zero();
  z(a, a) = 1;
  z(b, b) = -1;
  return {PairOperator<Scalar>(std::sqrt(Scalar(1) - q) * PairOperator<Scalar>::Identity()),
          PairOperator<Scalar>(std::sqrt(q) * outside),
          PairOperator<Scalar>(std::sqrt(q) * z)};
}

}  // namespace detail

/// Kraus operators of the full parity-dephasing channel (both m=1 and m=2
/// pair blocks). They satisfy sum K^dag K = I.
template <typename Scalar>
std::vector<PairOperator<Scalar>> parity_dephasing_kraus(Scalar lambda) {
  if (!(lambda >= Scalar(0) && lambda <= Scalar(1))) {
    throw std::invalid_argument("parity_dephasing: lambda must lie in [0, 1]");
  }
  const auto k1 = detail::pair_dephasing_kraus<Scalar>(1, lambda);
  const auto k2 = detail::pair_dephasing_kraus<Scalar>(2, lambda);
  std::vector<PairOperator<Scalar>> out;
  out.reserve(9);
  for (const auto& a : k2) {
    for (const auto& b : k1) {
      PairOperator<Scalar> prod = a * b;
      if (prod.cwiseAbs().maxCoeff() > Scalar(0)) {
        out.push_back(std::move(prod));
      }
    }
  }
  return out;
}

/// Trace-preserving completely positive map that multiplies the coherence
/// between |m,-m> and |-m,m> (m = 1, 2) by 1-lambda and leaves all diagonal
/// entries fixed. lambda=1 turns |chi1><chi1| into the correlated mixture.
///
/// All Kraus operators are diagonal, so the channel reduces to an entrywise
/// mask; the mask is what the Kraus sum evaluates to.
template <typename Scalar>
DensityMatrix<Scalar> parity_dephasing(const DensityMatrix<Scalar>& rho, Scalar lambda) {
  if (!(lambda >= Scalar(0) && lambda <= Scalar(1))) {
    throw std::invalid_argument("parity_dephasing: lambda must lie in [0, 1]");
  }
  const Scalar q = lambda / Scalar(2);
  DensityMatrix<Scalar> out = rho;
  for (int m : {1, 2}) {
    const int a = basis_index(m, -m);
    const int b = basis_index(-m, m);
    PairWeights<Scalar> outside = PairWeights<Scalar>::Ones();
    outside(a) = 0;
    outside(b) = 0;
    PairWeights<Scalar> z = PairWeights<Scalar>::Zero();
    z(a) = 1;
    z(b) = -1;
    for (int i = 0; i < kPairDim; ++i) {
      for (int j = 0; j < kPairDim; ++j) {
        const Scalar mask = (Scalar(1) - q) + q * (outside(i) * outside(j) + z(i) * z(j));
        out(i, j) *= mask;
      }
    }
  }
  return out;
}

template <typename Scalar>
Scalar hermiticity_error(const DensityMatrix<Scalar>& rho) {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Scalar>
Scalar min_eigenvalue(const DensityMatrix<Scalar>& rho) {
  const DensityMatrix<Scalar> sym = ((rho + rho.adjoint()) * Scalar(0.5)).eval();
  Eigen::SelfAdjointEigenSolver<DensityMatrix<Scalar>> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

template <typename Scalar>
bool is_valid_density_matrix(const DensityMatrix<Scalar>& rho,
                             double hermitian_tol = kHermitianTol,
                             double trace_tol = kTraceTol, double psd_tol = kPsdTol) {
  if (hermiticity_error(rho) > Scalar(hermitian_tol)) return false;
  if (std::abs(rho.trace().real() - Scalar(1)) > Scalar(trace_tol) ||
      std::abs(rho.trace().imag()) > Scalar(trace_tol)) {
    return false;
  }
  return min_eigenvalue(rho) >= Scalar(-psd_tol);
}

}  // namespace spinpair
