#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "spinpair/types.hpp"

// Raman pulse unitaries on the |1> <-> |-1> two-level subspace, free-evolution
// phase segments, and tensor-product application to two-atom states. Pulses
// act identically and independently on both atoms; collisions are frozen on
// the microsecond pulse timescale.

namespace spinpair {

/// "ideal": pulses are perfect resonant rotations and detuning acts only
/// during free evolution (closed-form fringes). "full": the detuned two-level
/// unitary is used inside pulses as well (realistic fringe shapes).
enum class PulseMode { ideal, full };

template <typename Scalar>
struct RamanPulse {
  Scalar rabi_rate;  // rad/s
  Scalar detuning;   // rad/s
  Scalar duration;   // s
  Scalar phase;      // rad
};

template <typename Scalar>
struct FreeEvolution {
  Scalar detuning;  // rad/s
  Scalar duration;  // s
};

template <typename Scalar>
using PulseSegment = std::variant<RamanPulse<Scalar>, FreeEvolution<Scalar>>;

template <typename Scalar>
using PulseSequence = std::vector<PulseSegment<Scalar>>;

/// Detuned two-level rotation on the {|1>, |-1>} block, identity on
/// |0>, |+-2>. Resonant at phase 0 this is
///   |+-1> -> cos(Omega tau/2)|+-1> + i sin(Omega tau/2)|-+1>,
/// and a pure detuning reduces to the same phases as free evolution.
template <typename Scalar>
AtomOperator<Scalar> raman_unitary(const RamanPulse<Scalar>& pulse,
                                   PulseMode mode = PulseMode::full) {
  using C = std::complex<Scalar>;
  if (!(pulse.rabi_rate >= Scalar(0))) {
    throw std::invalid_argument("raman_unitary: Rabi rate must be nonnegative");
  }
  if (!(pulse.duration >= Scalar(0))) {
    throw std::invalid_argument("raman_unitary: duration must be nonnegative");
  }
  const Scalar omega = pulse.rabi_rate;
  const Scalar delta = mode == PulseMode::ideal ? Scalar(0) : pulse.detuning;
  const Scalar omega_eff = std::hypot(omega, delta);

  AtomOperator<Scalar> u = AtomOperator<Scalar>::Identity();
  const int up = 3;    // level index of m = +1
  const int down = 1;  // level index of m = -1
  if (omega_eff == Scalar(0)) {
    return u;
  }
  const Scalar half_angle = omega_eff * pulse.duration / Scalar(2);
  const Scalar c = std::cos(half_angle);
  const Scalar s = std::sin(half_angle);
  const C drive = C(0, s * omega / omega_eff) * std::exp(C(0, -pulse.phase));
  u(up, up) = C(c, -s * delta / omega_eff);
  u(down, down) = C(c, s * delta / omega_eff);
  u(up, down) = drive;
  u(down, up) = C(0, s * omega / omega_eff) * std::exp(C(0, pulse.phase));
  return u;
}

/// Rotating-frame wait: phases exp(-i delta T / 2) on |1> and
/// exp(+i delta T / 2) on |-1>, identity elsewhere.
template <typename Scalar>
AtomOperator<Scalar> free_evolution_unitary(const FreeEvolution<Scalar>& segment) {
  using C = std::complex<Scalar>;
  if (!(segment.duration >= Scalar(0))) {
    throw std::invalid_argument("free_evolution_unitary: duration must be nonnegative");
  }
  AtomOperator<Scalar> u = AtomOperator<Scalar>::Identity();
  const Scalar half_phase = segment.detuning * segment.duration / Scalar(2);
  u(3, 3) = std::exp(C(0, -half_phase));
  u(1, 1) = std::exp(C(0, half_phase));
  return u;
}

template <typename Scalar>
AtomOperator<Scalar> segment_unitary(const PulseSegment<Scalar>& segment, PulseMode mode) {
  return std::visit(
      [mode](const auto& seg) -> AtomOperator<Scalar> {
        using T = std::decay_t<decltype(seg)>;
        if constexpr (std::is_same_v<T, RamanPulse<Scalar>>) {
          return raman_unitary(seg, mode);
        } else {
          return free_evolution_unitary(seg);
        }
      },
      segment);
}

/// Ordered product of the segment unitaries (later segments act last).
template <typename Scalar>
AtomOperator<Scalar> sequence_unitary(const PulseSequence<Scalar>& sequence,
                                      PulseMode mode = PulseMode::full) {
  if (sequence.empty()) {
    throw std::invalid_argument("sequence_unitary: empty pulse sequence");
  }
  AtomOperator<Scalar> u = AtomOperator<Scalar>::Identity();
  for (const auto& segment : sequence) {
    u = (segment_unitary(segment, mode) * u).eval();
  }
  return u;
}

/// U (x) U on the pair space.
template <typename Scalar>
PairOperator<Scalar> pair_unitary(const AtomOperator<Scalar>& u) {
  PairOperator<Scalar> w;
  for (int i = 0; i < kLevels; ++i) {
    for (int j = 0; j < kLevels; ++j) {
      w.template block<kLevels, kLevels>(kLevels * i, kLevels * j) = u(i, j) * u;
    }
  }
  return w;
}

template <typename Scalar>
DensityMatrix<Scalar> apply_unitary(const DensityMatrix<Scalar>& rho,
                                    const AtomOperator<Scalar>& u) {
  const PairOperator<Scalar> w = pair_unitary(u);
  return w * rho * w.adjoint();
}

/// rho' = (U (x) U) rho (U (x) U)^dag with U the ordered product of the
/// sequence; both atoms are driven identically.
template <typename Scalar>
DensityMatrix<Scalar> apply_sequence(const DensityMatrix<Scalar>& rho,
                                     const PulseSequence<Scalar>& sequence,
                                     PulseMode mode = PulseMode::full) {
  return apply_unitary(rho, sequence_unitary(sequence, mode));
}

/// pulse(area) - wait(T) - pulse(area), all with a common phase reference.
/// The pulse duration is chosen so the resonant area is pulse_area; the
/// detuning also acts inside the pulses in full mode.
template <typename Scalar>
PulseSequence<Scalar> ramsey_sequence(Scalar omega, Scalar delta, Scalar wait,
                                      Scalar pulse_area = std::numbers::pi_v<Scalar> / 2) {
  if (!(omega > Scalar(0))) {
    throw std::invalid_argument("ramsey_sequence: Rabi rate must be positive");
  }
  if (!(wait >= Scalar(0))) {
    throw std::invalid_argument("ramsey_sequence: wait time must be nonnegative");
  }
  const RamanPulse<Scalar> pulse{omega, delta, pulse_area / omega, Scalar(0)};
  return {pulse, FreeEvolution<Scalar>{delta, wait}, pulse};
}

}  // namespace spinpair
