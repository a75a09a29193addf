#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "spinpair/types.hpp"

// Classical post-pulse measurement pipeline: diagonal readout, |1> -> F=3
// transfer, spontaneous-emission branching, inelastic pair loss, push-out,
// background loss, and the resulting 0/1/2-atom outcome distribution, plus a
// seeded Monte Carlo sampler.

namespace spinpair {

struct DetectionParams {
  double eject_efficiency = 1.0;      // probability an F=3-labeled atom is removed
  double bg_loss = 0.0;               // per-atom survival-failure probability
  double p_spont_emission = 0.0;      // per-atom scattering probability per sequence
  double se_to_f3 = 0.5;              // branching of a scattered atom into F=3
  double p_inelastic = 0.0;           // pair loss when exactly one atom is F=3-labeled

  void validate() const;
  static DetectionParams ideal() { return DetectionParams{}; }
};

struct OutcomeDistribution {
  double p0 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;

  double operator[](int channel) const;
};

struct OutcomeCounts {
  std::int64_t n0 = 0;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
};

// [level1][level2] classical populations, level index = m + 2.
using JointLevelDistribution = Eigen::Matrix<double, kLevels, kLevels>;
using LevelDistribution = Eigen::Matrix<double, kLevels, 1>;

/// The 25 diagonal entries of rho, coherences discarded.
JointLevelDistribution joint_level_distribution(const DensityMatrixd& rho);

/// Exact propagation of a joint level distribution through the ordered
/// classical stages: (1) per-atom spontaneous emission, (2) |1> -> F=3
/// labeling, (3) inelastic pair loss when exactly one atom is F=3-labeled,
/// (4) push-out of F=3 atoms, (5) per-atom background loss. Enumerates the
/// finite joint state space; no sampling.
OutcomeDistribution outcome_distribution(const JointLevelDistribution& levels,
                                         const DetectionParams& params);

OutcomeDistribution outcome_distribution(const DensityMatrixd& rho,
                                         const DetectionParams& params);

/// Same stages for a lone atom (no inelastic partner); returns (P0, P1).
std::pair<double, double> single_atom_outcome(const LevelDistribution& levels,
                                              const DetectionParams& params);

/// Multinomial draw from an outcome distribution. The generator is a private
/// mt19937_64 stream per call, so fixed seeds reproduce bit-exactly on any
/// platform.
OutcomeCounts sample_outcomes(const OutcomeDistribution& dist, std::int64_t shots,
                              std::uint64_t seed);

OutcomeCounts sample_outcomes(const DensityMatrixd& rho, const DetectionParams& params,
                              std::int64_t shots, std::uint64_t seed);

}  // namespace spinpair
