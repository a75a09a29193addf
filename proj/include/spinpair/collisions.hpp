#pragma once

#include <Eigen/Dense>

#include "spinpair/types.hpp"

// Classical continuous-time rate model of the conservation-rule-restricted
// relaxation among {|0,0>, chi1 manifold, chi2 manifold}. Collisions conserve
// m1+m2 and exchange symmetry, so these three subspaces are the only slots
// the model has; transitions violating the rules cannot be expressed.

namespace spinpair {

enum class CollisionSubspace { ground = 0, chi1 = 1, chi2 = 2 };

struct RateConfig {
  // 1/s, one entry per ordered pair of subspaces.
  double rate_00_to_chi1 = 0.0;
  double rate_00_to_chi2 = 0.0;
  double rate_chi1_to_00 = 0.0;
  double rate_chi1_to_chi2 = 0.0;
  double rate_chi2_to_00 = 0.0;
  double rate_chi2_to_chi1 = 0.0;
  // Coherence fraction assigned to the chi1 population at readout.
  double coherence_fraction = 1.0;

  void validate() const;
};

/// Shipped defaults, calibrated so that a pair starting in |0,0> reaches
/// p_chi1 = 0.370 after 100 ms of hold time (with p00 = 0.450, p_chi2 = 0.180).
RateConfig default_rate_config();

// (p00, p_chi1, p_chi2)
using PopulationVector = Eigen::Vector3d;
// Q[a][b] = rate(b -> a) off-diagonal; columns sum to zero.
using RateGenerator = Eigen::Matrix3d;

RateGenerator build_rate_generator(const RateConfig& config);

/// p(t) = exp(Q t) p0.
PopulationVector evolve_populations(const PopulationVector& p0, const RateGenerator& q,
                                    double t_s);

/// Joint level distribution of a mis-prepared pair, conditioned on at least
/// one atom having missed |0>. A failed atom lands uniformly on the four
/// m != 0 levels.
PairWeightsd spectator_pair_distribution(double prep_error);

/// Evolve (1,0,0) under the rate generator for t_hold, then assemble the
/// spin state with pair-spectator weight 1-(1-prep_error)^2 and the
/// configured coherence fraction.
DensityMatrixd prepared_state(const RateConfig& config, double t_hold_s, double prep_error,
                              const PairWeightsd& spectator_dist);

/// Same, with the default mis-preparation model.
DensityMatrixd prepared_state(const RateConfig& config, double t_hold_s, double prep_error);

}  // namespace spinpair
