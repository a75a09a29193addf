#include "spinpair/collisions.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "spinpair/spin_core.hpp"

namespace spinpair {

void RateConfig::validate() const {
  auto nonneg = [](double r, const char* name) {
    if (!(r >= 0.0)) {
      throw std::invalid_argument(std::string("rates.") + name + ": negative rate");
    }
  };
  nonneg(rate_00_to_chi1, "rate_00_to_chi1_per_s");
  nonneg(rate_00_to_chi2, "rate_00_to_chi2_per_s");
  nonneg(rate_chi1_to_00, "rate_chi1_to_00_per_s");
  nonneg(rate_chi1_to_chi2, "rate_chi1_to_chi2_per_s");
  nonneg(rate_chi2_to_00, "rate_chi2_to_00_per_s");
  nonneg(rate_chi2_to_chi1, "rate_chi2_to_chi1_per_s");
  if (!(coherence_fraction >= 0.0 && coherence_fraction <= 1.0)) {
    throw std::invalid_argument("rates.coherence_fraction: must lie in [0, 1]");
  }
}

RateConfig default_rate_config() {
  RateConfig config;
  config.rate_00_to_chi1 = 5.37;
  config.rate_00_to_chi2 = 2.61;
  config.coherence_fraction = 1.0;
  return config;
}

RateGenerator build_rate_generator(const RateConfig& config) {
  config.validate();
  RateGenerator q = RateGenerator::Zero();
  const int g = static_cast<int>(CollisionSubspace::ground);
  const int c1 = static_cast<int>(CollisionSubspace::chi1);
  const int c2 = static_cast<int>(CollisionSubspace::chi2);
  q(c1, g) = config.rate_00_to_chi1;
  q(c2, g) = config.rate_00_to_chi2;
  q(g, c1) = config.rate_chi1_to_00;
  q(c2, c1) = config.rate_chi1_to_chi2;
  q(g, c2) = config.rate_chi2_to_00;
  q(c1, c2) = config.rate_chi2_to_chi1;
  for (int col = 0; col < 3; ++col) {
    q(col, col) = -(q.col(col).sum() - q(col, col));
  }
  return q;
}

PopulationVector evolve_populations(const PopulationVector& p0, const RateGenerator& q,
                                    double t_s) {
  if (!(t_s >= 0.0)) {
    throw std::invalid_argument("evolve_populations: time must be nonnegative");
  }
  // Eigen's matrix exponential is scaling-and-squaring with Pade approximants.
  PopulationVector p = (q * t_s).exp() * p0;
  // The generator has exact zero column sums, so the propagator is
  // column-stochastic; rescale away the rounding drift of the Pade result.
  const double mass = p.sum();
  if (mass > 0.0) {
    p *= p0.sum() / mass;
  }
  return p;
}

PairWeightsd spectator_pair_distribution(double prep_error) {
  if (!(prep_error >= 0.0 && prep_error <= 1.0)) {
    throw std::invalid_argument("prep_error must lie in [0, 1]");
  }
  PairWeightsd dist = PairWeightsd::Zero();
  if (prep_error == 0.0) {
    return dist;  // spectator weight is zero; distribution never used
  }
  // Per-atom outcome: |0> with probability 1-eps, otherwise uniform over the
  // four m != 0 levels.
  Eigen::Matrix<double, kLevels, 1> atom;
  atom.setConstant(prep_error / 4.0);
  atom(level_index(0)) = 1.0 - prep_error;
  const double pair_ok = (1.0 - prep_error) * (1.0 - prep_error);
  const double weight = 1.0 - pair_ok;
  for (int l1 = 0; l1 < kLevels; ++l1) {
    for (int l2 = 0; l2 < kLevels; ++l2) {
      double p = atom(l1) * atom(l2);
      if (l1 == level_index(0) && l2 == level_index(0)) {
        p -= pair_ok;
      }
      dist(kLevels * l1 + l2) = p / weight;
    }
  }
  return dist;
}

DensityMatrixd prepared_state(const RateConfig& config, double t_hold_s, double prep_error,
                              const PairWeightsd& spectator_dist) {
  if (!(prep_error >= 0.0 && prep_error <= 1.0)) {
    throw std::invalid_argument("prep_error must lie in [0, 1]");
  }
  const RateGenerator q = build_rate_generator(config);
  const PopulationVector p = evolve_populations(PopulationVector(1.0, 0.0, 0.0), q, t_hold_s);
  const double spectator = 1.0 - (1.0 - prep_error) * (1.0 - prep_error);
  const double kept = 1.0 - spectator;
  return spin_mixture<double>(kept * p(0), kept * p(1), kept * p(2), spectator,
                              config.coherence_fraction, spectator_dist);
}

DensityMatrixd prepared_state(const RateConfig& config, double t_hold_s, double prep_error) {
  return prepared_state(config, t_hold_s, prep_error, spectator_pair_distribution(prep_error));
}

}  // namespace spinpair
