#include "spinpair/detection.hpp"

#include <random>
#include <stdexcept>

#include "spinpair/spin_core.hpp"

namespace spinpair {

namespace {

// Extended per-atom label space used by the enumeration: the five F=2 levels,
// an F=3 label, and "gone".
constexpr int kF3 = 5;
constexpr int kGone = 6;
constexpr int kExt = 7;

using ExtMatrix = Eigen::Matrix<double, kExt, kExt>;
using ExtVector = Eigen::Matrix<double, kExt, 1>;

ExtMatrix spont_emission_matrix(const DetectionParams& p) {
  ExtMatrix a = ExtMatrix::Identity();
  if (p.p_spont_emission > 0.0) {
    for (int from = 0; from < kLevels; ++from) {
      a(from, from) = 1.0 - p.p_spont_emission;
      for (int to = 0; to < kLevels; ++to) {
        a(to, from) += p.p_spont_emission * (1.0 - p.se_to_f3) / kLevels;
      }
      a(kF3, from) = p.p_spont_emission * p.se_to_f3;
    }
  }
  return a;
}

ExtMatrix transfer_matrix() {
  // Atoms in |1> (level index 3) are relabeled F=3 before push-out.
  ExtMatrix b = ExtMatrix::Identity();
  b(3, 3) = 0.0;
  b(kF3, 3) = 1.0;
  return b;
}

ExtMatrix pushout_matrix(const DetectionParams& p) {
  ExtMatrix c = ExtMatrix::Identity();
  c(kF3, kF3) = 1.0 - p.eject_efficiency;
  c(kGone, kF3) = p.eject_efficiency;
  return c;
}

ExtMatrix bg_loss_matrix(const DetectionParams& p) {
  ExtMatrix d = ExtMatrix::Identity();
  for (int l = 0; l < kGone; ++l) {
    d(l, l) = 1.0 - p.bg_loss;
    d(kGone, l) = p.bg_loss;
  }
  return d;
}

}  // namespace

void DetectionParams::validate() const {
  auto probability = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument(std::string("detection.") + name +
                                  ": must lie in [0, 1]");
    }
  };
  probability(eject_efficiency, "eject_efficiency");
  probability(bg_loss, "bg_loss");
  probability(p_spont_emission, "p_spontaneous_emission");
  probability(se_to_f3, "se_to_F3_branching");
  probability(p_inelastic, "p_inelastic");
}

double OutcomeDistribution::operator[](int channel) const {
  switch (channel) {
    case 0: return p0;
    case 1: return p1;
    case 2: return p2;
    default: throw std::invalid_argument("outcome channel must be 0, 1 or 2");
  }
}

JointLevelDistribution joint_level_distribution(const DensityMatrixd& rho) {
  JointLevelDistribution levels;
  for (int l1 = 0; l1 < kLevels; ++l1) {
    for (int l2 = 0; l2 < kLevels; ++l2) {
      levels(l1, l2) = rho(kLevels * l1 + l2, kLevels * l1 + l2).real();
    }
  }
  return levels;
}

OutcomeDistribution outcome_distribution(const JointLevelDistribution& levels,
                                         const DetectionParams& params) {
  params.validate();

  ExtMatrix joint = ExtMatrix::Zero();
  joint.topLeftCorner<kLevels, kLevels>() = levels;

  const ExtMatrix se = spont_emission_matrix(params);
  joint = se * joint * se.transpose();

  const ExtMatrix transfer = transfer_matrix();
  joint = transfer * joint * transfer.transpose();

  if (params.p_inelastic > 0.0) {
    for (int l = 0; l < kLevels; ++l) {
      joint(kGone, kGone) += params.p_inelastic * (joint(l, kF3) + joint(kF3, l));
      joint(l, kF3) *= 1.0 - params.p_inelastic;
      joint(kF3, l) *= 1.0 - params.p_inelastic;
    }
  }

  const ExtMatrix push = pushout_matrix(params);
  joint = push * joint * push.transpose();

  const ExtMatrix bg = bg_loss_matrix(params);
  joint = bg * joint * bg.transpose();

  OutcomeDistribution out;
  out.p2 = joint.topLeftCorner<kGone, kGone>().sum();
  out.p1 = joint.row(kGone).head(kGone).sum() + joint.col(kGone).head(kGone).sum();
  out.p0 = joint(kGone, kGone);
  return out;
}

OutcomeDistribution outcome_distribution(const DensityMatrixd& rho,
                                         const DetectionParams& params) {
  return outcome_distribution(joint_level_distribution(rho), params);
}

std::pair<double, double> single_atom_outcome(const LevelDistribution& levels,
                                              const DetectionParams& params) {
  params.validate();
  ExtVector v = ExtVector::Zero();
  v.head<kLevels>() = levels;
  v = spont_emission_matrix(params) * v;
  v = transfer_matrix() * v;
  v = pushout_matrix(params) * v;
  v = bg_loss_matrix(params) * v;
  return {v(kGone), v.head(kGone).sum()};
}

OutcomeCounts sample_outcomes(const OutcomeDistribution& dist, std::int64_t shots,
                              std::uint64_t seed) {
  if (shots < 1) {
    throw std::invalid_argument("sample_outcomes: shots must be >= 1");
  }
  std::mt19937_64 gen(seed);
  OutcomeCounts counts;
  for (std::int64_t s = 0; s < shots; ++s) {
    // 53-bit uniform in [0, 1); avoids std::*_distribution, whose output is
    // implementation-defined.
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    if (u < dist.p0) {
      ++counts.n0;
    } else if (u < dist.p0 + dist.p1) {
      ++counts.n1;
    } else {
      ++counts.n2;
    }
  }
  return counts;
}

OutcomeCounts sample_outcomes(const DensityMatrixd& rho, const DetectionParams& params,
                              std::int64_t shots, std::uint64_t seed) {
  return sample_outcomes(outcome_distribution(rho, params), shots, seed);
}

}  // namespace spinpair
