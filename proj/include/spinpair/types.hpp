#pragma once

#include <array>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace spinpair {

// Two-atom spin space. Each atom lives in the five-level F=2 ground
// manifold, m = -2..2; pair states |m1,m2> are stored row-major, so the
// joint dimension is 25.
inline constexpr int kLevels = 5;
inline constexpr int kPairDim = kLevels * kLevels;

template <typename Scalar>
using Ket = Eigen::Matrix<std::complex<Scalar>, kPairDim, 1>;
template <typename Scalar>
using DensityMatrix = Eigen::Matrix<std::complex<Scalar>, kPairDim, kPairDim>;
template <typename Scalar>
using PairOperator = Eigen::Matrix<std::complex<Scalar>, kPairDim, kPairDim>;
template <typename Scalar>
using AtomOperator = Eigen::Matrix<std::complex<Scalar>, kLevels, kLevels>;
// Real weights over the 25 pair basis states (classical populations).
template <typename Scalar>
using PairWeights = Eigen::Matrix<Scalar, kPairDim, 1>;

using Ketd = Ket<double>;
using DensityMatrixd = DensityMatrix<double>;
using PairOperatord = PairOperator<double>;
using AtomOperatord = AtomOperator<double>;
using PairWeightsd = PairWeights<double>;

// Numerical contract tolerances shared across modules.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kUnitaryTol = 1e-12;

/// Static trap and field metadata attached to a run. Nothing downstream
/// derives dynamics from these numbers; they document the regime the rate
/// and detection parameters were calibrated for.
struct ExperimentContext {
  double temperature_uK = 40.0;
  double trap_depth_h_MHz = 22.0;
  std::array<double, 3> trap_frequencies_rad_s{8.5e5, 8.5e5, 1.6e5};
  double bias_field_G = 0.5;
  double reduced_mass_kg = 7.0497e-26;
  double zeeman_splitting_kHz_per_mF = 233.4;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) {
        throw std::invalid_argument(std::string("experiment.") + name +
                                    ": must be strictly positive");
      }
    };
    positive(temperature_uK, "temperature_uK");
    positive(trap_depth_h_MHz, "trap_depth_h_MHz");
    for (double w : trap_frequencies_rad_s) {
      positive(w, "trap_frequencies_rad_s");
    }
    if (!(bias_field_G >= 0.0)) {
      throw std::invalid_argument("experiment.bias_field_G: must be nonnegative");
    }
    positive(reduced_mass_kg, "reduced_mass_kg");
    positive(zeeman_splitting_kHz_per_mF, "zeeman_splitting_kHz_per_mF");
  }
};

}  // namespace spinpair
