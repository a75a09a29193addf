#pragma once

#include <string>
#include <vector>

#include "spinpair/collisions.hpp"
#include "spinpair/detection.hpp"
#include "spinpair/pulses.hpp"

// Forward model curves for pulse and Ramsey scans, chi-squared comparison
// against measured count data, fidelity estimation with a 68% confidence
// interval, and sinusoidal fringe fitting.

namespace spinpair {

enum class ScanVariable {
  pulse_duration_us,  // Raman pulse duration tau, microseconds
  detuning_khz,       // Raman detuning, kHz (Ramsey sequence)
};

struct ScanSpec {
  ScanVariable variable = ScanVariable::pulse_duration_us;
  std::vector<double> grid;

  // Fixed protocol parameters.
  double rabi_rate_rad_s = 0.0;
  double ramsey_wait_us = 5.0;       // detuning scans
  double pulse_detuning_rad_s = 0.0; // pulse-duration scans
  double destruction_lambda = 0.0;
  double hold_time_s = 0.1;
  double prep_error = 0.0;
  PulseMode mode = PulseMode::ideal;

  void validate() const;
};

struct CountData {
  std::vector<double> x;
  std::vector<double> shots;
  std::vector<double> n0;
  std::vector<double> n1;
  std::vector<double> n2;

  std::size_t size() const { return x.size(); }
  void validate() const;
  const std::vector<double>& counts(int channel) const;
};

struct ChiSquaredResult {
  double value = 0.0;
  int dof = 0;
};

struct FidelityEstimate {
  double best_f = 0.0;
  double chi2_min = 0.0;
  int dof = 0;
  double lower68 = 0.0;
  double upper68 = 0.0;
  std::vector<double> f_grid;
  std::vector<double> chi2_profile;
};

struct FringeFit {
  bool converged = false;
  bool frequency_identifiable = false;
  double offset = 0.0;
  double contrast = 0.0;
  double frequency = 0.0;  // cycles per x unit
  double phase = 0.0;      // rad, y = offset + contrast*cos(2*pi*frequency*x + phase)
  double rss = 0.0;
  std::string diagnostic;
};

/// Compose prepared_state -> parity_dephasing -> apply_sequence ->
/// outcome_distribution at every grid point. The fidelity argument replaces
/// the coherence fraction of the rate config.
std::vector<OutcomeDistribution> model_curves(const ScanSpec& spec, const RateConfig& rates,
                                              const DetectionParams& detection,
                                              double fidelity);

/// Reference signal: probability that a lone atom prepared in |1> ends in
/// |-1> after the scan's sequence (detection not applied).
std::vector<double> single_atom_transfer_curve(const ScanSpec& spec);

/// Pearson chi-squared with binomial variance shots*P*(1-P) per selected
/// channel. A model probability of exactly 0 or 1 with a discrepant
/// observation yields an infinite value (reported, not thrown).
/// dof = #points * #channels - n_fitted.
ChiSquaredResult chi_squared(const CountData& data,
                             const std::vector<OutcomeDistribution>& model,
                             const std::vector<int>& channels, int n_fitted = 0);

/// Profile the 2-atom-channel chi-squared over f_grid using the affine
/// dependence of the model on the coherence fraction. The 68% interval is
/// {f in f_grid : chi2(f) <= chi2_min + 1}.
FidelityEstimate fit_fidelity(const CountData& data, const ScanSpec& spec,
                              const RateConfig& rates, const DetectionParams& detection,
                              const std::vector<double>& f_grid);

/// Same, with the f=0 and f=1 model curves precomputed (the model is affine
/// in f, so these two span every curve the profile needs).
FidelityEstimate fit_fidelity_from_models(const CountData& data,
                                          const std::vector<OutcomeDistribution>& model_f0,
                                          const std::vector<OutcomeDistribution>& model_f1,
                                          const std::vector<double>& f_grid);

/// Least-squares fit of P(x) = offset + contrast*cos(2*pi*frequency*x + phase)
/// on one channel, via a dense frequency pre-scan followed by golden-section
/// refinement (the residual surface is multimodal in frequency).
/// frequency_guess is in cycles per x unit; pass 0 for a broadband scan.
FringeFit fit_fringe(const CountData& data, int channel, double frequency_guess);

}  // namespace spinpair
