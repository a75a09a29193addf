#include "spinpair/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "spinpair/spin_core.hpp"

namespace spinpair {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double chi2_term(double observed, double shots, double p) {
  const double residual = observed - shots * p;
  if (p <= 0.0 || p >= 1.0) {
    return std::abs(residual) <= 1e-9 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return residual * residual / (shots * p * (1.0 - p));
}

PulseSequence<double> scan_sequence(const ScanSpec& spec, double x) {
  if (spec.variable == ScanVariable::pulse_duration_us) {
    const double tau_s = x * 1e-6;
    return {RamanPulse<double>{spec.rabi_rate_rad_s, spec.pulse_detuning_rad_s, tau_s, 0.0}};
  }
  const double delta_rad_s = x * 1e3 * kTwoPi;
  return ramsey_sequence(spec.rabi_rate_rad_s, delta_rad_s, spec.ramsey_wait_us * 1e-6);
}

// Golden-section minimization on [lo, hi].
template <typename F>
double golden_minimize(F f, double lo, double hi, int iterations) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && (b - a) > 1e-15 * (1.0 + std::abs(a)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

struct SinusoidSolution {
  double offset = 0.0;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
  double rss = std::numeric_limits<double>::infinity();
  bool ok = false;
};

SinusoidSolution solve_sinusoid(const std::vector<double>& x, const std::vector<double>& y,
                                double frequency) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const double arg = kTwoPi * frequency * x[i];
    design(i, 0) = 1.0;
    design(i, 1) = std::cos(arg);
    design(i, 2) = std::sin(arg);
    rhs(i) = y[i];
  }
  const Eigen::Vector3d coeffs = design.colPivHouseholderQr().solve(rhs);
  SinusoidSolution sol;
  if (!coeffs.allFinite()) {
    return sol;
  }
  sol.offset = coeffs(0);
  sol.cos_coeff = coeffs(1);
  sol.sin_coeff = coeffs(2);
  sol.rss = (design * coeffs - rhs).squaredNorm();
  sol.ok = true;
  return sol;
}

}  // namespace

void ScanSpec::validate() const {
  if (grid.empty()) {
    throw std::invalid_argument("scan grid must be nonempty");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("scan grid must be strictly increasing");
    }
  }
  if (!(rabi_rate_rad_s > 0.0)) {
    throw std::invalid_argument("scan Rabi rate must be positive");
  }
  if (variable == ScanVariable::pulse_duration_us && grid.front() < 0.0) {
    throw std::invalid_argument("pulse durations must be nonnegative");
  }
  if (!(ramsey_wait_us >= 0.0)) {
    throw std::invalid_argument("Ramsey wait must be nonnegative");
  }
  if (!(destruction_lambda >= 0.0 && destruction_lambda <= 1.0)) {
    throw std::invalid_argument("destruction lambda must lie in [0, 1]");
  }
  if (!(hold_time_s >= 0.0)) {
    throw std::invalid_argument("hold time must be nonnegative");
  }
  if (!(prep_error >= 0.0 && prep_error <= 1.0)) {
    throw std::invalid_argument("prep error must lie in [0, 1]");
  }
}

void CountData::validate() const {
  const std::size_t n = x.size();
  if (n == 0) {
    throw std::invalid_argument("count data must be nonempty");
  }
  if (shots.size() != n || n0.size() != n || n1.size() != n || n2.size() != n) {
    throw std::invalid_argument("count data columns must have equal length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !(x[i] > x[i - 1])) {
      throw std::invalid_argument("count data x values must be strictly increasing");
    }
    if (!(shots[i] >= 1.0)) {
      throw std::invalid_argument("count data needs shots >= 1 at every point");
    }
    if (n0[i] < 0.0 || n1[i] < 0.0 || n2[i] < 0.0) {
      throw std::invalid_argument("counts must be nonnegative");
    }
    if (std::abs(n0[i] + n1[i] + n2[i] - shots[i]) > 1e-9 * std::max(1.0, shots[i])) {
      throw std::invalid_argument("counts must sum to shots at every point");
    }
  }
}

const std::vector<double>& CountData::counts(int channel) const {
  switch (channel) {
    case 0: return n0;
    case 1: return n1;
    case 2: return n2;
    default: throw std::invalid_argument("count channel must be 0, 1 or 2");
  }
}

std::vector<OutcomeDistribution> model_curves(const ScanSpec& spec, const RateConfig& rates,
                                              const DetectionParams& detection,
                                              double fidelity) {
  spec.validate();
  detection.validate();
  if (!(fidelity >= 0.0 && fidelity <= 1.0)) {
    throw std::invalid_argument("model fidelity must lie in [0, 1]");
  }
  RateConfig effective = rates;
  effective.coherence_fraction = fidelity;

  DensityMatrixd rho = prepared_state(effective, spec.hold_time_s, spec.prep_error);
  if (spec.destruction_lambda > 0.0) {
    rho = parity_dephasing(rho, spec.destruction_lambda);
  }

  std::vector<OutcomeDistribution> out;
  out.reserve(spec.grid.size());
  for (double x : spec.grid) {
    const DensityMatrixd after = apply_sequence(rho, scan_sequence(spec, x), spec.mode);
    out.push_back(outcome_distribution(after, detection));
  }
  return out;
}

std::vector<double> single_atom_transfer_curve(const ScanSpec& spec) {
  spec.validate();
  std::vector<double> out;
  out.reserve(spec.grid.size());
  for (double x : spec.grid) {
    const AtomOperatord u = sequence_unitary(scan_sequence(spec, x), spec.mode);
    out.push_back(std::norm(u(level_index(-1), level_index(1))));
  }
  return out;
}

ChiSquaredResult chi_squared(const CountData& data,
                             const std::vector<OutcomeDistribution>& model,
                             const std::vector<int>& channels, int n_fitted) {
  data.validate();
  if (model.size() != data.size()) {
    throw std::invalid_argument("chi_squared: model and data grids must match");
  }
  if (channels.empty()) {
    throw std::invalid_argument("chi_squared: channel selection must be nonempty");
  }
  for (std::size_t i = 0; i < channels.size(); ++i) {
    for (std::size_t j = i + 1; j < channels.size(); ++j) {
      if (channels[i] == channels[j]) {
        throw std::invalid_argument("chi_squared: duplicate channel selected");
      }
    }
  }
  ChiSquaredResult result;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (int channel : channels) {
      result.value += chi2_term(data.counts(channel)[i], data.shots[i], model[i][channel]);
    }
  }
  result.dof = static_cast<int>(data.size() * channels.size()) - n_fitted;
  return result;
}

FidelityEstimate fit_fidelity_from_models(const CountData& data,
                                          const std::vector<OutcomeDistribution>& model_f0,
                                          const std::vector<OutcomeDistribution>& model_f1,
                                          const std::vector<double>& f_grid) {
  data.validate();
  if (model_f0.size() != data.size() || model_f1.size() != data.size()) {
    throw std::invalid_argument("fit_fidelity: model and data grids must match");
  }
  if (f_grid.size() < 2) {
    throw std::invalid_argument("fit_fidelity: f grid needs at least two points");
  }
  for (std::size_t i = 1; i < f_grid.size(); ++i) {
    if (!(f_grid[i] > f_grid[i - 1])) {
      throw std::invalid_argument("fit_fidelity: f grid must be strictly increasing");
    }
  }
  if (f_grid.front() > 1e-12 || f_grid.back() < 1.0 - 1e-12) {
    throw std::invalid_argument("fit_fidelity: f grid must cover [0, 1]");
  }

  // The whole pipeline is linear in the density matrix, so every model
  // probability is affine in the coherence fraction.
  auto chi2_of = [&](double f) {
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double p = (1.0 - f) * model_f0[i].p2 + f * model_f1[i].p2;
      total += chi2_term(data.n2[i], data.shots[i], p);
    }
    return total;
  };

  FidelityEstimate estimate;
  estimate.f_grid = f_grid;
  estimate.chi2_profile.reserve(f_grid.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < f_grid.size(); ++i) {
    estimate.chi2_profile.push_back(chi2_of(f_grid[i]));
    if (estimate.chi2_profile[i] < estimate.chi2_profile[best]) {
      best = i;
    }
  }
  estimate.best_f = f_grid[best];
  estimate.chi2_min = estimate.chi2_profile[best];
  estimate.dof = static_cast<int>(data.size()) - 1;

  const double threshold = estimate.chi2_min + 1.0;
  std::size_t lo = best, hi = best;
  while (lo > 0 && estimate.chi2_profile[lo - 1] <= threshold) --lo;
  while (hi + 1 < f_grid.size() && estimate.chi2_profile[hi + 1] <= threshold) ++hi;
  estimate.lower68 = f_grid[lo];
  estimate.upper68 = f_grid[hi];
  return estimate;
}

FidelityEstimate fit_fidelity(const CountData& data, const ScanSpec& spec,
                              const RateConfig& rates, const DetectionParams& detection,
                              const std::vector<double>& f_grid) {
  ScanSpec grid_spec = spec;
  grid_spec.grid = data.x;
  return fit_fidelity_from_models(data, model_curves(grid_spec, rates, detection, 0.0),
                                  model_curves(grid_spec, rates, detection, 1.0), f_grid);
}

FringeFit fit_fringe(const CountData& data, int channel, double frequency_guess) {
  data.validate();
  if (data.size() < 8) {
    throw std::invalid_argument("fit_fringe: need at least 8 grid points");
  }
  const std::vector<double>& raw = data.counts(channel);
  std::vector<double> y(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    y[i] = raw[i] / data.shots[i];
  }

  FringeFit fit;
  const double span = data.x.back() - data.x.front();
  double min_dx = span;
  for (std::size_t i = 1; i < data.size(); ++i) {
    min_dx = std::min(min_dx, data.x[i] - data.x[i - 1]);
  }
  const double nyquist = 0.5 / min_dx;

  const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double y_var = 0.0;
  for (double v : y) {
    y_var += (v - y_mean) * (v - y_mean);
  }
  if (y_var < 1e-20) {
    fit.converged = true;
    fit.frequency_identifiable = false;
    fit.offset = y_mean;
    fit.diagnostic = "data are constant: contrast is zero and the frequency is unidentifiable";
    return fit;
  }

  double f_lo = 0.5 / span;
  double f_hi = nyquist;
  if (frequency_guess > 0.0) {
    f_lo = std::max(f_lo, frequency_guess / 4.0);
    f_hi = std::min(f_hi, frequency_guess * 4.0);
    if (!(f_hi > f_lo)) {
      f_lo = 0.5 / span;
      f_hi = nyquist;
    }
  }

  constexpr int kScanPoints = 768;
  double best_f = f_lo;
  double best_rss = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScanPoints; ++i) {
    const double f = f_lo + (f_hi - f_lo) * i / (kScanPoints - 1);
    const SinusoidSolution sol = solve_sinusoid(data.x, y, f);
    if (sol.ok && sol.rss < best_rss) {
      best_rss = sol.rss;
      best_f = f;
    }
  }
  if (!std::isfinite(best_rss)) {
    fit.diagnostic = "frequency scan failed: no finite least-squares solution";
    return fit;
  }

  const double step = (f_hi - f_lo) / (kScanPoints - 1);
  const double refined = golden_minimize(
      [&](double f) {
        const SinusoidSolution sol = solve_sinusoid(data.x, y, f);
        return sol.ok ? sol.rss : std::numeric_limits<double>::infinity();
      },
      std::max(f_lo, best_f - step), std::min(f_hi, best_f + step), 200);

  const SinusoidSolution sol = solve_sinusoid(data.x, y, refined);
  if (!sol.ok) {
    fit.diagnostic = "refinement failed: singular normal equations";
    return fit;
  }
  fit.converged = true;
  fit.offset = sol.offset;
  fit.contrast = std::hypot(sol.cos_coeff, sol.sin_coeff);
  fit.frequency = refined;
  fit.phase = std::atan2(-sol.sin_coeff, sol.cos_coeff);
  fit.rss = sol.rss;
  fit.frequency_identifiable = fit.contrast > 1e-9;
  if (!fit.frequency_identifiable) {
    fit.diagnostic = "fitted contrast is indistinguishable from zero; frequency unidentifiable";
  }
  return fit;
}

}  // namespace spinpair
