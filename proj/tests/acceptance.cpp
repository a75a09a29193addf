// Acceptance suite: exercises every model anchor and property gate at its
// stated tolerance and prints one PASS/FAIL line per criterion.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "spinpair/config.hpp"
#include "spinpair/csv.hpp"
#include "spinpair/inference.hpp"
#include "spinpair/version.hpp"
#include "testutil.hpp"

using namespace spinpair;
constexpr double kPi = std::numbers::pi;
constexpr double kOmega = 2.0 * kPi * 12.5e3;

namespace {

struct Checker {
  std::vector<std::string> problems;

  void expect(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
  void expect_near(double value, double target, double tol, const std::string& what) {
    if (!(std::abs(value - target) <= tol)) {
      char buffer[160];
      std::snprintf(buffer, sizeof(buffer), "%s: got %.6g, want %.6g +- %.2g", what.c_str(),
                    value, target, tol);
      problems.push_back(buffer);
    }
  }
};

int g_failures = 0;

void criterion(int number, const std::string& name,
               const std::function<void(Checker&)>& body) {
  Checker check;
  try {
    body(check);
  } catch (const std::exception& err) {
    check.problems.push_back(std::string("exception: ") + err.what());
  }
  if (check.problems.empty()) {
    std::printf("[PASS] %d. %s\n", number, name.c_str());
  } else {
    ++g_failures;
    std::printf("[FAIL] %d. %s\n", number, name.c_str());
    for (const std::string& p : check.problems) {
      std::printf("       - %s\n", p.c_str());
    }
  }
  std::fflush(stdout);
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

DensityMatrixd after_resonant_pulse(const DensityMatrixd& rho, double area) {
  return apply_sequence(rho, {PulseSegment<double>(RamanPulse<double>{kOmega, 0.0, area / kOmega, 0.0})});
}

ScanSpec pulse_spec(const RunConfig& config, int points, double tau_max_us) {
  ScanSpec spec;
  spec.variable = ScanVariable::pulse_duration_us;
  spec.grid = linspace(0.0, tau_max_us, points);
  spec.rabi_rate_rad_s = config.pulse.rabi_rate_rad_s;
  spec.hold_time_s = config.preparation.hold_time_s;
  spec.prep_error = config.preparation.prep_error;
  spec.mode = PulseMode::ideal;
  return spec;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CountData sampled_data(const std::vector<double>& grid,
                       const std::vector<OutcomeDistribution>& curve, std::int64_t shots,
                       std::uint64_t seed) {
  CountData data;
  data.x = grid;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const OutcomeCounts counts = sample_outcomes(curve[i], shots, mix_seed(seed, i));
    data.shots.push_back(static_cast<double>(shots));
    data.n0.push_back(static_cast<double>(counts.n0));
    data.n1.push_back(static_cast<double>(counts.n1));
    data.n2.push_back(static_cast<double>(counts.n2));
  }
  return data;
}

const std::string kSourceDir = SPINPAIR_SOURCE_DIR;

}  // namespace

int main() {
  std::printf("spinpair %s acceptance suite\n", std::string(kVersion).c_str());
  const RunConfig config = load_config(kSourceDir + "/configs/default.json");
  const DetectionParams ideal = DetectionParams::ideal();

  criterion(1, "pi/2 discrimination: P1 = 0 entangled, 0.5 mixed (tol 1e-12)", [&](Checker& c) {
    const DensityMatrixd chi1 = projector(symmetric_pair_state(1, +1));
    const OutcomeDistribution entangled =
        outcome_distribution(after_resonant_pulse(chi1, kPi / 2), ideal);
    c.expect_near(entangled.p1, 0.0, 1e-12, "entangled P1");
    const OutcomeDistribution mixed =
        outcome_distribution(after_resonant_pulse(correlated_mixture(1), kPi / 2), ideal);
    c.expect_near(mixed.p1, 0.5, 1e-12, "mixed P1");
  });

  criterion(2, "amplitude halving: f=0 peak-to-peak is half of f=1 (tol 1e-10)", [&](Checker& c) {
    ScanSpec spec = pulse_spec(config, 25, 40.0);
    spec.prep_error = 0.0;
    auto peak_to_peak = [&](double f) {
      const auto curve = model_curves(spec, config.rates, ideal, f);
      double lo = 1.0, hi = 0.0;
      for (const auto& p : curve) {
        lo = std::min(lo, p.p2);
        hi = std::max(hi, p.p2);
      }
      return hi - lo;
    };
    const double full = peak_to_peak(1.0);
    const double half = peak_to_peak(0.0);
    c.expect(full > 0.1, "entangled modulation should be visible");
    c.expect_near(full - 2.0 * half, 0.0, 1e-10, "peak-to-peak ratio");
  });

  criterion(3, "closed-form scan vs brute-force (UxU) oracle (tol 1e-10)", [&](Checker& c) {
    const DensityMatrixd chi1 = projector(symmetric_pair_state(1, +1));
    double max_err = 0.0;
    for (int i = 0; i < 25; ++i) {
      const double theta = kPi * i / 24.0;
      const OutcomeDistribution out =
          outcome_distribution(after_resonant_pulse(chi1, theta), ideal);
      const double s2 = std::sin(theta) * std::sin(theta);
      const double c2 = std::cos(theta) * std::cos(theta);
      max_err = std::max(max_err, std::abs(out.p2 - s2 / 2.0));
      max_err = std::max(max_err, std::abs(out.p1 - c2));
      const sptest::PulseOracle oracle = sptest::PulseOracle::entangled(theta);
      max_err = std::max(max_err, std::abs(out.p2 - oracle.prob_both_down()));
      max_err = std::max(max_err, std::abs(out.p1 - oracle.prob_different()));
      max_err = std::max(max_err, std::abs(out.p0 - oracle.prob_both_up()));
    }
    c.expect_near(max_err, 0.0, 1e-10, "max deviation over the 25-point grid");
  });

  criterion(4, "destruction equivalence: lambda=1 = f=0 (1e-12); C = 1-lambda (1e-10)",
            [&](Checker& c) {
    ScanSpec spec = pulse_spec(config, 13, 40.0);
    ScanSpec destroyed = spec;
    destroyed.destruction_lambda = 1.0;
    const auto a = model_curves(destroyed, config.rates, config.detection, 1.0);
    const auto b = model_curves(spec, config.rates, config.detection, 0.0);
    double max_err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      max_err = std::max({max_err, std::abs(a[i].p0 - b[i].p0), std::abs(a[i].p1 - b[i].p1),
                          std::abs(a[i].p2 - b[i].p2)});
    }
    c.expect_near(max_err, 0.0, 1e-12, "pointwise curve difference");

    const DensityMatrixd chi1 = projector(symmetric_pair_state(1, +1));
    double max_c_err = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double lambda = i / 20.0;
      const double cc = concurrence_pm1(parity_dephasing(chi1, lambda));
      max_c_err = std::max(max_c_err, std::abs(cc - (1.0 - lambda)));
    }
    c.expect_near(max_c_err, 0.0, 1e-10, "concurrence vs 1 - lambda");
  });

  criterion(5, "Ramsey factor two: pair spacing 100 kHz, single atom exactly twice",
            [&](Checker& c) {
    ScanSpec spec;
    spec.variable = ScanVariable::detuning_khz;
    spec.grid = linspace(-150.0, 150.0, 61);
    spec.rabi_rate_rad_s = config.pulse.rabi_rate_rad_s;
    spec.ramsey_wait_us = 5.0;
    spec.hold_time_s = config.preparation.hold_time_s;
    spec.prep_error = 0.0;
    spec.mode = PulseMode::ideal;

    const auto pair_curve = model_curves(spec, config.rates, ideal, 1.0);
    CountData pair_data;
    pair_data.x = spec.grid;
    for (const auto& p : pair_curve) {
      pair_data.shots.push_back(1.0);
      pair_data.n0.push_back(p.p0);
      pair_data.n1.push_back(p.p1);
      pair_data.n2.push_back(p.p2);
    }
    const FringeFit pair_fit = fit_fringe(pair_data, 1, 0.01);
    c.expect(pair_fit.converged && pair_fit.frequency_identifiable, "pair fringe fit");
    c.expect_near(1.0 / pair_fit.frequency, 100.0, 1e-3, "entangled fringe spacing, kHz");

    const auto transfer = single_atom_transfer_curve(spec);
    CountData single;
    single.x = spec.grid;
    for (double p : transfer) {
      single.shots.push_back(1.0);
      single.n0.push_back(1.0 - p);
      single.n1.push_back(p);
      single.n2.push_back(0.0);
    }
    const FringeFit single_fit = fit_fringe(single, 1, 0.005);
    c.expect(single_fit.converged && single_fit.frequency_identifiable, "single-atom fit");
    c.expect_near(pair_fit.frequency / single_fit.frequency, 2.0, 1e-6,
                  "fringe spacing ratio");
  });

  criterion(6, "preparation anchor: shipped rates give p_chi1 = 0.37 +- 0.02 at 100 ms",
            [&](Checker& c) {
    const RateGenerator q = build_rate_generator(config.rates);
    const PopulationVector p = evolve_populations(PopulationVector(1, 0, 0), q, 0.1);
    c.expect_near(p(1), 0.37, 0.02, "p_chi1 at 100 ms");
    const PopulationVector lib =
        evolve_populations(PopulationVector(1, 0, 0),
                           build_rate_generator(default_rate_config()), 0.1);
    c.expect_near(lib(1), 0.37, 0.02, "library default rates");
  });

  criterion(7, "inference calibration: 68% coverage at f in {0, 0.5, 1}; shipped fit > 0.9",
            [&](Checker& c) {
    const ScanSpec spec = pulse_spec(config, 13, 40.0);
    const auto model0 = model_curves(spec, config.rates, config.detection, 0.0);
    const auto model1 = model_curves(spec, config.rates, config.detection, 1.0);
    // Calibration runs profile the chi-squared on a grid extended past [0, 1]
    // (the model is affine in f), so the delta-chi2 = 1 rule is referenced to
    // the unconstrained minimum; clamping the reference to the physical range
    // would over-cover at the boundary truths (~84%).
    const std::vector<double> calibration_grid = linspace(-1.0, 2.0, 301);
    const int reps = 200;
    const double truths[3] = {0.0, 0.5, 1.0};
    for (int t = 0; t < 3; ++t) {
      const auto truth_curve = model_curves(spec, config.rates, config.detection, truths[t]);
      int covered = 0;
      for (int rep = 0; rep < reps; ++rep) {
        const CountData data =
            sampled_data(spec.grid, truth_curve, 200, 40000ULL + 1000ULL * t + rep);
        const FidelityEstimate est =
            fit_fidelity_from_models(data, model0, model1, calibration_grid);
        if (est.lower68 <= truths[t] && truths[t] <= est.upper68) ++covered;
      }
      char label[64];
      std::snprintf(label, sizeof(label), "coverage at f = %.1f", truths[t]);
      c.expect_near(covered / static_cast<double>(reps), 0.68, 0.07, label);
    }

    const ParsedCountData shipped = read_count_data_csv(kSourceDir + "/data/synthetic_f1.csv");
    ScanSpec shipped_spec = spec;
    shipped_spec.grid = shipped.data.x;
    const FidelityEstimate est = fit_fidelity(shipped.data, shipped_spec, config.rates,
                                              config.detection, linspace(0.0, 1.0, 101));
    c.expect(est.best_f >= 0.99, "shipped dataset best f should be 1");
    c.expect(est.lower68 > 0.9, "shipped dataset interval lower bound > 0.9 (got " +
                                    std::to_string(est.lower68) + ")");
  });

  criterion(8, "sampler fidelity: TV < 0.01 at 1e5 shots, bit-exact seeds", [&](Checker& c) {
    std::mt19937_64 rng(808);
    for (int trial = 0; trial < 20; ++trial) {
      const DensityMatrixd rho = sptest::random_density(rng);
      const DetectionParams params = sptest::random_detection_params(rng);
      const OutcomeDistribution analytic = outcome_distribution(rho, params);
      const std::uint64_t seed = 5000 + trial;
      const OutcomeCounts counts = sample_outcomes(rho, params, 100000, seed);
      const OutcomeCounts again = sample_outcomes(rho, params, 100000, seed);
      c.expect(counts.n0 == again.n0 && counts.n1 == again.n1 && counts.n2 == again.n2,
               "same seed must reproduce identical counts");
      const OutcomeDistribution empirical{counts.n0 / 1e5, counts.n1 / 1e5, counts.n2 / 1e5};
      const double tv = sptest::total_variation(empirical, analytic);
      if (tv >= 0.01) {
        c.expect(false, "TV distance " + std::to_string(tv) + " at trial " +
                            std::to_string(trial));
      }
    }
  });

  criterion(9, "structural invariant suites at module tolerances", [&](Checker& c) {
    for (int m1 = -2; m1 <= 2; ++m1) {
      for (int m2 = -2; m2 <= 2; ++m2) {
        const auto [r1, r2] = levels_from_basis_index(basis_index(m1, m2));
        c.expect(r1 == m1 && r2 == m2, "basis index round trip");
      }
    }

    std::mt19937_64 rng(909);
    for (int trial = 0; trial < 50; ++trial) {
      const RamanPulse<double> pulse{2e5 * sptest::uniform(rng),
                                     2e5 * (sptest::uniform(rng) - 0.5),
                                     1e-4 * sptest::uniform(rng),
                                     2.0 * kPi * sptest::uniform(rng)};
      const AtomOperatord u = raman_unitary(pulse);
      if ((u.adjoint() * u - AtomOperatord::Identity()).cwiseAbs().maxCoeff() >= 1e-12) {
        c.expect(false, "pulse unitarity at trial " + std::to_string(trial));
      }
    }

    for (int trial = 0; trial < 50; ++trial) {
      PulseSequence<double> seq;
      const int segments = 1 + static_cast<int>(sptest::uniform(rng) * 3);
      for (int s = 0; s < segments; ++s) {
        if (sptest::uniform(rng) < 0.5) {
          seq.push_back(RamanPulse<double>{2e5 * sptest::uniform(rng),
                                           1e5 * (sptest::uniform(rng) - 0.5),
                                           2e-5 * sptest::uniform(rng),
                                           2.0 * kPi * sptest::uniform(rng)});
        } else {
          seq.push_back(FreeEvolution<double>{1e5 * (sptest::uniform(rng) - 0.5),
                                              2e-5 * sptest::uniform(rng)});
        }
      }
      const DensityMatrixd rho =
          parity_dephasing(sptest::random_density(rng), sptest::uniform(rng));
      const DensityMatrixd out = apply_sequence(rho, seq);
      if (std::abs(exchange_symmetric_weight(rho) - exchange_symmetric_weight(out)) >= 1e-10) {
        c.expect(false, "SWAP commutation at trial " + std::to_string(trial));
      }
      if (!is_valid_density_matrix(out)) {
        c.expect(false, "density-matrix invariants at trial " + std::to_string(trial));
      }
    }

    for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const auto kraus = parity_dephasing_kraus(lambda);
      PairOperatord sum = PairOperatord::Zero();
      for (const auto& k : kraus) sum += k.adjoint() * k;
      if ((sum - PairOperatord::Identity()).cwiseAbs().maxCoeff() >= 1e-12) {
        c.expect(false, "Kraus completeness at lambda " + std::to_string(lambda));
      }
    }

    const DensityMatrixd prepared = prepared_state(config.rates, 0.2, 0.0);
    for (int m1 = -2; m1 <= 2; ++m1) {
      for (int m2 = -2; m2 <= 2; ++m2) {
        if (m1 + m2 != 0 &&
            std::abs(prepared(basis_index(m1, m2), basis_index(m1, m2))) >= 1e-14) {
          c.expect(false, "subspace confinement: off-shell population");
        }
      }
    }
    const Ketd anti1 = symmetric_pair_state(1, -1);
    const Ketd anti2 = symmetric_pair_state(2, -1);
    c.expect(std::abs((anti1.adjoint() * prepared * anti1)(0, 0)) < 1e-14,
             "subspace confinement: chi1 antisymmetric weight");
    c.expect(std::abs((anti2.adjoint() * prepared * anti2)(0, 0)) < 1e-14,
             "subspace confinement: chi2 antisymmetric weight");

    for (int trial = 0; trial < 25; ++trial) {
      RateConfig rates;
      rates.rate_00_to_chi1 = 1e3 * sptest::uniform(rng);
      rates.rate_00_to_chi2 = 1e3 * sptest::uniform(rng);
      rates.rate_chi1_to_00 = 1e3 * sptest::uniform(rng);
      rates.rate_chi1_to_chi2 = 1e3 * sptest::uniform(rng);
      rates.rate_chi2_to_00 = 1e3 * sptest::uniform(rng);
      rates.rate_chi2_to_chi1 = 1e3 * sptest::uniform(rng);
      const RateGenerator q = build_rate_generator(rates);
      PopulationVector p0(sptest::uniform(rng), sptest::uniform(rng), sptest::uniform(rng));
      p0 /= p0.sum();
      for (double t : {1e-3, 0.1, 1.0, 10.0}) {
        const PopulationVector p = evolve_populations(p0, q, t);
        if (std::abs(p.sum() - 1.0) >= 1e-12 || p.minCoeff() <= -1e-12) {
          c.expect(false, "probability conservation");
        }
      }
    }
  });

  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", g_failures);
  return 1;
}
