#include "spinpair/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinpair/config.hpp"
#include "spinpair/csv.hpp"
#include "spinpair/inference.hpp"
#include "spinpair/spin_core.hpp"
#include "spinpair/version.hpp"

namespace spinpair {

namespace {

using nlohmann::ordered_json;

// splitmix64 of (seed, index): an independent, platform-stable sampler seed
// per grid point.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 2) {
    throw std::invalid_argument("scan needs at least 2 points");
  }
  if (!(hi > lo)) {
    throw std::invalid_argument("scan maximum must exceed its minimum");
  }
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) {
    grid[i] = lo + (hi - lo) * i / (points - 1);
  }
  return grid;
}

// "start:step:stop", inclusive of stop up to half a step.
std::vector<double> parse_grid_spec(const std::string& text) {
  const auto first = text.find(':');
  const auto second = text.find(':', first == std::string::npos ? first : first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw std::invalid_argument("grid must have the form start:step:stop");
  }
  std::size_t used = 0;
  const std::string parts[3] = {text.substr(0, first),
                                text.substr(first + 1, second - first - 1),
                                text.substr(second + 1)};
  double values[3];
  for (int i = 0; i < 3; ++i) {
    values[i] = std::stod(parts[i], &used);
    if (used != parts[i].size()) {
      throw std::invalid_argument("grid must have the form start:step:stop");
    }
  }
  const double start = values[0], step = values[1], stop = values[2];
  if (!(step > 0.0) || !(stop > start)) {
    throw std::invalid_argument("grid needs step > 0 and stop > start");
  }
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double f = start + step * i;
    if (f > stop + step / 2) break;
    grid.push_back(std::min(f, stop));
  }
  return grid;
}

std::string single_line(std::string message) {
  std::replace(message.begin(), message.end(), '\n', ' ');
  return message;
}

std::string x_name_of(const ScanSpec& spec) {
  return spec.variable == ScanVariable::pulse_duration_us ? "tau_us" : "delta_khz";
}

ordered_json scan_to_json(const ScanSpec& spec, double fidelity) {
  ordered_json j;
  j["variable"] = x_name_of(spec);
  j["points"] = spec.grid.size();
  j["x_min"] = spec.grid.front();
  j["x_max"] = spec.grid.back();
  j["rabi_rate_rad_s"] = spec.rabi_rate_rad_s;
  j["ramsey_wait_us"] = spec.ramsey_wait_us;
  j["pulse_detuning_rad_s"] = spec.pulse_detuning_rad_s;
  j["destruction_lambda"] = spec.destruction_lambda;
  j["hold_time_s"] = spec.hold_time_s;
  j["prep_error"] = spec.prep_error;
  j["mode"] = to_string(spec.mode);
  j["fidelity"] = fidelity;
  return j;
}

ordered_json meta_json(const std::string& command, const RunConfig& config) {
  ordered_json j;
  j["tool"] = "spinpair";
  j["version"] = std::string(kVersion);
  j["command"] = command;
  j["config"] = config_to_json(config);
  return j;
}

std::string resolve_out(const std::string& out_flag, const RunConfig& config,
                        const char* default_name) {
  if (!out_flag.empty()) {
    return out_flag;
  }
  return (std::filesystem::path(config.output.directory) / default_name).string();
}

// Flags shared by the scan-shaped commands.
struct ScanFlags {
  double tau_min_us = 0.0;
  double tau_max_us = 0.0;
  double area_min_rad = 0.0;
  double area_max_rad = 0.0;
  bool use_area = false;
  double delta_min_khz = 0.0;
  double delta_max_khz = 0.0;
  int points = 0;
  double fidelity = -1.0;       // <0: take the config value
  double destroy = -1.0;        // <0: take the config value
  double wait_us = -1.0;        // <0: take the config value
  double detuning_khz = 0.0;    // detuning inside plain pulses
  std::string mode;             // empty: take the config value
};

void add_pulse_geometry(CLI::App* cmd, ScanFlags& flags, bool required) {
  auto* duration = cmd->add_option_group("duration", "pulse-length axis");
  auto* tau = duration->add_option("--tau-max-us", flags.tau_max_us,
                                   "last pulse duration on the grid, microseconds");
  auto* area = duration->add_option("--area-max-rad", flags.area_max_rad,
                                    "last resonant pulse area on the grid, radians");
  if (required) {
    duration->require_option(1);
  } else {
    duration->require_option(0, 1);
  }
  tau->excludes(area);
  cmd->add_option("--tau-min-us", flags.tau_min_us, "first pulse duration, microseconds")
      ->needs(tau);
  cmd->add_option("--area-min-rad", flags.area_min_rad, "first pulse area, radians")
      ->needs(area);
  cmd->add_option("--detuning-khz", flags.detuning_khz, "Raman detuning inside the pulse, kHz");
}

void add_ramsey_geometry(CLI::App* cmd, ScanFlags& flags, bool required) {
  auto* lo = cmd->add_option("--delta-min-khz", flags.delta_min_khz,
                             "first Raman detuning on the grid, kHz");
  auto* hi = cmd->add_option("--delta-max-khz", flags.delta_max_khz,
                             "last Raman detuning on the grid, kHz");
  if (required) {
    lo->required();
    hi->required();
  }
  cmd->add_option("--wait-us", flags.wait_us, "Ramsey wait time, microseconds");
}

void add_model_flags(CLI::App* cmd, ScanFlags& flags) {
  cmd->add_option("--fidelity", flags.fidelity, "coherence fraction of the chi1 population")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--destroy", flags.destroy, "parity-dephasing strength applied before pulses")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--mode", flags.mode, "pulse evaluation mode")
      ->check(CLI::IsMember({"ideal", "full"}));
}

ScanSpec build_scan_spec(const RunConfig& config, const ScanFlags& flags, ScanVariable variable) {
  ScanSpec spec;
  spec.variable = variable;
  spec.rabi_rate_rad_s = config.pulse.rabi_rate_rad_s;
  spec.ramsey_wait_us = flags.wait_us >= 0.0 ? flags.wait_us : config.protocol.ramsey_wait_us;
  spec.destruction_lambda =
      flags.destroy >= 0.0 ? flags.destroy : config.protocol.destruction_lambda;
  spec.hold_time_s = config.preparation.hold_time_s;
  spec.prep_error = config.preparation.prep_error;
  spec.mode = flags.mode.empty() ? config.pulse.mode : pulse_mode_from_string(flags.mode);
  if (variable == ScanVariable::pulse_duration_us) {
    spec.pulse_detuning_rad_s = flags.detuning_khz * 1e3 * 2.0 * std::numbers::pi;
    if (flags.use_area) {
      // Areas are resonant areas; the grid is still stored as durations.
      const double to_us = 1e6 / config.pulse.rabi_rate_rad_s;
      spec.grid = linear_grid(flags.area_min_rad * to_us, flags.area_max_rad * to_us,
                              flags.points);
    } else {
      spec.grid = linear_grid(flags.tau_min_us, flags.tau_max_us, flags.points);
    }
  } else {
    spec.grid = linear_grid(flags.delta_min_khz, flags.delta_max_khz, flags.points);
  }
  spec.validate();
  return spec;
}

double resolve_fidelity(const RunConfig& config, const ScanFlags& flags) {
  return flags.fidelity >= 0.0 ? flags.fidelity : config.rates.coherence_fraction;
}

ScanVariable variable_from_name(const std::string& name) {
  if (name == "tau_us") return ScanVariable::pulse_duration_us;
  if (name == "delta_khz") return ScanVariable::detuning_khz;
  throw std::runtime_error("data file does not declare a known x axis (\"# x: tau_us\" or "
                           "\"# x: delta_khz\")");
}

int run_pulse_scan(const std::string& config_path, const ScanFlags& flags,
                   const std::string& out_flag) {
  const RunConfig config = load_config(config_path);
  const ScanSpec spec = build_scan_spec(config, flags, ScanVariable::pulse_duration_us);
  const double fidelity = resolve_fidelity(config, flags);
  const auto curve = model_curves(spec, config.rates, config.detection, fidelity);

  ordered_json meta = meta_json("pulse-scan", config);
  meta["scan"] = scan_to_json(spec, fidelity);
  const std::string out = resolve_out(out_flag, config, "pulse_scan.csv");
  write_file_atomic(out, model_curve_csv(x_name_of(spec), spec.grid, curve,
                                         {"spinpair pulse-scan", "meta: " + meta.dump()}));
  return 0;
}

int run_ramsey_scan(const std::string& config_path, const ScanFlags& flags,
                    const std::string& out_flag, const std::string& input) {
  const RunConfig config = load_config(config_path);
  const ScanSpec spec = build_scan_spec(config, flags, ScanVariable::detuning_khz);
  const double fidelity = resolve_fidelity(config, flags);

  std::vector<OutcomeDistribution> curve;
  if (input == "single-atom") {
    // One atom prepared in |1>, pushed through the same sequence and
    // detection stages; P1 is the transfer probability when detection is
    // ideal.
    LevelDistribution levels = LevelDistribution::Zero();
    levels(level_index(1)) = 1.0;
    curve.reserve(spec.grid.size());
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
      ScanSpec point = spec;
      point.grid = {spec.grid[i]};
      const double transfer = single_atom_transfer_curve(point)[0];
      LevelDistribution after = LevelDistribution::Zero();
      after(level_index(-1)) = transfer;
      after(level_index(1)) = 1.0 - transfer;
      const auto [p0, p1] = single_atom_outcome(after, config.detection);
      curve.push_back(OutcomeDistribution{p0, p1, 0.0});
    }
  } else {
    curve = model_curves(spec, config.rates, config.detection, fidelity);
  }

  ordered_json meta = meta_json("ramsey-scan", config);
  meta["scan"] = scan_to_json(spec, fidelity);
  meta["input"] = input;
  const std::string out = resolve_out(out_flag, config, "ramsey_scan.csv");
  write_file_atomic(out, model_curve_csv(x_name_of(spec), spec.grid, curve,
                                         {"spinpair ramsey-scan", "meta: " + meta.dump()}));
  return 0;
}

int run_sample(const std::string& config_path, const ScanFlags& flags,
               const std::string& out_flag, const std::string& scan_kind,
               std::int64_t shots, std::uint64_t seed) {
  const RunConfig config = load_config(config_path);
  const ScanVariable variable = scan_kind == "ramsey" ? ScanVariable::detuning_khz
                                                      : ScanVariable::pulse_duration_us;
  const ScanSpec spec = build_scan_spec(config, flags, variable);
  const double fidelity = resolve_fidelity(config, flags);
  const auto curve = model_curves(spec, config.rates, config.detection, fidelity);

  CountData data;
  data.x = spec.grid;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const OutcomeCounts counts = sample_outcomes(curve[i], shots, mix_seed(seed, i));
    data.shots.push_back(static_cast<double>(shots));
    data.n0.push_back(static_cast<double>(counts.n0));
    data.n1.push_back(static_cast<double>(counts.n1));
    data.n2.push_back(static_cast<double>(counts.n2));
  }

  ordered_json meta = meta_json("sample", config);
  meta["scan"] = scan_to_json(spec, fidelity);
  meta["shots"] = shots;
  meta["seed"] = seed;
  const std::string out = resolve_out(out_flag, config, "sample.csv");
  write_file_atomic(out, count_data_csv(x_name_of(spec), data,
                                        {"spinpair sample", "meta: " + meta.dump()}));
  return 0;
}

int run_fit_fidelity(const std::string& config_path, const std::string& data_path,
                     const std::string& grid_text, const ScanFlags& flags,
                     const std::string& out_flag) {
  const RunConfig config = load_config(config_path);
  const ParsedCountData parsed = read_count_data_csv(data_path);
  if (parsed.x_name.empty()) {
    throw std::runtime_error(data_path + ": missing \"# x: ...\" axis declaration");
  }
  ScanFlags scan_flags = flags;
  scan_flags.points = 2;  // placeholder; the data grid replaces it below
  scan_flags.tau_max_us = 1.0;
  scan_flags.delta_min_khz = 0.0;
  scan_flags.delta_max_khz = 1.0;
  ScanSpec spec = build_scan_spec(config, scan_flags, variable_from_name(parsed.x_name));
  spec.grid = parsed.data.x;
  spec.validate();

  const std::vector<double> f_grid = parse_grid_spec(grid_text);
  const FidelityEstimate estimate =
      fit_fidelity(parsed.data, spec, config.rates, config.detection, f_grid);

  ordered_json doc = meta_json("fit-fidelity", config);
  doc["scan"] = scan_to_json(spec, 1.0);
  doc["scan"].erase("fidelity");
  doc["data"] = data_path;
  doc["f_grid"] = grid_text;
  ordered_json result;
  result["best_f"] = estimate.best_f;
  result["chi2_min"] = estimate.chi2_min;
  result["dof"] = estimate.dof;
  result["interval68"] = {estimate.lower68, estimate.upper68};
  ordered_json profile = ordered_json::array();
  for (std::size_t i = 0; i < estimate.f_grid.size(); ++i) {
    profile.push_back({estimate.f_grid[i], estimate.chi2_profile[i]});
  }
  result["profile"] = std::move(profile);
  doc["result"] = std::move(result);

  const std::string out = resolve_out(out_flag, config, "fit_fidelity.json");
  write_file_atomic(out, doc.dump(2) + "\n");
  return 0;
}

int run_fit_fringe(const std::string& config_path, const std::string& data_path, int channel,
                   double frequency_guess, double period_guess, const std::string& out_flag) {
  const RunConfig config = load_config(config_path);
  const ParsedCountData parsed = read_count_data_csv(data_path);
  if (period_guess > 0.0) {
    frequency_guess = 1.0 / period_guess;
  }
  const FringeFit fit = fit_fringe(parsed.data, channel, frequency_guess);

  ordered_json doc = meta_json("fit-fringe", config);
  doc["data"] = data_path;
  doc["channel"] = channel;
  doc["frequency_guess"] = frequency_guess;
  ordered_json result;
  result["converged"] = fit.converged;
  result["frequency_identifiable"] = fit.frequency_identifiable;
  result["offset"] = fit.offset;
  result["contrast"] = fit.contrast;
  result["frequency_per_x"] = fit.frequency;
  result["fringe_spacing_x"] = fit.frequency > 0.0 ? 1.0 / fit.frequency : 0.0;
  result["phase_rad"] = fit.phase;
  result["rss"] = fit.rss;
  result["diagnostic"] = fit.diagnostic;
  doc["result"] = std::move(result);

  const std::string out = resolve_out(out_flag, config, "fit_fringe.json");
  write_file_atomic(out, doc.dump(2) + "\n");
  return 0;
}

}  // namespace

int run_command(std::vector<std::string> args) {
  CLI::App app{"two-atom spin-collision simulator and inference toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string data_path;
  ScanFlags flags;
  std::string input = "pair";
  std::string scan_kind = "pulse";
  std::string grid_text = "0:0.01:1";
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
  int channel = 1;
  double frequency_guess = 0.0;
  double period_guess = 0.0;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration")
        ->envname("SPINPAIR_CONFIG")
        ->required();
  };
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "output path (default: config output directory)");
  };

  CLI::App* pulse_scan =
      app.add_subcommand("pulse-scan", "model outcome curves over a pulse-duration grid");
  add_config(pulse_scan);
  add_out(pulse_scan);
  add_pulse_geometry(pulse_scan, flags, true);
  add_model_flags(pulse_scan, flags);
  pulse_scan->add_option("--points", flags.points, "grid size")->required();

  CLI::App* ramsey_scan =
      app.add_subcommand("ramsey-scan", "model outcome curves over a Ramsey detuning grid");
  add_config(ramsey_scan);
  add_out(ramsey_scan);
  add_ramsey_geometry(ramsey_scan, flags, true);
  add_model_flags(ramsey_scan, flags);
  ramsey_scan->add_option("--points", flags.points, "grid size")->required();
  ramsey_scan->add_option("--input", input, "pair pipeline or a lone atom prepared in |1>")
      ->check(CLI::IsMember({"pair", "single-atom"}));

  CLI::App* sample =
      app.add_subcommand("sample", "draw multinomial counts from a model scan");
  add_config(sample);
  add_out(sample);
  sample->add_option("--scan", scan_kind, "scan family")
      ->check(CLI::IsMember({"pulse", "ramsey"}));
  add_pulse_geometry(sample, flags, false);
  add_ramsey_geometry(sample, flags, false);
  add_model_flags(sample, flags);
  sample->add_option("--points", flags.points, "grid size")->required();
  sample->add_option("--shots", shots, "shots per grid point")
      ->required()
      ->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed, "sampler seed (required: runs must be reproducible)")
      ->required();

  CLI::App* fit_fid = app.add_subcommand("fit-fidelity",
                                         "profile the 2-atom-channel chi-squared over f");
  add_config(fit_fid);
  add_out(fit_fid);
  fit_fid->add_option("--data", data_path, "measured counts CSV")->required();
  fit_fid->add_option("--grid", grid_text, "f grid as start:step:stop")
      ->capture_default_str();
  fit_fid->add_option("--wait-us", flags.wait_us, "Ramsey wait override, microseconds");
  fit_fid->add_option("--destroy", flags.destroy, "destruction strength override")
      ->check(CLI::Range(0.0, 1.0));
  fit_fid->add_option("--mode", flags.mode, "pulse evaluation mode override")
      ->check(CLI::IsMember({"ideal", "full"}));

  CLI::App* fit_fr = app.add_subcommand("fit-fringe", "fit offset + contrast * cos to a channel");
  add_config(fit_fr);
  add_out(fit_fr);
  fit_fr->add_option("--data", data_path, "measured counts CSV")->required();
  fit_fr->add_option("--channel", channel, "remaining-atom channel to fit")
      ->check(CLI::Range(0, 2))
      ->capture_default_str();
  auto* fguess = fit_fr->add_option("--frequency-guess", frequency_guess,
                                    "initial fringe frequency, cycles per x unit");
  fit_fr->add_option("--period-guess", period_guess, "initial fringe period, x units")
      ->excludes(fguess);

  CLI::App* validate = app.add_subcommand("validate-config", "check a config file");
  add_config(validate);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) {
      return app.exit(err);  // --help / --version
    }
    std::cerr << "spinpair: usage error: " << single_line(err.what()) << "\n";
    return 2;
  }

  try {
    if (pulse_scan->parsed()) {
      flags.use_area = pulse_scan->count("--area-max-rad") > 0;
      return run_pulse_scan(config_path, flags, out_path);
    }
    if (ramsey_scan->parsed()) {
      return run_ramsey_scan(config_path, flags, out_path, input);
    }
    if (sample->parsed()) {
      if (scan_kind == "pulse" && sample->count("--tau-max-us") == 0 &&
          sample->count("--area-max-rad") == 0) {
        std::cerr << "spinpair: usage error: sample --scan pulse needs --tau-max-us or "
                     "--area-max-rad\n";
        return 2;
      }
      if (scan_kind == "ramsey" &&
          (sample->count("--delta-min-khz") == 0 || sample->count("--delta-max-khz") == 0)) {
        std::cerr << "spinpair: usage error: sample --scan ramsey needs --delta-min-khz and "
                     "--delta-max-khz\n";
        return 2;
      }
      flags.use_area = sample->count("--area-max-rad") > 0;
      return run_sample(config_path, flags, out_path, scan_kind, shots, seed);
    }
    if (fit_fid->parsed()) {
      return run_fit_fidelity(config_path, data_path, grid_text, flags, out_path);
    }
    if (fit_fr->parsed()) {
      return run_fit_fringe(config_path, data_path, channel, frequency_guess, period_guess,
                            out_path);
    }
    if (validate->parsed()) {
      load_config(config_path);
      std::cout << "ok\n";
      return 0;
    }
  } catch (const std::exception& err) {
    std::cerr << "spinpair: error: " << single_line(err.what()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace spinpair
