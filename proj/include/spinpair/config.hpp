#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "spinpair/collisions.hpp"
#include "spinpair/detection.hpp"
#include "spinpair/pulses.hpp"
#include "spinpair/types.hpp"

namespace spinpair {

struct PreparationConfig {
  double prep_error = 0.07;
  double hold_time_s = 0.1;

  void validate() const;
};

struct PulseConfig {
  double rabi_rate_rad_s = 78539.81633974483;  // 2*pi * 12.5 kHz
  PulseMode mode = PulseMode::ideal;

  void validate() const;
};

struct ProtocolConfig {
  double destruction_lambda = 0.0;
  double ramsey_wait_us = 5.0;

  void validate() const;
};

struct OutputConfig {
  std::string directory = ".";
};

/// One strict-schema JSON document; unknown keys are rejected.
struct RunConfig {
  ExperimentContext experiment;
  RateConfig rates;
  PreparationConfig preparation;
  PulseConfig pulse;
  ProtocolConfig protocol;
  DetectionParams detection;
  OutputConfig output;

  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string to_string(PulseMode mode);
PulseMode pulse_mode_from_string(const std::string& name);

RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::ordered_json config_to_json(const RunConfig& config);

/// Parse and validate; throws ConfigError naming the offending key.
RunConfig load_config(const std::string& path);

}  // namespace spinpair
