#include "spinpair/config.hpp"

#include <fstream>
#include <set>

namespace spinpair {

namespace {

using nlohmann::json;

class StrictSection {
 public:
  StrictSection(const json& doc, std::string name) : doc_(doc), name_(std::move(name)) {
    if (!doc_.is_object()) {
      throw ConfigError(name_ + ": must be a JSON object");
    }
  }

  double number(const char* key) {
    const json& value = fetch(key);
    if (!value.is_number()) {
      throw ConfigError(name_ + "." + key + ": must be a number");
    }
    return value.get<double>();
  }

  std::string text(const char* key) {
    const json& value = fetch(key);
    if (!value.is_string()) {
      throw ConfigError(name_ + "." + key + ": must be a string");
    }
    return value.get<std::string>();
  }

  std::array<double, 3> number_triple(const char* key) {
    const json& value = fetch(key);
    if (!value.is_array() || value.size() != 3) {
      throw ConfigError(name_ + "." + key + ": must be an array of 3 numbers");
    }
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
      if (!value[i].is_number()) {
        throw ConfigError(name_ + "." + key + ": must be an array of 3 numbers");
      }
      out[i] = value[i].get<double>();
    }
    return out;
  }

  void finish() const {
    for (const auto& item : doc_.items()) {
      if (!seen_.contains(item.key())) {
        throw ConfigError(name_ + "." + item.key() + ": unknown key");
      }
    }
  }

 private:
  const json& fetch(const char* key) {
    seen_.insert(key);
    if (!doc_.contains(key)) {
      throw ConfigError(name_ + "." + key + ": missing key");
    }
    return doc_.at(key);
  }

  const json& doc_;
  std::string name_;
  std::set<std::string> seen_;
};

const json& section(const json& doc, const char* name) {
  if (!doc.contains(name)) {
    throw ConfigError(std::string(name) + ": missing section");
  }
  return doc.at(name);
}

}  // namespace

void PreparationConfig::validate() const {
  if (!(prep_error >= 0.0 && prep_error <= 1.0)) {
    throw std::invalid_argument("preparation.prep_error: must lie in [0, 1]");
  }
  if (!(hold_time_s >= 0.0)) {
    throw std::invalid_argument("preparation.hold_time_s: must be nonnegative");
  }
}

void PulseConfig::validate() const {
  if (!(rabi_rate_rad_s > 0.0)) {
    throw std::invalid_argument("pulse.rabi_rate_rad_s: must be strictly positive");
  }
}

void ProtocolConfig::validate() const {
  if (!(destruction_lambda >= 0.0 && destruction_lambda <= 1.0)) {
    throw std::invalid_argument("protocol.destruction_lambda: must lie in [0, 1]");
  }
  if (!(ramsey_wait_us >= 0.0)) {
    throw std::invalid_argument("protocol.ramsey_wait_us: must be nonnegative");
  }
}

void RunConfig::validate() const {
  experiment.validate();
  rates.validate();
  preparation.validate();
  pulse.validate();
  protocol.validate();
  detection.validate();
}

std::string to_string(PulseMode mode) {
  return mode == PulseMode::ideal ? "ideal" : "full";
}

PulseMode pulse_mode_from_string(const std::string& name) {
  if (name == "ideal") return PulseMode::ideal;
  if (name == "full") return PulseMode::full;
  throw ConfigError("pulse.mode: must be \"ideal\" or \"full\"");
}

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) {
    throw ConfigError("config document must be a JSON object");
  }
  static const std::set<std::string> known_sections = {
      "experiment", "rates", "preparation", "pulse", "protocol", "detection", "output"};
  for (const auto& item : doc.items()) {
    if (!known_sections.contains(item.key())) {
      throw ConfigError(item.key() + ": unknown section");
    }
  }

  RunConfig config;

  {
    StrictSection s(section(doc, "experiment"), "experiment");
    config.experiment.temperature_uK = s.number("temperature_uK");
    config.experiment.trap_depth_h_MHz = s.number("trap_depth_h_MHz");
    config.experiment.trap_frequencies_rad_s = s.number_triple("trap_frequencies_rad_s");
    config.experiment.bias_field_G = s.number("bias_field_G");
    config.experiment.reduced_mass_kg = s.number("reduced_mass_kg");
    config.experiment.zeeman_splitting_kHz_per_mF = s.number("zeeman_splitting_kHz_per_mF");
    s.finish();
  }
  {
    StrictSection s(section(doc, "rates"), "rates");
    config.rates.rate_00_to_chi1 = s.number("rate_00_to_chi1_per_s");
    config.rates.rate_00_to_chi2 = s.number("rate_00_to_chi2_per_s");
    config.rates.rate_chi1_to_00 = s.number("rate_chi1_to_00_per_s");
    config.rates.rate_chi1_to_chi2 = s.number("rate_chi1_to_chi2_per_s");
    config.rates.rate_chi2_to_00 = s.number("rate_chi2_to_00_per_s");
    config.rates.rate_chi2_to_chi1 = s.number("rate_chi2_to_chi1_per_s");
    config.rates.coherence_fraction = s.number("coherence_fraction");
    s.finish();
  }
  {
    StrictSection s(section(doc, "preparation"), "preparation");
    config.preparation.prep_error = s.number("prep_error");
    config.preparation.hold_time_s = s.number("hold_time_s");
    s.finish();
  }
  {
    StrictSection s(section(doc, "pulse"), "pulse");
    config.pulse.rabi_rate_rad_s = s.number("rabi_rate_rad_s");
    config.pulse.mode = pulse_mode_from_string(s.text("mode"));
    s.finish();
  }
  {
    StrictSection s(section(doc, "protocol"), "protocol");
    config.protocol.destruction_lambda = s.number("destruction_lambda");
    config.protocol.ramsey_wait_us = s.number("ramsey_wait_us");
    s.finish();
  }
  {
    StrictSection s(section(doc, "detection"), "detection");
    config.detection.eject_efficiency = s.number("eject_efficiency");
    config.detection.bg_loss = s.number("bg_loss");
    config.detection.p_spont_emission = s.number("p_spontaneous_emission");
    config.detection.se_to_f3 = s.number("se_to_F3_branching");
    config.detection.p_inelastic = s.number("p_inelastic");
    s.finish();
  }
  if (doc.contains("output")) {
    StrictSection s(doc.at("output"), "output");
    config.output.directory = s.text("directory");
    s.finish();
  }

  try {
    config.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  return config;
}

nlohmann::ordered_json config_to_json(const RunConfig& config) {
  nlohmann::ordered_json doc;
  doc["experiment"] = {
      {"temperature_uK", config.experiment.temperature_uK},
      {"trap_depth_h_MHz", config.experiment.trap_depth_h_MHz},
      {"trap_frequencies_rad_s", config.experiment.trap_frequencies_rad_s},
      {"bias_field_G", config.experiment.bias_field_G},
      {"reduced_mass_kg", config.experiment.reduced_mass_kg},
      {"zeeman_splitting_kHz_per_mF", config.experiment.zeeman_splitting_kHz_per_mF},
  };
  doc["rates"] = {
      {"rate_00_to_chi1_per_s", config.rates.rate_00_to_chi1},
      {"rate_00_to_chi2_per_s", config.rates.rate_00_to_chi2},
      {"rate_chi1_to_00_per_s", config.rates.rate_chi1_to_00},
      {"rate_chi1_to_chi2_per_s", config.rates.rate_chi1_to_chi2},
      {"rate_chi2_to_00_per_s", config.rates.rate_chi2_to_00},
      {"rate_chi2_to_chi1_per_s", config.rates.rate_chi2_to_chi1},
      {"coherence_fraction", config.rates.coherence_fraction},
  };
  doc["preparation"] = {
      {"prep_error", config.preparation.prep_error},
      {"hold_time_s", config.preparation.hold_time_s},
  };
  doc["pulse"] = {
      {"rabi_rate_rad_s", config.pulse.rabi_rate_rad_s},
      {"mode", to_string(config.pulse.mode)},
  };
  doc["protocol"] = {
      {"destruction_lambda", config.protocol.destruction_lambda},
      {"ramsey_wait_us", config.protocol.ramsey_wait_us},
  };
  doc["detection"] = {
      {"eject_efficiency", config.detection.eject_efficiency},
      {"bg_loss", config.detection.bg_loss},
      {"p_spontaneous_emission", config.detection.p_spont_emission},
      {"se_to_F3_branching", config.detection.se_to_f3},
      {"p_inelastic", config.detection.p_inelastic},
  };
  doc["output"] = {{"directory", config.output.directory}};
  return doc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config parse error: ") + err.what());
  }
  return config_from_json(doc);
}

}  // namespace spinpair
