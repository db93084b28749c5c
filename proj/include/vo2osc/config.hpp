#pragma once

#include <string>
#include <vector>

#include "vo2osc/analysis.hpp"
#include "vo2osc/circuit.hpp"
#include "vo2osc/devices.hpp"
#include "vo2osc/thermal.hpp"

namespace vo2osc {

struct ThermalSection {
    int nx = 160;
    int ny = 160;
    double dx = 50e-9;
    double dy = 50e-9;
    double thickness = 0.4e-6;
    double ambient = 293.0;
    double out_of_plane_loss = 1.2e7;
    MaterialProps material;
    Boundary boundary = Boundary::FixedAmbient;
};

struct CapSection {
    double i_dd = 6e-4;
    double c = 1e-11;
    SwitchMode mode = SwitchMode::BehavioralDynamic;
};

struct NocapSection {
    double v_dd = 5.0;
    double r_b = 60e3;
    double r_i = 200.0;
    double d = 200e-9;
    bool thermal_feedback = true;
    bool sensor_self_heating = false;
};

struct SimSection {
    double dt = 0.05e-9;
    double t_end = 3.0e-6;
    bool deterministic = true;
    double i_on_threshold = 0.0;
};

struct IvSection {
    double v_max = 5.0;
    int n_points = 1001;
};

struct OutputSection {
    int decimation = 1;
    bool svg = true;
    bool snapshot = false;
};

/// Full experiment description; every field has a default and a `section.key` name.
struct RunConfig {
    SwitchParams sw;
    SensorParams sensor;
    MosfetParams mosfet;
    ThermalSection thermal;
    CapSection circuit_cap;
    NocapSection circuit_nocap;
    SimSection sim;
    IvSection iv;
    OutputSection output;
};

/// All recognised keys in dump order.
std::vector<std::string> config_keys();

/// Sets one field from text; unknown keys and unparsable values raise ConfigError naming the key.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);

/// Applies `section.key = value` lines (# comments, blank lines allowed) on top of `cfg`.
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin = "<config>");
void apply_config_file(RunConfig& cfg, const std::string& path);
/// Applies a single `section.key=value` override.
void apply_override(RunConfig& cfg, const std::string& assignment);

std::string dump_config(const RunConfig& cfg);

/// Cross-field checks; raises ConfigError.
void validate(const RunConfig& cfg);

ThermalGrid<double> make_grid(const RunConfig& cfg);
CapacitorCircuitConfig make_cap_circuit(const RunConfig& cfg);
CapacitorlessCircuitConfig make_nocap_circuit(const RunConfig& cfg);
NocapScenario make_nocap_scenario(const RunConfig& cfg);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace vo2osc
