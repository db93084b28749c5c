#pragma once

#include <string>
#include <vector>

#include "vo2osc/devices.hpp"
#include "vo2osc/thermal.hpp"

namespace vo2osc {

enum class SwitchMode { BehavioralStatic, BehavioralDynamic, Physical };

struct CapacitorCircuitConfig {
    double i_dd = 6e-4;
    double c = 1e-11;
    SwitchParams sw;
    SwitchMode mode = SwitchMode::BehavioralDynamic;
};

/// Supply -> switch -> R_i -> MOSFET drain, source grounded. The gate sits on the
/// divider R_B (to the supply) over the sensor R_s (to ground).
struct CapacitorlessCircuitConfig {
    double v_dd = 5.0;
    double r_b = 60e3;
    double r_i = 200.0;
    MosfetParams mosfet;
    SwitchParams sw;
    SensorParams sensor;
    bool thermal_feedback = true;      ///< false pins the sensor at ambient
    bool sensor_self_heating = false;  ///< inject divider Joule power into the sensor footprint
};

struct WaveSample {
    double t;
    double v_sw;
    double i_sw;
    double r_s;
    double t_switch;
    double t_sensor;
    Phase phase;
};

struct Waveform {
    std::vector<WaveSample> samples;
    double dt = 0.0;
    std::vector<std::string> warnings;

    std::size_t size() const { return samples.size(); }
    /// Keep every `factor`-th sample.
    Waveform decimated(int factor) const;
};

/// Instantaneous state of the capacitorless network with device values frozen.
struct NetworkSnapshot {
    double v_dd = 5.0;
    double r_b = 60e3;
    double r_s = 56e3;
    double r_switch = 56e3;
    double r_i = 200.0;
    MosfetParams mosfet;
};

struct NetworkSolution {
    double v_gate = 0.0;
    double v_drain = 0.0;  ///< intrinsic drain, behind the series resistance
    double i_loop = 0.0;
    double v_sw = 0.0;
    int iterations = 0;
    double residual = 0.0;  ///< largest KCL residual relative to its node's current scale
};

/// Damped Newton on the gate and drain KCL equations with step halving on residual increase.
NetworkSolution newton_solve_network(const NetworkSnapshot& net, double v_gate0, double v_drain0,
                                     int max_iter = 200);

struct PowerSplit {
    double source, mosfet, r_i, sw;
};

PowerSplit power_split(const NetworkSnapshot& net, const NetworkSolution& sol);

/// Lumped film node on top of the substrate grid: channel temperature relaxes to the
/// footprint mean through film_thermal_resistance.
struct FilmNode {
    double temperature;
    double resistance;
    double capacity;

    /// Advances by dt under Joule power `p`; returns the heat passed into the substrate.
    double step(double p, double substrate_t, double dt) {
        const double q = (temperature - substrate_t) / resistance;
        temperature += dt / capacity * (p - q);
        return q;
    }
};

Waveform run_capacitor_oscillator(const CapacitorCircuitConfig& cfg, ThermalGrid<double>* grid, double t_end,
                                  double dt);

Waveform run_capacitorless_oscillator(const CapacitorlessCircuitConfig& cfg, ThermalGrid<double>& grid,
                                      double t_end, double dt);

struct IVPoint {
    double v_sw;
    double i_sw;
    int direction;  ///< +1 up-sweep, -1 down-sweep
    Phase phase;
    double t_switch;
};

/// Bias at which the insulating branch loses its steady state for a total
/// switch-to-ambient thermal resistance `r_total`.
double runaway_voltage(const SwitchParams& sw, double ambient, double r_total);

/// Up then down voltage sweep through self-consistent steady states, phase carried
/// between bias points.
std::vector<IVPoint> quasi_static_iv_sweep(const SwitchParams& sw, const ThermalGrid<double>& grid, double v_max,
                                           int n_points);

struct CalibrationResult {
    double out_of_plane_loss;
    double effective_thickness;
    double r_grid;   ///< footprint-mean rise per watt from the substrate
    double r_total;  ///< including the film resistance
    double v_th;     ///< transition voltage achieved
    double v_h;      ///< hold voltage implied by the calibrated thermal path
};

/// Root-find on the out-of-plane loss so the quasi-static up-transition lands on sw.v_th.
CalibrationResult calibrate_switch_thermal(const SwitchParams& sw, const ThermalGrid<double>& grid_template);

}  // namespace vo2osc
