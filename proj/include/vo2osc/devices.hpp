#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "vo2osc/errors.hpp"

namespace vo2osc {

enum class Phase { Insulating, Metallic };
enum class ThresholdMode { Static, Dynamic };

inline const char* phase_name(Phase p) { return p == Phase::Metallic ? "metallic" : "insulating"; }

/// Electrical and thermal description of the VO2 threshold switch.
struct SwitchParams {
    double r_off = 56e3;
    double r_on = 620.0;
    double v_th = 4.7;
    double i_th = 1.2e-4;
    double v_h = 1.2;
    double i_h = 1.5e-3;
    double v_th_dyn = 5.0;
    double v_h_dyn = 0.5;
    double t_th = 340.0;
    double dt_hyst = 4.0;
    double film_length = 1e-6;
    double film_width = 1e-6;
    double film_thickness = 100e-9;

    // Physical-mode extras: Arrhenius slope of the insulating branch, lumped film
    // heat capacity per volume, and film-to-substrate thermal resistance.
    double activation_temperature = 1500.0;
    double film_volumetric_heat_capacity = 3.0e6;
    double film_thermal_resistance = 4.698e4;

    double film_heat_capacity() const {
        return film_volumetric_heat_capacity * film_length * film_width * film_thickness;
    }
};

struct SwitchState {
    Phase phase = Phase::Insulating;
    double channel_temperature = 293.0;
};

struct MosfetParams {
    double v_t0 = 2.1;
    double k_gain = 50.0;  // hard switch: fully on or off across the gate swing
    double r_series = 0.0;
};

struct SensorParams {
    double r_off_ref = 56e3;
    double activation_temperature = 4500.0;
    double t_ref = 293.0;
};

void validate(const SwitchParams& p, double ambient);
void validate(const MosfetParams& p);
void validate(const SensorParams& p);

template <typename Scalar>
Scalar switch_resistance_behavioral(const SwitchState& s, const SwitchParams& p) {
    return s.phase == Phase::Metallic ? Scalar(p.r_on) : Scalar(p.r_off);
}

/// Insulating resistance follows an Arrhenius law referenced to `t_ref`, so the
/// switch runs away thermally once Joule heating outpaces conduction.
template <typename Scalar>
Scalar switch_resistance_physical(const SwitchState& s, const SwitchParams& p, Scalar t_ref) {
    if (s.phase == Phase::Metallic) return Scalar(p.r_on);
    using std::exp;
    return Scalar(p.r_off) *
           exp(Scalar(p.activation_temperature) * (Scalar(1) / Scalar(s.channel_temperature) - Scalar(1) / t_ref));
}

template <typename Scalar>
SwitchState update_switch_phase_behavioral(SwitchState s, Scalar v_sw, Scalar /*i_sw*/, const SwitchParams& p,
                                           ThresholdMode mode) {
    const Scalar on = mode == ThresholdMode::Static ? Scalar(p.v_th) : Scalar(p.v_th_dyn);
    const Scalar off = mode == ThresholdMode::Static ? Scalar(p.v_h) : Scalar(p.v_h_dyn);
    if (s.phase == Phase::Insulating && v_sw >= on)
        s.phase = Phase::Metallic;
    else if (s.phase == Phase::Metallic && v_sw <= off)
        s.phase = Phase::Insulating;
    return s;
}

inline SwitchState update_switch_phase_physical(SwitchState s, const SwitchParams& p) {
    const double up = p.t_th + 0.5 * p.dt_hyst;
    const double down = p.t_th - 0.5 * p.dt_hyst;
    if (s.phase == Phase::Insulating && s.channel_temperature >= up)
        s.phase = Phase::Metallic;
    else if (s.phase == Phase::Metallic && s.channel_temperature <= down)
        s.phase = Phase::Insulating;
    return s;
}

template <typename Scalar>
Scalar sensor_resistance(Scalar t_sensor, const SensorParams& p) {
    if (!(t_sensor > Scalar(0))) throw std::invalid_argument("sensor temperature must be positive");
    using std::exp;
    return Scalar(p.r_off_ref) *
           exp(Scalar(p.activation_temperature) * (Scalar(1) / t_sensor - Scalar(1) / Scalar(p.t_ref)));
}

/// Activation temperature that scales the sensor resistance by `ratio` over a rise `dT` from `t_ref`.
inline double sensor_activation_for_ratio(double t_ref, double dT, double ratio) {
    return std::log(ratio) / (1.0 / (t_ref + dT) - 1.0 / t_ref);
}

/// Square-law drain current for forward conduction (v_ds >= 0).
template <typename Scalar>
Scalar mosfet_drain_current(Scalar v_gs, Scalar v_ds, const MosfetParams& p) {
    if (v_ds < Scalar(0)) throw std::invalid_argument("mosfet_drain_current: v_ds must be non-negative");
    const Scalar vov = v_gs - Scalar(p.v_t0);
    if (vov <= Scalar(0)) return Scalar(0);
    const Scalar k = Scalar(p.k_gain);
    if (v_ds < vov) return k * (vov * v_ds - v_ds * v_ds / Scalar(2));
    return k / Scalar(2) * vov * vov;
}

/// d(I_d)/d(v_ds); zero in cutoff and saturation.
template <typename Scalar>
Scalar mosfet_output_conductance(Scalar v_gs, Scalar v_ds, const MosfetParams& p) {
    const Scalar vov = v_gs - Scalar(p.v_t0);
    if (vov <= Scalar(0) || v_ds >= vov) return Scalar(0);
    return Scalar(p.k_gain) * (vov - v_ds);
}

enum class Branch { Off, On };

inline const char* branch_name(Branch b) { return b == Branch::On ? "on" : "off"; }

struct OperatingPoint {
    double v_sw;
    double i_sw;
    Branch branch;
};

/// Intersections of the load line I = (v_dd - V)/r_l with the piecewise-linear
/// switch characteristic. An empty result marks the NDR gap.
std::vector<OperatingPoint> load_line_operating_points(const SwitchParams& p, double v_dd, double r_l);

}  // namespace vo2osc
