#include "vo2osc/devices.hpp"

#include <sstream>

namespace vo2osc {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

void validate(const SwitchParams& p, double ambient) {
    require(p.r_off > p.r_on && p.r_on > 0, "switch: need r_off > r_on > 0");
    require(p.v_th > p.v_h && p.v_h > 0, "switch: need v_th > v_h > 0");
    require(p.i_h > p.i_th && p.i_th > 0, "switch: need i_h > i_th > 0");
    require(p.v_th_dyn >= p.v_th && p.v_h_dyn <= p.v_h, "switch: dynamic window must enclose static window");
    require(p.t_th > ambient, "switch: t_th must exceed ambient");
    require(p.dt_hyst >= 0, "switch: dt_hyst must be non-negative");
    require(p.film_length > 0 && p.film_width > 0 && p.film_thickness > 0, "switch: film dimensions must be positive");
    require(p.activation_temperature >= 0, "switch: activation_temperature must be non-negative");
    require(p.film_volumetric_heat_capacity > 0, "switch: film_volumetric_heat_capacity must be positive");
    require(p.film_thermal_resistance > 0, "switch: film_thermal_resistance must be positive");
}

void validate(const MosfetParams& p) {
    require(p.v_t0 > 0, "mosfet: v_t0 must be positive");
    require(p.k_gain > 0, "mosfet: k_gain must be positive");
    require(p.r_series >= 0, "mosfet: r_series must be non-negative");
}

void validate(const SensorParams& p) {
    require(p.r_off_ref > 0, "sensor: r_off_ref must be positive");
    require(p.activation_temperature > 0, "sensor: activation_temperature must be positive");
    require(p.t_ref > 0, "sensor: t_ref must be positive");
}

std::vector<OperatingPoint> load_line_operating_points(const SwitchParams& p, double v_dd, double r_l) {
    if (!(r_l > 0)) throw ConfigError("load line: r_l must be positive");
    if (v_dd < 0) throw ConfigError("load line: v_dd must be non-negative");
    std::vector<OperatingPoint> pts;
    // (v_dd - V)/r_l = V/r  =>  V = v_dd r/(r + r_l)
    const double v_off = v_dd * p.r_off / (p.r_off + r_l);
    if (v_off <= p.v_th) pts.push_back({v_off, v_off / p.r_off, Branch::Off});
    const double v_on = v_dd * p.r_on / (p.r_on + r_l);
    const double i_on = v_on / p.r_on;
    if (i_on >= p.i_h) pts.push_back({v_on, i_on, Branch::On});
    return pts;
}

}  // namespace vo2osc
