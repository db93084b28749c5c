#include "vo2osc/circuit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace vo2osc {

Waveform Waveform::decimated(int factor) const {
    if (factor < 1) throw ConfigError("decimation factor must be >= 1");
    Waveform out;
    out.dt = dt * factor;
    out.warnings = warnings;
    for (std::size_t i = 0; i < samples.size(); i += std::size_t(factor)) out.samples.push_back(samples[i]);
    return out;
}

namespace {

double transconductance(double v_gs, double v_ds, const MosfetParams& p) {
    const double vov = v_gs - p.v_t0;
    if (vov <= 0) return 0.0;
    return v_ds < vov ? p.k_gain * v_ds : p.k_gain * vov;
}

struct Residual {
    Eigen::Vector2d r;
    Eigen::Vector2d scale;

    double relative() const { return (r.array().abs() / scale.array()).maxCoeff(); }
};

Residual network_residual(const NetworkSnapshot& n, double vg, double vd) {
    const double r_loop = n.r_switch + n.r_i + n.mosfet.r_series;
    const double i_b = (n.v_dd - vg) / n.r_b;
    const double i_s = vg / n.r_s;
    const double i_l = (n.v_dd - vd) / r_loop;
    const double i_d = mosfet_drain_current(vg, vd, n.mosfet);
    constexpr double tiny = 1e-300;
    Residual res;
    res.r << i_b - i_s, i_l - i_d;
    res.scale << std::abs(i_b) + std::abs(i_s) + tiny, std::abs(i_l) + std::abs(i_d) + tiny;
    return res;
}

}  // namespace

NetworkSolution newton_solve_network(const NetworkSnapshot& n, double vg, double vd, int max_iter) {
    if (!(std::isfinite(vg) && std::isfinite(vd))) throw SolverError("newton_solve_network: non-finite initial guess");
    const double r_loop = n.r_switch + n.r_i + n.mosfet.r_series;
    auto clamp = [&](double v) { return std::clamp(v, 0.0, n.v_dd); };
    vg = clamp(vg);
    vd = clamp(vd);
    constexpr double tol = 1e-9;
    auto converged = [&](const Residual& r) { return r.relative() < tol || r.r.cwiseAbs().maxCoeff() < 1e-20; };

    // The drain residual falls monotonically in vd, so [lo, hi] always brackets the
    // root; Newton steps that leave the bracket or fail to halve the residual
    // within a few step halvings fall back to bisection.
    double lo = 0.0, hi = n.v_dd;
    Residual res = network_residual(n, vg, vd);
    NetworkSolution sol;
    for (int it = 0; it <= max_iter; ++it) {
        sol.iterations = it;
        if (converged(res)) break;
        // Bracket collapsed to rounding level: the residual cannot drop further.
        if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() * n.v_dd) break;
        if (it == max_iter)
            throw SolverError("newton_solve_network: no convergence after " + std::to_string(max_iter) +
                              " iterations, residual " + std::to_string(res.relative()));
        Eigen::Matrix2d J;
        J << -1.0 / n.r_b - 1.0 / n.r_s, 0.0, -transconductance(vg, vd, n.mosfet),
            -1.0 / r_loop - mosfet_output_conductance(vg, vd, n.mosfet);
        const Eigen::Vector2d step = J.partialPivLu().solve(-res.r);
        const double merit = res.relative();
        bool accepted = false;
        double lambda = 1.0;
        for (int halve = 0; halve < 4 && !accepted; ++halve, lambda *= 0.5) {
            const double vg_t = clamp(vg + lambda * step(0));
            const double vd_t = clamp(vd + lambda * step(1));
            if (vd_t < lo || vd_t > hi) continue;
            Residual trial = network_residual(n, vg_t, vd_t);
            if (trial.relative() < 0.5 * merit) {
                vg = vg_t;
                vd = vd_t;
                res = trial;
                accepted = true;
            }
        }
        if (!accepted) {
            vg = clamp(vg + step(0));
            vd = 0.5 * (lo + hi);
            res = network_residual(n, vg, vd);
        }
        if (std::abs(res.r(0)) <= tol * res.scale(0)) {
            (res.r(1) > 0 ? lo : hi) = vd;
        } else {
            lo = 0.0;
            hi = n.v_dd;
        }
    }
    sol.v_gate = vg;
    sol.v_drain = vd;
    sol.i_loop = (n.v_dd - vd) / r_loop;
    sol.v_sw = sol.i_loop * n.r_switch;
    sol.residual = res.relative();
    if (res.r.cwiseAbs().maxCoeff() < 1e-20) sol.residual = 0.0;
    return sol;
}

PowerSplit power_split(const NetworkSnapshot& n, const NetworkSolution& s) {
    const double i = s.i_loop;
    return {n.v_dd * i, i * s.v_drain + i * i * n.mosfet.r_series, i * i * n.r_i, i * i * n.r_switch};
}

Waveform run_capacitor_oscillator(const CapacitorCircuitConfig& cfg, ThermalGrid<double>* grid, double t_end,
                                  double dt) {
    if (!(dt > 0) || !(t_end > 0)) throw ConfigError("capacitor oscillator: dt and t_end must be positive");
    if (!(cfg.c > 0)) throw ConfigError("capacitor oscillator: c must be positive");
    const bool physical = cfg.mode == SwitchMode::Physical;
    if (physical && !grid) throw ConfigError("capacitor oscillator: physical mode needs a thermal grid");
    const ThresholdMode tmode =
        cfg.mode == SwitchMode::BehavioralStatic ? ThresholdMode::Static : ThresholdMode::Dynamic;
    const double ta = grid ? grid->ambient : 293.0;

    Waveform w;
    w.dt = dt;
    const auto n_steps = static_cast<std::size_t>(std::llround(t_end / dt));
    w.samples.reserve(n_steps + 1);

    SwitchState st{Phase::Insulating, ta};
    FilmNode film{ta, cfg.sw.film_thermal_resistance, cfg.sw.film_heat_capacity()};
    double v = 0.0;
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double r = physical ? switch_resistance_physical(st, cfg.sw, ta)
                                  : switch_resistance_behavioral<double>(st, cfg.sw);
        const double t_sensor = grid ? probe_temperature(*grid, grid->footprint.sensor_cells) : ta;
        w.samples.push_back({double(k) * dt, v, v / r, 0.0, st.channel_temperature, t_sensor, st.phase});
        if (k == n_steps) break;

        // Exact exponential update with the resistance frozen over the step.
        const double v_inf = cfg.i_dd * r;
        const double v_next = v_inf + (v - v_inf) * std::exp(-dt / (r * cfg.c));
        if (physical) {
            const double p = 0.5 * (v * v + v_next * v_next) / r;
            try {
                const double t_fp = probe_temperature(*grid, grid->footprint.switch_cells);
                const double q = film.step(p, t_fp, dt);
                detail::step_thermal_signed(*grid, q, 0.0, dt);
            } catch (const std::exception& e) {
                throw SolverError("capacitor oscillator step " + std::to_string(k) + ": " + e.what());
            }
            st.channel_temperature = film.temperature;
            st = update_switch_phase_physical(st, cfg.sw);
        } else {
            st = update_switch_phase_behavioral(st, v_next, v_next / r, cfg.sw, tmode);
        }
        v = v_next;
        if (!std::isfinite(v)) throw SolverError("capacitor oscillator: non-finite voltage at step " + std::to_string(k));
    }
    return w;
}

Waveform run_capacitorless_oscillator(const CapacitorlessCircuitConfig& cfg, ThermalGrid<double>& grid,
                                      double t_end, double dt) {
    if (!(dt > 0) || !(t_end > 0)) throw ConfigError("capacitorless oscillator: dt and t_end must be positive");
    if (!(cfg.v_dd > 0 && cfg.r_b > 0 && cfg.r_i > 0)) throw ConfigError("capacitorless oscillator: v_dd, r_b, r_i must be positive");
    check_rect(grid, grid.footprint.switch_cells);
    check_rect(grid, grid.footprint.sensor_cells);
    if (grid.footprint.switch_cells.overlaps(grid.footprint.sensor_cells))
        throw ConfigError("capacitorless oscillator: switch and sensor footprints overlap");
    if (!(dt <= grid.stable_dt()))
        throw SolverError("capacitorless oscillator: dt exceeds the explicit stability bound " +
                          std::to_string(grid.stable_dt()));

    const double ta = grid.ambient;
    Waveform w;
    w.dt = dt;
    const double rs0 = sensor_resistance(ta, cfg.sensor);
    if (cfg.v_dd * rs0 / (cfg.r_b + rs0) <= cfg.mosfet.v_t0)
        w.warnings.push_back("divider holds the gate below v_t0 at ambient; transistor never opens");

    const auto n_steps = static_cast<std::size_t>(std::llround(t_end / dt));
    w.samples.reserve(n_steps + 1);

    SwitchState st{Phase::Insulating, probe_temperature(grid, grid.footprint.switch_cells)};
    FilmNode film{st.channel_temperature, cfg.sw.film_thermal_resistance, cfg.sw.film_heat_capacity()};
    NetworkSnapshot net{cfg.v_dd, cfg.r_b, rs0, cfg.sw.r_off, cfg.r_i, cfg.mosfet};
    double vg = cfg.v_dd * rs0 / (cfg.r_b + rs0), vd = 0.0;
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double t_sn = probe_temperature(grid, grid.footprint.sensor_cells);
        net.r_s = sensor_resistance(cfg.thermal_feedback ? t_sn : ta, cfg.sensor);
        net.r_switch = switch_resistance_physical(st, cfg.sw, ta);
        NetworkSolution sol;
        try {
            sol = newton_solve_network(net, vg, vd);
        } catch (const SolverError& e) {
            throw SolverError("capacitorless oscillator step " + std::to_string(k) + ": " + e.what());
        }
        vg = sol.v_gate;
        vd = sol.v_drain;
        const double i = sol.i_loop;
        w.samples.push_back({double(k) * dt, sol.v_sw, i, net.r_s, st.channel_temperature, t_sn, st.phase});
        if (k == n_steps) break;

        const double p_sw = i * i * net.r_switch;
        const double p_sn = cfg.sensor_self_heating ? vg * vg / net.r_s : 0.0;
        const double t_fp = probe_temperature(grid, grid.footprint.switch_cells);
        const double q = film.step(p_sw, t_fp, dt);
        detail::step_thermal_signed(grid, q, p_sn, dt);
        st.channel_temperature = film.temperature;
        st = update_switch_phase_physical(st, cfg.sw);
        if (!std::isfinite(film.temperature))
            throw SolverError("capacitorless oscillator: non-finite temperature at step " + std::to_string(k));
    }
    return w;
}

namespace {

// Peak of dT * R_ins(Ta + dT) over [0, dT_max]; the insulating steady state
// dT = r_total * V^2 / R_ins exists only while r_total * V^2 stays below it.
struct Peak {
    double dT;
    double g;
};

double insulating_r(const SwitchParams& sw, double ta, double dT) {
    SwitchState s{Phase::Insulating, ta + dT};
    return switch_resistance_physical(s, sw, ta);
}

Peak insulating_peak(const SwitchParams& sw, double ta) {
    const double dT_up = sw.t_th + 0.5 * sw.dt_hyst - ta;
    const double e = sw.activation_temperature;
    double dT = dT_up;
    // d/dT ln(dT R) = 0  <=>  dT^2 + (2 ta - e) dT + ta^2 = 0, smaller root is the maximum.
    const double b = e - 2.0 * ta;
    const double disc = b * b - 4.0 * ta * ta;
    if (b > 0 && disc >= 0) {
        const double root = 0.5 * (b - std::sqrt(disc));
        if (root < dT_up) dT = root;
    }
    return {dT, dT * insulating_r(sw, ta, dT)};
}

// Stable insulating rise at bias v, or a negative value if none exists below the transition.
double insulating_rise(const SwitchParams& sw, double ta, double r_total, double v, const Peak& pk) {
    const double target = r_total * v * v;
    if (target > pk.g) return -1.0;
    double lo = 0.0, hi = pk.dT;
    for (int i = 0; i < 200 && hi - lo > 1e-13 * (1.0 + hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid * insulating_r(sw, ta, mid) < target ? lo : hi) = mid;
    }
    const double dT = 0.5 * (lo + hi);
    return ta + dT >= sw.t_th + 0.5 * sw.dt_hyst ? -1.0 : dT;
}

}  // namespace

double runaway_voltage(const SwitchParams& sw, double ambient, double r_total) {
    return std::sqrt(insulating_peak(sw, ambient).g / r_total);
}

std::vector<IVPoint> quasi_static_iv_sweep(const SwitchParams& sw, const ThermalGrid<double>& grid, double v_max,
                                           int n_points) {
    if (!(v_max > 0)) throw ConfigError("iv sweep: v_max must be positive");
    if (n_points < 2) throw ConfigError("iv sweep: need at least two points");
    const double ta = grid.ambient;
    // The substrate is linear, so one steady solve at unit power gives the
    // footprint response for every bias; the film resistance adds in series.
    const double r_total = switch_thermal_resistance(grid) + sw.film_thermal_resistance;
    const Peak pk = insulating_peak(sw, ta);
    const double t_down = sw.t_th - 0.5 * sw.dt_hyst;

    std::vector<IVPoint> out;
    out.reserve(std::size_t(2 * n_points));
    Phase phase = Phase::Insulating;
    auto visit = [&](double v, int dir) {
        double t = ta;
        if (phase == Phase::Metallic) {
            t = ta + r_total * v * v / sw.r_on;
            if (t <= t_down) phase = Phase::Insulating;
        }
        if (phase == Phase::Insulating) {
            const double dT = insulating_rise(sw, ta, r_total, v, pk);
            if (dT < 0) {
                phase = Phase::Metallic;
                t = ta + r_total * v * v / sw.r_on;
            } else {
                t = ta + dT;
            }
        }
        const double r = phase == Phase::Metallic ? sw.r_on : insulating_r(sw, ta, t - ta);
        out.push_back({v, v / r, dir, phase, t});
    };
    for (int k = 0; k < n_points; ++k) visit(v_max * k / (n_points - 1), +1);
    for (int k = n_points - 1; k >= 0; --k) visit(v_max * k / (n_points - 1), -1);
    return out;
}

CalibrationResult calibrate_switch_thermal(const SwitchParams& sw, const ThermalGrid<double>& tmpl) {
    const double ta = tmpl.ambient;
    const Peak pk = insulating_peak(sw, ta);
    const double r_needed = pk.g / (sw.v_th * sw.v_th) - sw.film_thermal_resistance;

    ThermalGrid<double> g = tmpl;
    auto r_grid = [&](double log_h) {
        g.out_of_plane_loss = std::exp(log_h);
        return switch_thermal_resistance(g);
    };
    double a = std::log(1e2), b = std::log(1e13);
    double ra = r_grid(a), rb = r_grid(b);
    if (!(r_needed < ra && r_needed > rb)) {
        const double v_lo = runaway_voltage(sw, ta, ra + sw.film_thermal_resistance);
        const double v_hi = runaway_voltage(sw, ta, rb + sw.film_thermal_resistance);
        throw SolverError("calibration: target v_th=" + std::to_string(sw.v_th) + " outside achievable range [" +
                          std::to_string(v_lo) + ", " + std::to_string(v_hi) + "] V");
    }
    // Illinois false position on log(R_grid) versus log(h).
    double fa = std::log(ra / r_needed), fb = std::log(rb / r_needed);
    double c = a, rc = ra;
    for (int it = 0; it < 100; ++it) {
        c = b - fb * (b - a) / (fb - fa);
        rc = r_grid(c);
        const double fc = std::log(rc / r_needed);
        if (std::abs(fc) < 1e-10) break;
        if (fc * fb < 0) {
            a = b;
            fa = fb;
        } else {
            fa *= 0.5;
        }
        b = c;
        fb = fc;
    }
    CalibrationResult res;
    res.out_of_plane_loss = std::exp(c);
    res.effective_thickness = tmpl.effective_thickness;
    res.r_grid = rc;
    res.r_total = rc + sw.film_thermal_resistance;
    res.v_th = runaway_voltage(sw, ta, res.r_total);
    res.v_h = std::sqrt((sw.t_th - 0.5 * sw.dt_hyst - ta) * sw.r_on / res.r_total);
    return res;
}

}  // namespace vo2osc
