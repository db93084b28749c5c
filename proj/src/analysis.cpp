#include "vo2osc/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace vo2osc {

PeriodStats extract_period_stats(const Waveform& w, double thr) {
    const auto& s = w.samples;
    if (s.size() < 2) throw std::invalid_argument("extract_period_stats: waveform too short");
    auto [lo, hi] = std::minmax_element(s.begin(), s.end(),
                                        [](const WaveSample& a, const WaveSample& b) { return a.i_sw < b.i_sw; });
    if (!(thr >= lo->i_sw && thr <= hi->i_sw))
        throw std::domain_error("extract_period_stats: threshold " + std::to_string(thr) +
                                " A outside the waveform current range");
    const double rearm = 0.9 * thr;

    // cum[k]: time spent above threshold over [t_0, t_k], linear between samples.
    std::vector<double> cum(s.size(), 0.0);
    std::vector<double> rise;
    std::vector<double> rise_cum;
    bool armed = s[0].i_sw < thr;
    for (std::size_t k = 1; k < s.size(); ++k) {
        const double h = s[k].t - s[k - 1].t;
        const double a = s[k - 1].i_sw - thr, b = s[k].i_sw - thr;
        double above = 0.0;
        if (a >= 0 && b >= 0)
            above = h;
        else if (a < 0 && b >= 0)
            above = h * b / (b - a);
        else if (a >= 0 && b < 0)
            above = h * a / (a - b);
        cum[k] = cum[k - 1] + above;
        if (armed && a < 0 && b >= 0) {
            rise.push_back(s[k - 1].t + h * (-a) / (b - a));
            rise_cum.push_back(cum[k - 1]);
            armed = false;
        } else if (!armed && s[k].i_sw < rearm) {
            armed = true;
        }
    }

    PeriodStats st;
    if (rise.size() < 3) return st;
    std::vector<double> intervals, on_times;
    for (std::size_t j = 1; j + 1 < rise.size(); ++j) {
        intervals.push_back(rise[j + 1] - rise[j]);
        on_times.push_back(rise_cum[j + 1] - rise_cum[j]);
    }
    const double n = double(intervals.size());
    st.n_cycles = int(intervals.size());
    st.t_period = std::accumulate(intervals.begin(), intervals.end(), 0.0) / n;
    st.t1 = std::accumulate(on_times.begin(), on_times.end(), 0.0) / n;
    st.t2 = st.t_period - st.t1;
    double var = 0.0;
    for (double x : intervals) var += (x - st.t_period) * (x - st.t_period);
    st.rsd = std::sqrt(var / n) / st.t_period;
    // A train that stopped long before the end of the record has died out.
    const bool sustained = s.back().t - rise.back() <= 2.0 * st.t_period;
    st.is_oscillating = st.n_cycles >= 3 && st.rsd <= 0.25 && sustained;
    return st;
}

PeriodStats analyze_waveform(const Waveform& w, double thr) {
    try {
        return extract_period_stats(w, thr);
    } catch (const std::domain_error&) {
        return PeriodStats{};
    }
}

double default_cap_threshold(const CapacitorCircuitConfig& cfg) {
    const bool dyn = cfg.mode == SwitchMode::BehavioralDynamic;
    const double on = (dyn ? cfg.sw.v_h_dyn : cfg.sw.v_h) / cfg.sw.r_on;
    const double off = (dyn ? cfg.sw.v_th_dyn : cfg.sw.v_th) / cfg.sw.r_off;
    return std::sqrt(on * off);
}

double NocapScenario::threshold() const {
    if (i_on_threshold > 0) return i_on_threshold;
    const double r_extra = circuit.r_i + circuit.mosfet.r_series;
    const double on = circuit.v_dd / (circuit.sw.r_on + r_extra);
    const double off = circuit.v_dd / (circuit.sw.r_off + r_extra);
    return std::sqrt(on * off);
}

ThermalGrid<double> NocapScenario::prepared_grid() const {
    ThermalGrid<double> g = grid;
    g.footprint = make_footprint(g.nx, g.ny, g.dx, g.dy, circuit.sw.film_length, circuit.sw.film_width, d);
    g.reset();
    return g;
}

Waveform NocapScenario::run() const {
    ThermalGrid<double> g = prepared_grid();
    return run_capacitorless_oscillator(circuit, g, t_end, dt);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(n, std::size_t(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) body(i);
        });
    for (auto& t : pool) t.join();
}

namespace {

void require_increasing(const std::vector<double>& v, const char* what) {
    if (v.empty()) throw ConfigError(std::string(what) + ": empty parameter list");
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) throw ConfigError(std::string(what) + ": parameter values must be strictly increasing");
}

SweepResult run_sweep(const std::vector<NocapScenario>& runs, const std::vector<double>& params, int jobs) {
    SweepResult res;
    res.rows.resize(runs.size());
    parallel_for(runs.size(), jobs, [&](std::size_t i) {
        SweepRow row{params[i], {}, {}};
        try {
            row.stats = analyze_waveform(runs[i].run(), runs[i].threshold());
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        res.rows[i] = std::move(row);
    });
    return res;
}

}  // namespace

SweepResult sweep_distance(const NocapScenario& base, const std::vector<double>& d_values, int jobs) {
    require_increasing(d_values, "sweep_distance");
    std::vector<NocapScenario> runs;
    std::vector<double> actual;
    for (double d : d_values) {
        NocapScenario sc = base;
        sc.d = d;
        actual.push_back(make_footprint(sc.grid.nx, sc.grid.ny, sc.grid.dx, sc.grid.dy, sc.circuit.sw.film_length,
                                        sc.circuit.sw.film_width, d)
                             .d);
        runs.push_back(std::move(sc));
    }
    require_increasing(actual, "sweep_distance (snapped to grid)");
    return run_sweep(runs, actual, jobs);
}

SweepResult sweep_ri(const NocapScenario& base, const std::vector<double>& ri_values, int jobs) {
    require_increasing(ri_values, "sweep_ri");
    if (ri_values.front() <= 0) throw ConfigError("sweep_ri: resistances must be positive");
    std::vector<NocapScenario> runs;
    for (double r : ri_values) {
        NocapScenario sc = base;
        sc.circuit.r_i = r;
        runs.push_back(std::move(sc));
    }
    return run_sweep(runs, ri_values, jobs);
}

}  // namespace vo2osc
