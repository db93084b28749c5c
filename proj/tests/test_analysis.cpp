#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "approx.hpp"
#include "vo2osc/analysis.hpp"
#include "vo2osc/config.hpp"

using namespace vo2osc;

namespace {

// Trapezoidal pulse train with one-sample edges starting at `t0`.
Waveform pulse_train(double period, double duty, double dt, double t_end, double t0 = 0.0, double off = 1e-4,
                     double on = 5e-3) {
    Waveform w;
    w.dt = dt;
    const auto n = std::size_t(std::llround(t_end / dt));
    const long per = std::lround(period / dt), high = std::lround(duty * period / dt);
    for (std::size_t k = 0; k <= n; ++k) {
        const long phase = long(k) % per;
        const double i = phase >= 1 && phase <= high ? on : off;
        w.samples.push_back({t0 + double(k) * dt, 0.0, i, 0.0, 293.0, 293.0, Phase::Insulating});
    }
    return w;
}

NocapScenario small_scenario() {
    RunConfig rc;
    auto sc = make_nocap_scenario(rc);
    sc.t_end = 0.8e-6;
    return sc;
}

}  // namespace

using vo2osc::test::rel;

TEST_SUITE("analysis") {

TEST_CASE("synthetic square wave gives exact period and duty") {
    const double thr = std::sqrt(1e-4 * 5e-3);
    const auto w = pulse_train(100e-9, 0.2, 0.1e-9, 2e-6);
    const auto st = extract_period_stats(w, thr);
    // Both edges span one sample, so linear interpolation puts each crossing a
    // fraction f into its edge: the high time is (200 + 1 - 2f) samples.
    const double f = (thr - 1e-4) / (5e-3 - 1e-4);
    const double t1 = (201.0 - 2.0 * f) * w.dt;
    CHECK(st.is_oscillating);
    CHECK(st.n_cycles == 18);
    CHECK(st.t_period == rel(100e-9, 1e-9));
    CHECK(st.t1 == rel(t1, 1e-9));
    CHECK(st.t2 == rel(100e-9 - t1, 1e-9));
    CHECK(st.rsd < 1e-9);
    CHECK(std::abs(st.t1 + st.t2 - st.t_period) < w.dt);
}

TEST_CASE("constant current and out-of-range thresholds") {
    Waveform w = pulse_train(100e-9, 0.2, 0.1e-9, 1e-6, 0.0, 1e-3, 1e-3);
    CHECK_FALSE(extract_period_stats(w, 1e-3).is_oscillating);
    CHECK_THROWS_AS(extract_period_stats(w, 2e-3), std::domain_error);
    CHECK_FALSE(analyze_waveform(w, 2e-3).is_oscillating);
    Waveform tiny;
    tiny.samples.push_back({0, 0, 0, 0, 0, 0, Phase::Insulating});
    CHECK_THROWS(extract_period_stats(tiny, 0.0));
}

TEST_CASE("too few crossings, irregular trains, and dying trains are not oscillating") {
    auto w = pulse_train(400e-9, 0.2, 0.1e-9, 1e-6);  // three rises, one counted interval
    CHECK_FALSE(extract_period_stats(w, 1e-3).is_oscillating);

    Waveform irr = pulse_train(50e-9, 0.2, 0.1e-9, 2e-6);
    // stretch every other cycle to triple length by blanking pulses
    for (auto& s : irr.samples) {
        const long c = long(std::floor(s.t / 50e-9));
        if (c % 4 == 1 || c % 4 == 2) s.i_sw = 1e-4;
    }
    const auto st = extract_period_stats(irr, 1e-3);
    CHECK(st.rsd > 0.25);
    CHECK_FALSE(st.is_oscillating);

    Waveform dying = pulse_train(100e-9, 0.2, 0.1e-9, 3e-6);
    for (auto& s : dying.samples)
        if (s.t > 0.65e-6) s.i_sw = 1e-4;
    CHECK_FALSE(extract_period_stats(dying, 1e-3).is_oscillating);
}

TEST_CASE("deadband suppresses chatter around the threshold") {
    auto w = pulse_train(100e-9, 0.3, 0.1e-9, 2e-6);
    const double thr = 1e-3;
    // ripple dipping just below the threshold in the middle of each pulse
    for (std::size_t k = 0; k < w.size(); ++k) {
        auto& s = w.samples[k];
        if (s.i_sw > thr && k % 1000 == 150) s.i_sw = 0.95 * thr;
    }
    const auto st = extract_period_stats(w, thr);
    CHECK(st.is_oscillating);
    CHECK(st.t_period == rel(100e-9, 1e-9));
}

TEST_CASE("translation invariance") {
    const auto a = extract_period_stats(pulse_train(73e-9, 0.35, 0.1e-9, 2e-6), 1e-3);
    const auto b = extract_period_stats(pulse_train(73e-9, 0.35, 0.1e-9, 2e-6, 4.2e-6), 1e-3);
    CHECK(a.is_oscillating);
    CHECK(b.t_period == rel(a.t_period, 1e-6));
    CHECK(b.t1 == rel(a.t1, 1e-6));
    CHECK(a.n_cycles == b.n_cycles);

    // a different starting phase only changes which partial cycles are dropped
    auto c = pulse_train(73e-9, 0.35, 0.1e-9, 2.03e-6);
    c.samples.erase(c.samples.begin(), c.samples.begin() + 300);
    const auto sc = extract_period_stats(c, 1e-3);
    CHECK(sc.t_period == rel(a.t_period, 1e-9));
    CHECK(sc.t1 == rel(a.t1, 1e-9));
}

TEST_CASE("decimation moves the period by less than one decimated sample") {
    CapacitorCircuitConfig cfg;
    const auto w = run_capacitor_oscillator(cfg, nullptr, 2e-6, 0.05e-9);
    const double thr = default_cap_threshold(cfg);
    const auto full = extract_period_stats(w, thr);
    const auto half = extract_period_stats(w.decimated(2), thr);
    CHECK(full.is_oscillating);
    CHECK(std::abs(full.t_period - half.t_period) < 2 * w.dt);
    CHECK(w.decimated(2).size() == (w.size() + 1) / 2);
    CHECK_THROWS_AS(w.decimated(0), ConfigError);
}

TEST_CASE("sweeps: parallel equals serial and single rows equal direct runs") {
    auto sc = small_scenario();
    const std::vector<double> ri{100.0, 400.0, 700.0};
    const auto serial = sweep_ri(sc, ri, 1);
    const auto par = sweep_ri(sc, ri, 3);
    REQUIRE(serial.rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(serial.rows[i].param_value == par.rows[i].param_value);
        CHECK(serial.rows[i].stats.t_period == par.rows[i].stats.t_period);
        CHECK(serial.rows[i].stats.t1 == par.rows[i].stats.t1);
        CHECK(serial.rows[i].stats.n_cycles == par.rows[i].stats.n_cycles);
    }

    const auto one = sweep_distance(sc, {sc.d});
    REQUIRE(one.rows.size() == 1);
    const auto direct = analyze_waveform(sc.run(), sc.threshold());
    CHECK(one.rows[0].stats.t_period == direct.t_period);
    CHECK(one.rows[0].stats.t1 == direct.t1);
    CHECK(one.rows[0].stats.is_oscillating == direct.is_oscillating);
}

TEST_CASE("sweep inputs and per-row failures") {
    auto sc = small_scenario();
    CHECK_THROWS_AS(sweep_ri(sc, {300.0, 200.0}), ConfigError);
    CHECK_THROWS_AS(sweep_ri(sc, {}), ConfigError);
    CHECK_THROWS_AS(sweep_ri(sc, {-1.0, 5.0}), ConfigError);
    // two values that snap onto the same cell gap
    CHECK_THROWS_AS(sweep_distance(sc, {200e-9, 210e-9}), ConfigError);

    sc.dt = 1e-9;  // far beyond the explicit stability limit
    const auto res = sweep_ri(sc, {100.0, 200.0});
    REQUIRE(res.rows.size() == 2);
    for (const auto& r : res.rows) {
        CHECK_FALSE(r.error.empty());
        CHECK_FALSE(r.stats.is_oscillating);
    }
}

TEST_CASE("sweep_distance reports the snapped separation") {
    auto sc = small_scenario();
    sc.t_end = 0.2e-6;
    const auto res = sweep_distance(sc, {120e-9, 330e-9});
    CHECK(res.rows[0].param_value == rel(100e-9, 1e-9));
    CHECK(res.rows[1].param_value == rel(350e-9, 1e-9));
}

TEST_CASE("cooling time stays nearly flat across the distance sweep") {
    RunConfig rc;
    const auto sc = make_nocap_scenario(rc);
    const auto res = sweep_distance(sc, {100e-9, 200e-9, 300e-9, 400e-9, 500e-9, 600e-9, 700e-9});
    double lo = 1, hi = 0, sum = 0;
    for (const auto& r : res.rows) {
        REQUIRE(r.stats.is_oscillating);
        lo = std::min(lo, r.stats.t2);
        hi = std::max(hi, r.stats.t2);
        sum += r.stats.t2;
    }
    MESSAGE("T2 range " << lo * 1e9 << " .. " << hi * 1e9 << " ns");
    CHECK((hi - lo) / (sum / 7) < 0.25);
}

}
