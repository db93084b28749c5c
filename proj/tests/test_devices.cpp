#include <doctest.h>

#include <cmath>
#include <random>

#include "approx.hpp"
#include "vo2osc/devices.hpp"

using namespace vo2osc;

using vo2osc::test::rel;

TEST_SUITE("devices") {

TEST_CASE("behavioral resistance follows phase") {
    SwitchParams p;
    CHECK(switch_resistance_behavioral<double>({Phase::Insulating, 293}, p) == 56e3);
    CHECK(switch_resistance_behavioral<double>({Phase::Metallic, 293}, p) == 620.0);
    SwitchParams eq = p;
    eq.r_off = eq.r_on = 1e3;
    CHECK(switch_resistance_behavioral<double>({Phase::Insulating, 293}, eq) == 1e3);
}

TEST_CASE("behavioral phase update with static thresholds") {
    SwitchParams p;
    auto s = update_switch_phase_behavioral<double>({Phase::Insulating, 293}, 4.8, 0.0, p, ThresholdMode::Static);
    CHECK(s.phase == Phase::Metallic);
    s = update_switch_phase_behavioral<double>({Phase::Metallic, 293}, 3.0, 0.0, p, ThresholdMode::Static);
    CHECK(s.phase == Phase::Metallic);
    s = update_switch_phase_behavioral<double>({Phase::Metallic, 293}, 1.1, 0.0, p, ThresholdMode::Static);
    CHECK(s.phase == Phase::Insulating);
}

TEST_CASE("dynamic thresholds widen the window") {
    SwitchParams p;
    auto s = update_switch_phase_behavioral<double>({Phase::Insulating, 293}, 4.8, 0.0, p, ThresholdMode::Dynamic);
    CHECK(s.phase == Phase::Insulating);
    s = update_switch_phase_behavioral<double>({Phase::Insulating, 293}, 5.0, 0.0, p, ThresholdMode::Dynamic);
    CHECK(s.phase == Phase::Metallic);
    s = update_switch_phase_behavioral<double>(s, 0.6, 0.0, p, ThresholdMode::Dynamic);
    CHECK(s.phase == Phase::Metallic);
    s = update_switch_phase_behavioral<double>(s, 0.5, 0.0, p, ThresholdMode::Dynamic);
    CHECK(s.phase == Phase::Insulating);
}

TEST_CASE("physical phase update uses the thermal band") {
    SwitchParams p;
    CHECK(update_switch_phase_physical({Phase::Insulating, 345}, p).phase == Phase::Metallic);
    CHECK(update_switch_phase_physical({Phase::Insulating, 341}, p).phase == Phase::Insulating);
    CHECK(update_switch_phase_physical({Phase::Metallic, 339}, p).phase == Phase::Metallic);
    CHECK(update_switch_phase_physical({Phase::Metallic, 337}, p).phase == Phase::Insulating);
}

TEST_CASE("hysteresis replay is deterministic and only switches at thresholds") {
    SwitchParams p;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> v(0.0, 6.0);
    std::vector<double> seq(5000);
    for (auto& x : seq) x = v(rng);
    auto replay = [&] {
        std::vector<Phase> out;
        SwitchState s;
        for (double x : seq) {
            const auto prev = s.phase;
            s = update_switch_phase_behavioral(s, x, 0.0, p, ThresholdMode::Static);
            if (s.phase != prev) {
                if (s.phase == Phase::Metallic)
                    CHECK(x >= p.v_th);
                else
                    CHECK(x <= p.v_h);
            }
            const double r = switch_resistance_behavioral<double>(s, p);
            CHECK((r == p.r_on || r == p.r_off));
            out.push_back(s.phase);
        }
        return out;
    };
    CHECK(replay() == replay());
}

TEST_CASE("sensor resistance reference point and monotonicity") {
    SensorParams p;
    CHECK(sensor_resistance(p.t_ref, p) == rel(p.r_off_ref, 1e-15));
    CHECK(sensor_resistance(p.t_ref + 20.0, p) < p.r_off_ref);
    CHECK_THROWS(sensor_resistance(0.0, p));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> t(200.0, 400.0);
    for (int i = 0; i < 1000; ++i) {
        double a = t(rng), b = t(rng);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        CHECK(sensor_resistance(b, p) < sensor_resistance(a, p));
    }
}

TEST_CASE("sensor slope that halves resistance over 20 K") {
    SensorParams p;
    // ln(R2/R1) = B (1/T2 - 1/T1)  =>  B = ln 2 / (1/T1 - 1/T2)
    const double t1 = p.t_ref, t2 = p.t_ref + 20.0;
    p.activation_temperature = std::log(2.0) / (1.0 / t1 - 1.0 / t2);
    CHECK(sensor_resistance(t2, p) / sensor_resistance(t1, p) == rel(0.5, 1e-12));
    CHECK(sensor_activation_for_ratio(t1, 20.0, 0.5) == rel(p.activation_temperature, 1e-12));
}

TEST_CASE("square-law MOSFET") {
    MosfetParams p{1.8, 1.37e-3, 0.0};
    CHECK(mosfet_drain_current(p.v_t0, 0.7, p) == 0.0);
    CHECK(mosfet_drain_current(p.v_t0, 3.0, p) == 0.0);
    // triode at vov = 1 V, v_ds = 10 mV
    const double expect = 1.37e-3 * (1.0 * 0.01 - 0.01 * 0.01 / 2.0);
    CHECK(mosfet_drain_current(p.v_t0 + 1.0, 0.01, p) == rel(expect, 1e-14));
    CHECK(expect == rel(1.36e-5, 0.01));
    CHECK(0.01 / expect == rel(730.0, 0.01));
    CHECK_THROWS_AS(mosfet_drain_current(3.0, -0.1, p), std::invalid_argument);
}

TEST_CASE("MOSFET continuity across region boundaries") {
    MosfetParams p{1.8, 5e-2, 0.0};
    for (double vov : {0.01, 0.3, 1.0, 3.0}) {
        const double vgs = p.v_t0 + vov;
        const double below = mosfet_drain_current(vgs, std::nextafter(vov, 0.0), p);
        const double at = mosfet_drain_current(vgs, vov, p);
        CHECK(std::abs(at - below) < 1e-12);
    }
    for (double vds : {0.0, 0.5, 2.0}) {
        const double above = mosfet_drain_current(std::nextafter(p.v_t0, 10.0), vds, p);
        CHECK(std::abs(above) < 1e-12);
    }
}

TEST_CASE("MOSFET monotone in both arguments") {
    MosfetParams p{1.8, 2e-3, 0.0};
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int i = 0; i < 2000; ++i) {
        const double g = u(rng), d = u(rng), dg = 0.1 * u(rng), dd = 0.1 * u(rng);
        CHECK(mosfet_drain_current(g + dg, d, p) >= mosfet_drain_current(g, d, p));
        CHECK(mosfet_drain_current(g, d + dd, p) >= mosfet_drain_current(g, d, p));
    }
}

TEST_CASE("load-line operating points") {
    SwitchParams p;
    auto a = load_line_operating_points(p, 5.0, 1.4e3);
    REQUIRE(a.size() == 1);
    CHECK(a[0].branch == Branch::On);
    CHECK(a[0].v_sw == rel(5.0 * 620.0 / 2020.0, 1e-12));
    CHECK(a[0].i_sw == rel(5.0 / 2020.0, 1e-12));
    CHECK(a[0].v_sw == rel(1.53, 0.005));
    CHECK(a[0].i_sw == rel(2.48e-3, 0.005));

    auto b = load_line_operating_points(p, 5.0, 50e3);
    REQUIRE(b.size() == 1);
    CHECK(b[0].branch == Branch::Off);
    CHECK(b[0].v_sw == rel(5.0 * 56.0 / 106.0, 1e-12));
    CHECK(b[0].i_sw == rel(47.17e-6, 1e-3));

    auto z = load_line_operating_points(p, 0.0, 1e3);
    REQUIRE(z.size() == 1);
    CHECK(z[0].branch == Branch::Off);
    CHECK(z[0].v_sw == 0.0);
    CHECK(z[0].i_sw == 0.0);

    CHECK(load_line_operating_points(p, 5.0, 3e3).empty());
    CHECK_THROWS_AS(load_line_operating_points(p, 5.0, -1.0), ConfigError);
}

TEST_CASE("load-line points satisfy both equations and match a brute-force scan") {
    SwitchParams p;
    const double v_dd = 5.0;
    for (double r_l : {100.0, 620.0, 1.4e3, 2.5e3, 2.8e3, 3e3, 3.4e3, 3.7e3, 10e3, 50e3, 200e3}) {
        const auto pts = load_line_operating_points(p, v_dd, r_l);
        for (const auto& pt : pts) {
            const double r = pt.branch == Branch::On ? p.r_on : p.r_off;
            CHECK(std::abs(pt.i_sw - pt.v_sw / r) <= 1e-9 * pt.i_sw);
            CHECK(std::abs(pt.i_sw - (v_dd - pt.v_sw) / r_l) <= 1e-9 * pt.i_sw);
        }
        // Sign changes of (load - branch) current on a 10 uV grid, restricted to
        // each branch's validity range.
        std::vector<std::pair<Branch, double>> scan;
        const double h = 1e-5;
        const long n = std::lround(v_dd / h);
        for (Branch br : {Branch::Off, Branch::On}) {
            const double r = br == Branch::On ? p.r_on : p.r_off;
            auto f = [&](double v) { return (v_dd - v) / r_l - v / r; };
            for (long k = 0; k < n; ++k) {
                const double v0 = k * h, v1 = (k + 1) * h;
                if (f(v0) >= 0 && f(v1) < 0) {
                    const double v = 0.5 * (v0 + v1);
                    const bool valid = br == Branch::Off ? v <= p.v_th : v / r >= p.i_h;
                    if (valid) scan.push_back({br, v});
                }
            }
        }
        REQUIRE(scan.size() == pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            CHECK(scan[i].first == pts[i].branch);
            CHECK(std::abs(scan[i].second - pts[i].v_sw) <= 1e-5);
        }
    }
}

TEST_CASE("parameter validation") {
    SwitchParams p;
    CHECK_NOTHROW(validate(p, 293.0));
    p.v_th_dyn = 4.0;
    CHECK_THROWS_AS(validate(p, 293.0), ConfigError);
    SwitchParams q;
    q.t_th = 280.0;
    CHECK_THROWS_AS(validate(q, 293.0), ConfigError);
    CHECK_THROWS_AS(validate(MosfetParams{0.0, 1.0, 0.0}), ConfigError);
}

}
