#include "vo2osc/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "vo2osc/config.hpp"
#include "vo2osc/io.hpp"

namespace vo2osc {

std::vector<double> parse_range(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() != 3) throw ConfigError("range '" + text + "' is not start:stop:count");
    double a = 0, b = 0;
    int n = 0;
    try {
        std::size_t pa = 0, pb = 0, pn = 0;
        a = std::stod(parts[0], &pa);
        b = std::stod(parts[1], &pb);
        n = std::stoi(parts[2], &pn);
        if (pa != parts[0].size() || pb != parts[1].size() || pn != parts[2].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw ConfigError("range '" + text + "' has non-numeric fields");
    }
    if (n < 1) throw ConfigError("range '" + text + "' is empty");
    if (n > 1 && !(b > a)) throw ConfigError("range '" + text + "' must have stop > start");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[std::size_t(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

namespace {

namespace fs = std::filesystem;

struct Context {
    RunConfig cfg;
    fs::path out_dir;
    int jobs = 1;
    std::ostream& out;
    std::ostream& err;

    std::string path(const std::string& name) const { return (out_dir / name).string(); }
};

void report_warnings(const Context& c, const Waveform& w) {
    for (const auto& msg : w.warnings) c.err << "warning: " << msg << "\n";
}

int cmd_iv(Context& c) {
    const auto grid = make_grid(c.cfg);
    const auto curve = quasi_static_iv_sweep(c.cfg.sw, grid, c.cfg.iv.v_max, c.cfg.iv.n_points);
    write_file_atomic(c.path("iv.csv"), iv_csv(curve));
    if (c.cfg.output.svg) {
        PlotSeries up{"up", {}, {}}, down{"down", {}, {}};
        for (const auto& p : curve) {
            auto& s = p.direction > 0 ? up : down;
            s.x.push_back(p.v_sw);
            s.y.push_back(p.i_sw);
        }
        write_file_atomic(c.path("iv.svg"), svg_plot({up, down}, "Switch I-V (quasi-static)", "V_sw (V)", "I_sw (A)", true));
    }
    double v_up = -1, v_down = -1;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (curve[i].direction > 0 && v_up < 0 && curve[i].phase == Phase::Metallic) v_up = curve[i].v_sw;
        if (curve[i].direction < 0 && curve[i - 1].phase == Phase::Metallic && curve[i].phase == Phase::Insulating)
            v_down = curve[i].v_sw;
    }
    c.out << "iv: " << curve.size() << " points";
    if (v_up > 0) c.out << ", up-transition at " << v_up << " V";
    if (v_down > 0) c.out << ", down-transition at " << v_down << " V";
    if (v_up < 0) c.out << ", no transition";
    c.out << "\n";
    return ExitOk;
}

void write_waveform_outputs(Context& c, const Waveform& w, const PeriodStats& st, const std::string& title) {
    const Waveform dec = w.decimated(c.cfg.output.decimation);
    write_file_atomic(c.path("waveform.csv"), waveform_csv(dec));
    write_file_atomic(c.path("stats.csv"), stats_csv(st));
    if (c.cfg.output.svg) {
        PlotSeries v{"V_sw (V)", {}, {}}, i{"I_sw (mA)", {}, {}};
        for (const auto& s : dec.samples) {
            v.x.push_back(s.t * 1e9);
            v.y.push_back(s.v_sw);
            i.x.push_back(s.t * 1e9);
            i.y.push_back(s.i_sw * 1e3);
        }
        write_file_atomic(c.path("waveform.svg"), svg_plot({v, i}, title, "t (ns)", "V_sw, I_sw"));
    }
    c.out << "T=" << st.t_period * 1e9 << " ns T1=" << st.t1 * 1e9 << " ns T2=" << st.t2 * 1e9
          << " ns cycles=" << st.n_cycles << " oscillating=" << (st.is_oscillating ? "true" : "false") << "\n";
}

int cmd_osc(Context& c, const std::string& topology) {
    if (topology == "cap") {
        const auto circuit = make_cap_circuit(c.cfg);
        std::optional<ThermalGrid<double>> grid;
        if (circuit.mode == SwitchMode::Physical) grid = make_grid(c.cfg);
        const auto w = run_capacitor_oscillator(circuit, grid ? &*grid : nullptr, c.cfg.sim.t_end, c.cfg.sim.dt);
        const double thr = c.cfg.sim.i_on_threshold > 0 ? c.cfg.sim.i_on_threshold : default_cap_threshold(circuit);
        write_waveform_outputs(c, w, analyze_waveform(w, thr), "Capacitor oscillator");
        return ExitOk;
    }
    const auto sc = make_nocap_scenario(c.cfg);
    auto grid = sc.prepared_grid();
    const auto w = run_capacitorless_oscillator(sc.circuit, grid, sc.t_end, sc.dt);
    report_warnings(c, w);
    write_waveform_outputs(c, w, analyze_waveform(w, sc.threshold()), "Capacitorless oscillator");
    if (c.cfg.output.snapshot) write_file_atomic(c.path("field.csv"), field_to_csv(grid));
    return ExitOk;
}

int cmd_sweep(Context& c, const std::string& param, const std::string& range) {
    const auto values = parse_range(range);
    const auto sc = make_nocap_scenario(c.cfg);
    const auto res = param == "d" ? sweep_distance(sc, values, c.jobs) : sweep_ri(sc, values, c.jobs);
    write_file_atomic(c.path("sweep.csv"), sweep_csv(res));
    bool any_ok = false;
    PlotSeries t{"T", {}, {}}, t1{"T1", {}, {}}, t2{"T2", {}, {}};
    const double scale = param == "d" ? 1e9 : 1.0;
    for (const auto& row : res.rows) {
        if (!row.error.empty()) {
            c.err << "row " << row.param_value << " failed: " << row.error << "\n";
            continue;
        }
        any_ok = true;
        t.x.push_back(row.param_value * scale);
        t.y.push_back(row.stats.t_period * 1e9);
        t1.x.push_back(row.param_value * scale);
        t1.y.push_back(row.stats.t1 * 1e9);
        t2.x.push_back(row.param_value * scale);
        t2.y.push_back(row.stats.t2 * 1e9);
        c.out << param << "=" << row.param_value << " T=" << row.stats.t_period * 1e9
              << " ns T1=" << row.stats.t1 * 1e9 << " ns T2=" << row.stats.t2 * 1e9
              << " ns oscillating=" << (row.stats.is_oscillating ? "true" : "false") << "\n";
    }
    if (c.cfg.output.svg)
        write_file_atomic(c.path("sweep.svg"),
                          svg_plot({t, t1, t2}, "Period sweep", param == "d" ? "d (nm)" : "R_i (ohm)", "time (ns)"));
    return any_ok ? ExitOk : ExitSolver;
}

int cmd_loadline(Context& c, const std::vector<double>& r_l_values) {
    std::vector<LoadlineRow> rows;
    for (double r : r_l_values) {
        if (!(r > 0)) throw ConfigError("loadline: r_l values must be positive");
        rows.push_back({r, load_line_operating_points(c.cfg.sw, c.cfg.circuit_nocap.v_dd, r)});
    }
    c.out << "r_l_ohm        v_sw_V         i_sw_A         branch\n";
    for (const auto& row : rows) {
        if (row.points.empty()) c.out << sci(row.r_l) << "  (no intersection: NDR gap)\n";
        for (const auto& p : row.points)
            c.out << sci(row.r_l) << "  " << sci(p.v_sw) << "  " << sci(p.i_sw) << "  " << branch_name(p.branch) << "\n";
    }
    write_file_atomic(c.path("loadline.csv"), loadline_csv(rows));
    return ExitOk;
}

int cmd_calibrate(Context& c) {
    const auto grid = make_grid(c.cfg);
    const auto res = calibrate_switch_thermal(c.cfg.sw, grid);
    RunConfig calibrated = c.cfg;
    calibrated.thermal.out_of_plane_loss = res.out_of_plane_loss;
    calibrated.thermal.thickness = res.effective_thickness;
    const auto curve =
        quasi_static_iv_sweep(calibrated.sw, make_grid(calibrated), calibrated.iv.v_max, calibrated.iv.n_points);
    write_file_atomic(c.path("calibration.cfg"),
                      "# calibrated thermal path\nthermal.out_of_plane_loss = " +
                          get_config_value(calibrated, "thermal.out_of_plane_loss") + "\nthermal.thickness = " +
                          get_config_value(calibrated, "thermal.thickness") + "\n");
    write_file_atomic(c.path("iv.csv"), iv_csv(curve));
    c.out << "out_of_plane_loss=" << sci(res.out_of_plane_loss) << " W/(m^2 K)\n"
          << "effective_thickness=" << sci(res.effective_thickness) << " m\n"
          << "r_grid=" << sci(res.r_grid) << " K/W r_total=" << sci(res.r_total) << " K/W\n"
          << "v_th=" << res.v_th << " V v_h=" << res.v_h << " V\n";
    return ExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Electro-thermal simulator for VO2 relaxation oscillators", "vo2osc"};
    app.require_subcommand(0, 1);
    app.fallthrough();
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
    int jobs = 1;
    bool dump = false;
    std::optional<double> v_max;
    app.add_option("--config", config_path, "Config file with section.key = value lines");
    app.add_option("--set", overrides, "Override section.key=value (repeatable)")->allow_extra_args(false);
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--jobs", jobs, "Parallel runs for sweeps")->check(CLI::PositiveNumber);
    app.add_flag("--dump-config", dump, "Print the effective config and exit");
    app.add_option("--v-max", v_max, "Upper bias of the I-V sweep (V)");

    auto* iv = app.add_subcommand("iv", "Quasi-static I-V sweep");
    auto* osc = app.add_subcommand("osc", "Transient oscillator run");
    std::string topology;
    osc->add_option("topology", topology, "cap or nocap")->required()->check(CLI::IsMember({"cap", "nocap"}));
    auto* sweep = app.add_subcommand("sweep", "Period sweep over d or R_i");
    std::string param, range;
    sweep->add_option("param", param, "d or ri")->required()->check(CLI::IsMember({"d", "ri"}));
    sweep->add_option("range", range, "start:stop:count")->required();
    auto* loadline = app.add_subcommand("loadline", "Static load-line operating points");
    std::vector<double> r_l_values{1.4e3, 3e3, 50e3};
    loadline->add_option("r_l", r_l_values, "Load resistances (ohm)");
    auto* calibrate = app.add_subcommand("calibrate", "Fit the out-of-plane loss to the threshold voltage");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return ExitConfig;
    }

    Context c{RunConfig{}, fs::path(out_dir), jobs, out, err};
    try {
        if (!config_path.empty()) apply_config_file(c.cfg, config_path);
        for (const auto& o : overrides) apply_override(c.cfg, o);
        if (v_max) c.cfg.iv.v_max = *v_max;
        validate(c.cfg);
        if (dump) {
            out << dump_config(c.cfg);
            return ExitOk;
        }
        if (iv->parsed()) return cmd_iv(c);
        if (osc->parsed()) return cmd_osc(c, topology);
        if (sweep->parsed()) return cmd_sweep(c, param, range);
        if (loadline->parsed()) return cmd_loadline(c, r_l_values);
        if (calibrate->parsed()) return cmd_calibrate(c);
        out << app.help();
        return ExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return ExitConfig;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << "\n";
        return ExitSolver;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return ExitFailure;
    }
}

}  // namespace vo2osc
