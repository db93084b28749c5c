#include "vo2osc/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace vo2osc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& v, const char* expect) {
    throw ConfigError("invalid value '" + v + "' for key " + key + " (expected " + expect + ")");
}

double parse_double(const std::string& key, const std::string& v) {
    double x = 0;
    const char* b = v.data();
    const char* e = b + v.size();
    auto [p, ec] = std::from_chars(b, e, x);
    if (ec != std::errc() || p != e || !std::isfinite(x)) bad_value(key, v, "a finite number");
    return x;
}

int parse_int(const std::string& key, const std::string& v) {
    int x = 0;
    const char* b = v.data();
    const char* e = b + v.size();
    auto [p, ec] = std::from_chars(b, e, x);
    if (ec != std::errc() || p != e) bad_value(key, v, "an integer");
    return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad_value(key, v, "true or false");
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

const char* mode_name(SwitchMode m) {
    switch (m) {
        case SwitchMode::BehavioralStatic: return "static";
        case SwitchMode::BehavioralDynamic: return "dynamic";
        case SwitchMode::Physical: return "physical";
    }
    return "?";
}

SwitchMode parse_mode(const std::string& key, const std::string& v) {
    if (v == "static") return SwitchMode::BehavioralStatic;
    if (v == "dynamic") return SwitchMode::BehavioralDynamic;
    if (v == "physical") return SwitchMode::Physical;
    bad_value(key, v, "static, dynamic or physical");
}

Boundary parse_boundary(const std::string& key, const std::string& v) {
    if (v == "fixed") return Boundary::FixedAmbient;
    if (v == "adiabatic") return Boundary::Adiabatic;
    bad_value(key, v, "fixed or adiabatic");
}

struct Entry {
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

template <typename Ref>
Entry real(const char* key, Ref ref) {
    return {key, [ref](const RunConfig& c) { return fmt(ref(const_cast<RunConfig&>(c))); },
            [ref, key](RunConfig& c, const std::string& v) { ref(c) = parse_double(key, v); }};
}

template <typename Ref>
Entry integer(const char* key, Ref ref) {
    return {key, [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); },
            [ref, key](RunConfig& c, const std::string& v) { ref(c) = parse_int(key, v); }};
}

template <typename Ref>
Entry flag(const char* key, Ref ref) {
    return {key, [ref](const RunConfig& c) { return std::string(ref(const_cast<RunConfig&>(c)) ? "true" : "false"); },
            [ref, key](RunConfig& c, const std::string& v) { ref(c) = parse_bool(key, v); }};
}

#define VO2_REF(expr) [](RunConfig& c) -> auto& { return c.expr; }

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries = [] {
        std::vector<Entry> e;
        e.push_back(real("switch.r_off", VO2_REF(sw.r_off)));
        e.push_back(real("switch.r_on", VO2_REF(sw.r_on)));
        e.push_back(real("switch.v_th", VO2_REF(sw.v_th)));
        e.push_back(real("switch.i_th", VO2_REF(sw.i_th)));
        e.push_back(real("switch.v_h", VO2_REF(sw.v_h)));
        e.push_back(real("switch.i_h", VO2_REF(sw.i_h)));
        e.push_back(real("switch.v_th_dyn", VO2_REF(sw.v_th_dyn)));
        e.push_back(real("switch.v_h_dyn", VO2_REF(sw.v_h_dyn)));
        e.push_back(real("switch.t_th", VO2_REF(sw.t_th)));
        e.push_back(real("switch.dt_hyst", VO2_REF(sw.dt_hyst)));
        e.push_back(real("switch.film_length", VO2_REF(sw.film_length)));
        e.push_back(real("switch.film_width", VO2_REF(sw.film_width)));
        e.push_back(real("switch.film_thickness", VO2_REF(sw.film_thickness)));
        e.push_back(real("switch.activation_temperature", VO2_REF(sw.activation_temperature)));
        e.push_back(real("switch.film_volumetric_heat_capacity", VO2_REF(sw.film_volumetric_heat_capacity)));
        e.push_back(real("switch.film_thermal_resistance", VO2_REF(sw.film_thermal_resistance)));
        e.push_back(real("sensor.r_off_ref", VO2_REF(sensor.r_off_ref)));
        e.push_back(real("sensor.activation_temperature", VO2_REF(sensor.activation_temperature)));
        e.push_back(real("sensor.t_ref", VO2_REF(sensor.t_ref)));
        e.push_back(real("mosfet.v_t0", VO2_REF(mosfet.v_t0)));
        e.push_back(real("mosfet.k_gain", VO2_REF(mosfet.k_gain)));
        e.push_back(real("mosfet.r_series", VO2_REF(mosfet.r_series)));
        e.push_back(integer("thermal.nx", VO2_REF(thermal.nx)));
        e.push_back(integer("thermal.ny", VO2_REF(thermal.ny)));
        e.push_back(real("thermal.dx", VO2_REF(thermal.dx)));
        e.push_back(real("thermal.dy", VO2_REF(thermal.dy)));
        e.push_back(real("thermal.thickness", VO2_REF(thermal.thickness)));
        e.push_back(real("thermal.ambient", VO2_REF(thermal.ambient)));
        e.push_back(real("thermal.out_of_plane_loss", VO2_REF(thermal.out_of_plane_loss)));
        e.push_back(real("thermal.conductivity", VO2_REF(thermal.material.thermal_conductivity)));
        e.push_back(real("thermal.density", VO2_REF(thermal.material.density)));
        e.push_back(real("thermal.specific_heat", VO2_REF(thermal.material.specific_heat)));
        e.push_back({"thermal.boundary",
                     [](const RunConfig& c) {
                         return std::string(c.thermal.boundary == Boundary::FixedAmbient ? "fixed" : "adiabatic");
                     },
                     [](RunConfig& c, const std::string& v) { c.thermal.boundary = parse_boundary("thermal.boundary", v); }});
        e.push_back(real("circuit_cap.i_dd", VO2_REF(circuit_cap.i_dd)));
        e.push_back(real("circuit_cap.c", VO2_REF(circuit_cap.c)));
        e.push_back({"circuit_cap.mode", [](const RunConfig& c) { return std::string(mode_name(c.circuit_cap.mode)); },
                     [](RunConfig& c, const std::string& v) { c.circuit_cap.mode = parse_mode("circuit_cap.mode", v); }});
        e.push_back(real("circuit_nocap.v_dd", VO2_REF(circuit_nocap.v_dd)));
        e.push_back(real("circuit_nocap.r_b", VO2_REF(circuit_nocap.r_b)));
        e.push_back(real("circuit_nocap.r_i", VO2_REF(circuit_nocap.r_i)));
        e.push_back(real("circuit_nocap.d", VO2_REF(circuit_nocap.d)));
        e.push_back(flag("circuit_nocap.thermal_feedback", VO2_REF(circuit_nocap.thermal_feedback)));
        e.push_back(flag("circuit_nocap.sensor_self_heating", VO2_REF(circuit_nocap.sensor_self_heating)));
        e.push_back(real("sim.dt", VO2_REF(sim.dt)));
        e.push_back(real("sim.t_end", VO2_REF(sim.t_end)));
        e.push_back(flag("sim.deterministic", VO2_REF(sim.deterministic)));
        e.push_back(real("sim.i_on_threshold", VO2_REF(sim.i_on_threshold)));
        e.push_back(real("iv.v_max", VO2_REF(iv.v_max)));
        e.push_back(integer("iv.n_points", VO2_REF(iv.n_points)));
        e.push_back(integer("output.decimation", VO2_REF(output.decimation)));
        e.push_back(flag("output.svg", VO2_REF(output.svg)));
        e.push_back(flag("output.snapshot", VO2_REF(output.snapshot)));
        return e;
    }();
    return entries;
}

#undef VO2_REF

const Entry& find(const std::string& key) {
    for (const auto& e : registry())
        if (e.key == key) return e;
    throw ConfigError("unknown config key: " + key);
}

}  // namespace

std::vector<std::string> config_keys() {
    std::vector<std::string> k;
    for (const auto& e : registry()) k.push_back(e.key);
    return k;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    find(key).set(cfg, trim(value));
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) { return find(key).get(cfg); }

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'section.key = value'");
        set_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    apply_config_text(cfg, ss.str(), path);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not section.key=value");
    set_config_value(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

std::string dump_config(const RunConfig& cfg) {
    std::string out;
    std::string section;
    for (const auto& e : registry()) {
        const std::string sec = e.key.substr(0, e.key.find('.'));
        if (sec != section) {
            if (!section.empty()) out += '\n';
            out += "# " + sec + "\n";
            section = sec;
        }
        out += e.key + " = " + e.get(cfg) + "\n";
    }
    return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
    for (const auto& e : registry())
        if (e.get(a) != e.get(b)) return false;
    return true;
}

void validate(const RunConfig& cfg) {
    validate(cfg.sw, cfg.thermal.ambient);
    validate(cfg.sensor);
    validate(cfg.mosfet);
    const auto& t = cfg.thermal;
    if (t.nx < 3 || t.ny < 3) throw ConfigError("thermal.nx and thermal.ny must be at least 3");
    if (!(t.dx > 0 && t.dy > 0 && t.thickness > 0)) throw ConfigError("thermal.dx, dy and thickness must be positive");
    if (!(t.ambient > 0)) throw ConfigError("thermal.ambient must be positive");
    if (t.out_of_plane_loss < 0) throw ConfigError("thermal.out_of_plane_loss must be non-negative");
    if (!(t.material.thermal_conductivity > 0 && t.material.density > 0 && t.material.specific_heat > 0))
        throw ConfigError("thermal material properties must be positive");
    if (!(cfg.circuit_cap.i_dd > 0 && cfg.circuit_cap.c > 0)) throw ConfigError("circuit_cap.i_dd and c must be positive");
    const auto& n = cfg.circuit_nocap;
    if (!(n.v_dd > 0 && n.r_b > 0 && n.r_i > 0)) throw ConfigError("circuit_nocap.v_dd, r_b and r_i must be positive");
    if (n.d < 0) throw ConfigError("circuit_nocap.d must be non-negative");
    if (!(cfg.sim.dt > 0 && cfg.sim.t_end > cfg.sim.dt)) throw ConfigError("sim.dt must be positive and below sim.t_end");
    if (cfg.sim.i_on_threshold < 0) throw ConfigError("sim.i_on_threshold must be non-negative");
    if (!(cfg.iv.v_max > 0) || cfg.iv.n_points < 2) throw ConfigError("iv.v_max must be positive and iv.n_points >= 2");
    if (cfg.output.decimation < 1) throw ConfigError("output.decimation must be >= 1");
}

ThermalGrid<double> make_grid(const RunConfig& cfg) {
    const auto& t = cfg.thermal;
    ThermalGrid<double> g(t.nx, t.ny, t.dx, t.dy, t.ambient);
    g.effective_thickness = t.thickness;
    g.out_of_plane_loss = t.out_of_plane_loss;
    g.material = t.material;
    g.boundary.fill(t.boundary);
    g.footprint = make_footprint(t.nx, t.ny, t.dx, t.dy, cfg.sw.film_length, cfg.sw.film_width, cfg.circuit_nocap.d);
    return g;
}

CapacitorCircuitConfig make_cap_circuit(const RunConfig& cfg) {
    CapacitorCircuitConfig c;
    c.i_dd = cfg.circuit_cap.i_dd;
    c.c = cfg.circuit_cap.c;
    c.sw = cfg.sw;
    c.mode = cfg.circuit_cap.mode;
    return c;
}

CapacitorlessCircuitConfig make_nocap_circuit(const RunConfig& cfg) {
    CapacitorlessCircuitConfig c;
    c.v_dd = cfg.circuit_nocap.v_dd;
    c.r_b = cfg.circuit_nocap.r_b;
    c.r_i = cfg.circuit_nocap.r_i;
    c.mosfet = cfg.mosfet;
    c.sw = cfg.sw;
    c.sensor = cfg.sensor;
    c.thermal_feedback = cfg.circuit_nocap.thermal_feedback;
    c.sensor_self_heating = cfg.circuit_nocap.sensor_self_heating;
    return c;
}

NocapScenario make_nocap_scenario(const RunConfig& cfg) {
    NocapScenario sc;
    sc.circuit = make_nocap_circuit(cfg);
    sc.grid = make_grid(cfg);
    sc.d = cfg.circuit_nocap.d;
    sc.t_end = cfg.sim.t_end;
    sc.dt = cfg.sim.dt;
    sc.i_on_threshold = cfg.sim.i_on_threshold;
    return sc;
}

}  // namespace vo2osc
