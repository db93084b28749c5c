#include "vo2osc/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

namespace vo2osc {

std::string sci(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string iv_csv(const std::vector<IVPoint>& curve) {
    std::string out = "v_sw_V,i_sw_A,direction\n";
    for (const auto& p : curve) out += sci(p.v_sw) + "," + sci(p.i_sw) + "," + (p.direction > 0 ? "up" : "down") + "\n";
    return out;
}

std::string waveform_csv(const Waveform& w) {
    std::string out = "t_s,v_sw_V,i_sw_A,r_s_ohm,t_switch_K,t_sensor_K,phase\n";
    out.reserve(out.size() + w.samples.size() * 150);
    for (const auto& s : w.samples) {
        out += sci(s.t) + "," + sci(s.v_sw) + "," + sci(s.i_sw) + "," + sci(s.r_s) + "," + sci(s.t_switch) + "," +
               sci(s.t_sensor) + "," + phase_name(s.phase) + "\n";
    }
    return out;
}

std::string stats_csv(const PeriodStats& s) {
    return "T_s,T1_s,T2_s,n_cycles,is_oscillating\n" + sci(s.t_period) + "," + sci(s.t1) + "," + sci(s.t2) + "," +
           std::to_string(s.n_cycles) + "," + (s.is_oscillating ? "true" : "false") + "\n";
}

std::string sweep_csv(const SweepResult& r) {
    std::string out = "param_value,T_ns,T1_ns,T2_ns,n_cycles,is_oscillating\n";
    for (const auto& row : r.rows) {
        const auto& s = row.stats;
        out += sci(row.param_value) + ",";
        if (!row.error.empty()) {
            out += "nan,nan,nan,0,error\n";
            continue;
        }
        out += sci(s.t_period * 1e9) + "," + sci(s.t1 * 1e9) + "," + sci(s.t2 * 1e9) + "," +
               std::to_string(s.n_cycles) + "," + (s.is_oscillating ? "true" : "false") + "\n";
    }
    return out;
}

std::string loadline_csv(const std::vector<LoadlineRow>& rows) {
    std::string out = "r_l_ohm,v_sw_V,i_sw_A,branch\n";
    for (const auto& row : rows) {
        if (row.points.empty()) out += sci(row.r_l) + ",nan,nan,ndr_gap\n";
        for (const auto& p : row.points)
            out += sci(row.r_l) + "," + sci(p.v_sw) + "," + sci(p.i_sw) + "," + branch_name(p.branch) + "\n";
    }
    return out;
}

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

}  // namespace

std::string svg_plot(const std::vector<PlotSeries>& series, const std::string& title, const std::string& x_label,
                     const std::string& y_label, bool log_y) {
    const double W = 720, H = 480, ml = 80, mr = 20, mt = 40, mb = 60;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto ty = [&](double y) { return log_y ? std::log10(std::max(y, 1e-300)) : y; };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0)) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    if (!(x1 > x0)) x1 = x0 + 1, x0 -= 1;
    if (!(y1 > y0)) y1 = y0 + 1, y0 -= 1;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (ty(y) - y0) / (y1 - y0) * (H - mt - mb); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
                      "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n";
    out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(H - mb) + "\" x2=\"" + num(W - mr) + "\" y2=\"" + num(H - mb) +
           "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) + "\" y2=\"" + num(H - mb) +
           "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0;
        const double yv = y0 + (y1 - y0) * k / 4.0;
        const double yp = H - mb - (yv - y0) / (y1 - y0) * (H - mt - mb);
        out += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(H - mb + 16) + "\" text-anchor=\"middle\">" + num(xv) +
               "</text>\n";
        out += "<text x=\"" + num(ml - 6) + "\" y=\"" + num(yp + 4) + "\" text-anchor=\"end\">" +
               num(log_y ? std::pow(10.0, yv) : yv) + "</text>\n";
    }
    out += "<text x=\"" + num(W / 2) + "\" y=\"" + num(H - 16) + "\" text-anchor=\"middle\">" + x_label + "</text>\n";
    out += "<text x=\"16\" y=\"" + num(H / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + num(H / 2) +
           ")\">" + y_label + "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* col = colors[s % 5];
        out += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (!std::isfinite(series[s].y[i]) || (log_y && series[s].y[i] <= 0)) continue;
            out += num(px(series[s].x[i])) + "," + num(py(series[s].y[i])) + " ";
        }
        out += "\"/>\n";
        out += "<text x=\"" + num(W - mr - 4) + "\" y=\"" + num(mt + 14 * (s + 1)) + "\" text-anchor=\"end\" fill=\"" +
               col + "\">" + series[s].label + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace vo2osc
