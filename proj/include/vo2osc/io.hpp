#pragma once

#include <string>
#include <vector>

#include "vo2osc/analysis.hpp"
#include "vo2osc/circuit.hpp"
#include "vo2osc/devices.hpp"

namespace vo2osc {

/// Full-precision scientific notation.
std::string sci(double x);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

std::string iv_csv(const std::vector<IVPoint>& curve);
std::string waveform_csv(const Waveform& w);
std::string stats_csv(const PeriodStats& s);
std::string sweep_csv(const SweepResult& r);

struct LoadlineRow {
    double r_l;
    std::vector<OperatingPoint> points;
};
std::string loadline_csv(const std::vector<LoadlineRow>& rows);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal line plot: axes, tick labels and one polyline per series.
std::string svg_plot(const std::vector<PlotSeries>& series, const std::string& title, const std::string& x_label,
                     const std::string& y_label, bool log_y = false);

}  // namespace vo2osc
