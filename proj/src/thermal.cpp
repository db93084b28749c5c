#include "vo2osc/thermal.hpp"

#include <cmath>
#include <cstdio>

namespace vo2osc {

HeatSourceFootprint make_footprint(int nx, int ny, double dx, double dy, double length, double width, double d) {
    if (d < 0) throw ConfigError("footprint: separation d must be non-negative");
    const int w = std::max(1, int(std::lround(length / dx)));
    const int h = std::max(1, int(std::lround(width / dy)));
    const int gap = int(std::lround(d / dx));
    const int span = 2 * w + gap;
    if (span > nx - 2 || h > ny - 2)
        throw ConfigError("footprint: switch/sensor pair with d=" + std::to_string(d) + " does not fit the grid");
    HeatSourceFootprint fp;
    const int x0 = (nx - span) / 2;
    const int y0 = (ny - h) / 2;
    fp.switch_cells = {x0, y0, x0 + w, y0 + h};
    fp.sensor_cells = {x0 + w + gap, y0, x0 + 2 * w + gap, y0 + h};
    fp.d = gap * dx;
    return fp;
}

std::string field_to_csv(const ThermalGrid<double>& g) {
    std::string out;
    out.reserve(std::size_t(g.nx) * g.ny * 24);
    char buf[32];
    for (int y = 0; y < g.ny; ++y) {
        for (int x = 0; x < g.nx; ++x) {
            std::snprintf(buf, sizeof buf, "%.17e", g.temperature(y, x));
            if (x) out += ',';
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace vo2osc
