#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <cmath>
#include <string>

#include "vo2osc/errors.hpp"

namespace vo2osc {

enum class Boundary { FixedAmbient, Adiabatic };
enum Edge { EdgeLeft = 0, EdgeRight = 1, EdgeBottom = 2, EdgeTop = 3 };

struct MaterialProps {
    double thermal_conductivity = 35.0;
    double density = 3980.0;
    double specific_heat = 760.0;

    double volumetric_heat_capacity() const { return density * specific_heat; }
    double diffusivity() const { return thermal_conductivity / volumetric_heat_capacity(); }
};

/// Half-open cell rectangle [x0, x1) x [y0, y1).
struct CellRect {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    int cells() const { return width() * height(); }
    bool overlaps(const CellRect& o) const { return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1; }
};

struct HeatSourceFootprint {
    CellRect switch_cells;
    CellRect sensor_cells;
    double d = 0.0;  ///< edge-to-edge separation actually realised on the grid
};

/// Places switch and sensor rectangles side by side along x, centred in the grid,
/// with the gap snapped to a whole number of cells.
HeatSourceFootprint make_footprint(int nx, int ny, double dx, double dy, double length, double width, double d);

template <typename Scalar>
struct ThermalGrid {
    using Field = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;  // (y, x)

    int nx = 0, ny = 0;
    double dx = 0, dy = 0;
    Field temperature;
    double effective_thickness = 1e-6;
    double ambient = 293.0;
    std::array<Boundary, 4> boundary{Boundary::FixedAmbient, Boundary::FixedAmbient, Boundary::FixedAmbient,
                                     Boundary::FixedAmbient};
    double out_of_plane_loss = 0.0;
    MaterialProps material;
    HeatSourceFootprint footprint;

    Field scratch;  // padded workspace reused across steps

    ThermalGrid() = default;
    ThermalGrid(int nx_, int ny_, double dx_, double dy_, double ambient_)
        : nx(nx_), ny(ny_), dx(dx_), dy(dy_), temperature(Field::Constant(ny_, nx_, Scalar(ambient_))),
          ambient(ambient_) {}

    double cell_volume() const { return dx * dy * effective_thickness; }
    double cell_heat_capacity() const { return material.volumetric_heat_capacity() * cell_volume(); }

    /// Largest explicit step that keeps the update a convex combination.
    double stable_dt() const {
        const double a = material.diffusivity();
        const double rate = 2.0 * a * (1.0 / (dx * dx) + 1.0 / (dy * dy)) +
                            out_of_plane_loss / (material.volumetric_heat_capacity() * effective_thickness);
        return 1.0 / rate;
    }

    void reset() { temperature.setConstant(Scalar(ambient)); }
};

/// Energies (J) exchanged during one explicit step.
struct StepLedger {
    double injected = 0.0;
    double boundary_loss = 0.0;
    double surface_loss = 0.0;
};

template <typename Scalar>
void check_rect(const ThermalGrid<Scalar>& g, const CellRect& r) {
    if (r.x0 < 0 || r.y0 < 0 || r.x1 > g.nx || r.y1 > g.ny || r.cells() <= 0)
        throw std::out_of_range("footprint outside grid");
}

template <typename Scalar>
Scalar probe_temperature(const ThermalGrid<Scalar>& g, const CellRect& r) {
    check_rect(g, r);
    return g.temperature.block(r.y0, r.x0, r.height(), r.width()).mean();
}

/// Heat content above ambient, rho*c*V*sum(T - ambient).
template <typename Scalar>
double thermal_energy(const ThermalGrid<Scalar>& g) {
    return g.cell_heat_capacity() * double((g.temperature - Scalar(g.ambient)).sum());
}

namespace detail {

// Same update as step_thermal but accepts signed powers, for coupling nodes that
// may draw heat back out of a footprint.
template <typename Scalar>
StepLedger step_thermal_signed(ThermalGrid<Scalar>& g, Scalar switch_power, Scalar sensor_power, Scalar dt) {
    if (!(dt > Scalar(0)) || double(dt) > g.stable_dt() * (1.0 + 1e-12))
        throw SolverError("step_thermal: dt " + std::to_string(double(dt)) + " violates stability bound " +
                          std::to_string(g.stable_dt()));

    const int nx = g.nx, ny = g.ny;
    const Scalar ta = Scalar(g.ambient);
    auto& T = g.temperature;
    auto& P = g.scratch;
    P.resize(ny + 2, nx + 2);
    P.block(1, 1, ny, nx) = T;
    // Ghost ring: ambient for fixed edges, mirrored interior for adiabatic ones.
    auto ghost_col = [&](int dst, int src, Edge e) {
        if (g.boundary[e] == Boundary::FixedAmbient)
            P.col(dst).segment(1, ny).setConstant(ta);
        else
            P.col(dst).segment(1, ny) = T.col(src);
    };
    auto ghost_row = [&](int dst, int src, Edge e) {
        if (g.boundary[e] == Boundary::FixedAmbient)
            P.row(dst).segment(1, nx).setConstant(ta);
        else
            P.row(dst).segment(1, nx) = T.row(src);
    };
    ghost_col(0, 0, EdgeLeft);
    ghost_col(nx + 1, nx - 1, EdgeRight);
    ghost_row(0, 0, EdgeBottom);
    ghost_row(ny + 1, ny - 1, EdgeTop);

    StepLedger led;
    const double cap = g.cell_heat_capacity();
    const double k = g.material.thermal_conductivity;
    const double th = g.effective_thickness;
    const double gx = k * g.dy * th / g.dx;  // edge conductances (W/K)
    const double gy = k * g.dx * th / g.dy;
    if (g.boundary[EdgeLeft] == Boundary::FixedAmbient) led.boundary_loss += gx * double((T.col(0) - ta).sum());
    if (g.boundary[EdgeRight] == Boundary::FixedAmbient) led.boundary_loss += gx * double((T.col(nx - 1) - ta).sum());
    if (g.boundary[EdgeBottom] == Boundary::FixedAmbient) led.boundary_loss += gy * double((T.row(0) - ta).sum());
    if (g.boundary[EdgeTop] == Boundary::FixedAmbient) led.boundary_loss += gy * double((T.row(ny - 1) - ta).sum());
    const double hA = g.out_of_plane_loss * g.dx * g.dy;

    const Scalar cx = Scalar(gx * double(dt) / cap);
    const Scalar cy = Scalar(gy * double(dt) / cap);
    const Scalar cl = Scalar(hA * double(dt) / cap);
    const Eigen::Index stride = P.outerStride();
    Scalar excess = Scalar(0);
    for (int x = 0; x < nx; ++x) {
        const Scalar* mid = P.data() + (x + 1) * stride + 1;
        const Scalar* left = mid - stride;
        const Scalar* right = mid + stride;
        Scalar* out = T.data() + Eigen::Index(x) * ny;
        // Difference form: every term vanishes exactly on a uniform ambient field.
        for (int y = 0; y < ny; ++y) {
            const Scalar m = mid[y];
            excess += m - ta;
            out[y] = m + cx * ((left[y] - m) + (right[y] - m)) + cy * ((mid[y - 1] - m) + (mid[y + 1] - m)) -
                     cl * (m - ta);
        }
    }
    led.surface_loss = hA * double(excess);

    auto deposit = [&](const CellRect& r, Scalar power) {
        if (power == Scalar(0)) return;
        check_rect(g, r);
        T.block(r.y0, r.x0, r.height(), r.width()) += power * dt / Scalar(cap * r.cells());
    };
    deposit(g.footprint.switch_cells, switch_power);
    deposit(g.footprint.sensor_cells, sensor_power);

    led.injected = double(switch_power + sensor_power) * double(dt);
    led.boundary_loss *= double(dt);
    led.surface_loss *= double(dt);
    return led;
}

}  // namespace detail

/// One forward-Euler step of rho*c*dT/dt = k*lap(T) + q/V - h*(T - Ta)/thickness,
/// each footprint's power spread uniformly over its cells.
template <typename Scalar>
StepLedger step_thermal(ThermalGrid<Scalar>& g, Scalar switch_power, Scalar sensor_power, Scalar dt) {
    if (switch_power < Scalar(0) || sensor_power < Scalar(0)) throw SolverError("step_thermal: negative power");
    return detail::step_thermal_signed(g, switch_power, sensor_power, dt);
}

/// Positive-definite operator G with G*(T - Ta) = injected power per cell (W).
template <typename Scalar>
Eigen::SparseMatrix<Scalar> conduction_matrix(const ThermalGrid<Scalar>& g) {
    const int nx = g.nx, ny = g.ny;
    const double th = g.effective_thickness;
    const double gx = g.material.thermal_conductivity * g.dy * th / g.dx;
    const double gy = g.material.thermal_conductivity * g.dx * th / g.dy;
    const double gl = g.out_of_plane_loss * g.dx * g.dy;
    auto id = [ny](int x, int y) { return x * ny + y; };
    std::vector<Eigen::Triplet<Scalar>> trip;
    trip.reserve(std::size_t(5) * nx * ny);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
            double diag = gl;
            auto link = [&](int xx, int yy, double gc, Edge e) {
                if (xx < 0 || xx >= nx || yy < 0 || yy >= ny) {
                    if (g.boundary[e] == Boundary::FixedAmbient) diag += gc;
                    return;
                }
                diag += gc;
                trip.emplace_back(id(x, y), id(xx, yy), Scalar(-gc));
            };
            link(x - 1, y, gx, EdgeLeft);
            link(x + 1, y, gx, EdgeRight);
            link(x, y - 1, gy, EdgeBottom);
            link(x, y + 1, gy, EdgeTop);
            trip.emplace_back(id(x, y), id(x, y), Scalar(diag));
        }
    Eigen::SparseMatrix<Scalar> G(nx * ny, nx * ny);
    G.setFromTriplets(trip.begin(), trip.end());
    return G;
}

/// Steady field under constant footprint powers, by a sparse Cholesky solve.
template <typename Scalar>
ThermalGrid<Scalar> steady_state_solve(const ThermalGrid<Scalar>& g, Scalar switch_power, Scalar sensor_power) {
    bool anchored = g.out_of_plane_loss > 0;
    for (auto b : g.boundary) anchored = anchored || b == Boundary::FixedAmbient;
    if (!anchored) throw SolverError("steady_state_solve: all edges adiabatic with zero loss has no steady state");

    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const int ny = g.ny;
    const auto G = conduction_matrix(g);
    Vec q = Vec::Zero(g.nx * g.ny);
    auto add = [&](const CellRect& r, Scalar power) {
        if (power == Scalar(0)) return;
        check_rect(g, r);
        const Scalar per = power / Scalar(r.cells());
        for (int x = r.x0; x < r.x1; ++x)
            for (int y = r.y0; y < r.y1; ++y) q(x * ny + y) += per;
    };
    add(g.footprint.switch_cells, switch_power);
    add(g.footprint.sensor_cells, sensor_power);

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<Scalar>> solver(G);
    if (solver.info() != Eigen::Success) throw SolverError("steady_state_solve: factorization failed");
    Vec u = solver.solve(q);
    const Scalar qn = q.norm();
    if (qn > Scalar(0) && double((G * u - q).norm() / qn) > 1e-8)
        throw SolverError("steady_state_solve: residual above tolerance");

    ThermalGrid<Scalar> out = g;
    out.temperature = Eigen::Map<const typename ThermalGrid<Scalar>::Field>(u.data(), g.ny, g.nx) + Scalar(g.ambient);
    return out;
}

/// Footprint-mean temperature rise per watt for power injected into the switch footprint.
template <typename Scalar>
double switch_thermal_resistance(const ThermalGrid<Scalar>& g) {
    const auto s = steady_state_solve(g, Scalar(1), Scalar(0));
    return double(probe_temperature(s, g.footprint.switch_cells)) - g.ambient;
}

std::string field_to_csv(const ThermalGrid<double>& g);

}  // namespace vo2osc
