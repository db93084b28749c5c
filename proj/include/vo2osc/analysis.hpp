#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vo2osc/circuit.hpp"

namespace vo2osc {

struct PeriodStats {
    double t_period = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;
    int n_cycles = 0;
    bool is_oscillating = false;
    double rsd = 0.0;  ///< relative standard deviation of the counted intervals
};

/// Period, conducting time and cooling time from rising crossings of I_sw through
/// `i_on_threshold`, with a re-arm deadband of 10% of the on-level. The first
/// detected cycle is discarded as startup transient.
PeriodStats extract_period_stats(const Waveform& w, double i_on_threshold);

/// As extract_period_stats, but a threshold the current never reaches yields a
/// non-oscillating result instead of an error.
PeriodStats analyze_waveform(const Waveform& w, double i_on_threshold);

/// Geometric mean of the on- and off-branch currents at the active hold and threshold voltages.
double default_cap_threshold(const CapacitorCircuitConfig& cfg);

/// Everything needed to reproduce one capacitorless run.
struct NocapScenario {
    CapacitorlessCircuitConfig circuit;
    ThermalGrid<double> grid;  ///< template; copied per run
    double d = 200e-9;
    double t_end = 1.5e-6;
    double dt = 0.05e-9;
    double i_on_threshold = 0.0;  ///< 0 selects the geometric mean of on/off levels

    double threshold() const;
    /// Grid reset to ambient with footprints placed for separation `d`.
    ThermalGrid<double> prepared_grid() const;
    Waveform run() const;
};

struct SweepRow {
    double param_value;
    PeriodStats stats;
    std::string error;  ///< empty on success
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

/// Runs `n` independent jobs on up to `jobs` threads; results keep input order.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body);

SweepResult sweep_distance(const NocapScenario& base, const std::vector<double>& d_values, int jobs = 1);
SweepResult sweep_ri(const NocapScenario& base, const std::vector<double>& ri_values, int jobs = 1);

}  // namespace vo2osc
