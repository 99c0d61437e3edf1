#pragma once

#include <optional>
#include <span>
#include <vector>

#include "osim/engine.hpp"
#include "osim/telemetry.hpp"

namespace osim {

struct PolarizationRow {
    int round = 0;
    int n_red = 0;
    int n_neutral = 0;
    int n_blue = 0;
    double var_opinion = 0.0;
};

/// Per-round alignment counts plus opinion variance, the plot-ready
/// polarization time series.
std::vector<PolarizationRow> polarization_series(const RunTelemetry& telemetry);

struct ResourceEfficiency {
    double value = 0.0;
    bool degenerate = false;  // set when blue gained no nodes; spend / 1 reported
};

/// Blue energy spent per net blue-aligned node gained over the whole run.
ResourceEfficiency resource_efficiency(const RunTelemetry& telemetry, double delta);

/// Per-node fraction of challenging broadcasts survived. A broadcast by side
/// A challenges node i when i's class before the round was A's opposite pole;
/// i resisted when its class after the round is still not A-aligned. Nodes
/// never challenged have no defined resilience.
std::vector<std::optional<double>> node_resilience(const RunTelemetry& telemetry, double delta);

struct TemporalRow {
    int round = 0;
    double delta_mean = 0.0;
    double class_change_rate = 0.0;
};

/// Round-over-round mean shift and class-change rate (round 1 measured
/// against the initial snapshot).
std::vector<TemporalRow> temporal_evolution(const RunTelemetry& telemetry);

}  // namespace osim
