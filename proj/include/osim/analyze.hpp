#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "osim/metrics.hpp"
#include "osim/telemetry.hpp"

namespace osim {

/// A run bundle re-read from disk. `states` is keyed by round (0 = initial).
struct BundleData {
    SimConfig config;
    Outcome outcome;
    int n = 0;
    std::vector<RoundRecord> rounds;
    std::map<int, std::vector<double>> states;
    std::vector<BroadcastMessage> messages;
};

/// Reads and cross-checks a bundle. Every consistency failure throws
/// BundleError naming the offending file: row counts, per-round alignment
/// counts and variance recomputed from states.csv (compared at the files'
/// 6-decimal precision), message/round agreement, and the recorded outcome
/// against a recount of the final snapshot.
BundleData read_bundle(const std::filesystem::path& dir);

/// Rebuilds telemetry from files only, so metrics computed downstream never
/// touch in-memory run state. Requires a stride-1 bundle for snapshots.
RunTelemetry telemetry_from_bundle(const BundleData& bundle);

struct AnalysisResult {
    AlignmentCounts final_counts;
    ResourceEfficiency efficiency;
    std::vector<std::optional<double>> resilience;  // empty when snapshots are strided
    std::vector<TemporalRow> temporal;
    std::vector<PolarizationRow> polarization;
};

AnalysisResult analyze_bundle(const BundleData& bundle);

std::string metrics_csv(const AnalysisResult& result);
std::string polarization_csv(const AnalysisResult& result);

}  // namespace osim
