#include "osim/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace osim {

std::vector<PolarizationRow> polarization_series(const RunTelemetry& telemetry) {
    std::vector<PolarizationRow> rows;
    rows.reserve(telemetry.rounds.size());
    for (const RoundRecord& rec : telemetry.rounds) {
        rows.push_back({rec.round, rec.n_red, rec.n_neutral, rec.n_blue, rec.var_opinion});
    }
    return rows;
}

ResourceEfficiency resource_efficiency(const RunTelemetry& telemetry, double delta) {
    std::int64_t initial_cents = 0;
    std::int64_t final_cents = 0;
    initial_cents = static_cast<std::int64_t>(
        std::llround(telemetry.config.economics.initial_energy * 100.0));
    final_cents = telemetry.rounds.empty() ? initial_cents
                                           : telemetry.rounds.back().blue_energy_cents;
    double spend = static_cast<double>(initial_cents - final_cents) / 100.0;

    AlignmentCounts initial = count_alignment(telemetry.initial_opinions, delta);
    int final_blue = telemetry.rounds.empty() ? initial.blue : telemetry.rounds.back().n_blue;
    int gain = final_blue - initial.blue;

    ResourceEfficiency out;
    out.degenerate = gain <= 0;
    out.value = spend / std::max(1, gain);
    return out;
}

namespace {

std::span<const double> snapshot_at(const RunTelemetry& telemetry, int round) {
    if (round == 0) return telemetry.initial_opinions;
    return telemetry.snapshots[static_cast<std::size_t>(round) - 1];
}

}  // namespace

std::vector<std::optional<double>> node_resilience(const RunTelemetry& telemetry, double delta) {
    const auto n = static_cast<std::size_t>(telemetry.n);
    std::vector<int> challenged(n, 0);
    std::vector<int> resisted(n, 0);
    for (const BroadcastMessage& msg : telemetry.messages) {
        if (msg.potency < 1) continue;
        Alignment broadcaster_class =
            msg.side == Side::Red ? Alignment::RedAligned : Alignment::BlueAligned;
        Alignment opposed_class =
            msg.side == Side::Red ? Alignment::BlueAligned : Alignment::RedAligned;
        std::span<const double> before = snapshot_at(telemetry, msg.round - 1);
        std::span<const double> after = snapshot_at(telemetry, msg.round);
        for (std::size_t i = 0; i < n; ++i) {
            if (classify_alignment(before[i], delta) != opposed_class) continue;
            ++challenged[i];
            if (classify_alignment(after[i], delta) != broadcaster_class) ++resisted[i];
        }
    }
    std::vector<std::optional<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (challenged[i] > 0) {
            out[i] = static_cast<double>(resisted[i]) / challenged[i];
        }
    }
    return out;
}

std::vector<TemporalRow> temporal_evolution(const RunTelemetry& telemetry) {
    std::vector<TemporalRow> rows;
    rows.reserve(telemetry.rounds.size());
    double prev_mean =
        std::accumulate(telemetry.initial_opinions.begin(), telemetry.initial_opinions.end(),
                        0.0) /
        std::max<std::size_t>(1, telemetry.initial_opinions.size());
    for (const RoundRecord& rec : telemetry.rounds) {
        TemporalRow row;
        row.round = rec.round;
        row.delta_mean = rec.mean_opinion - prev_mean;
        row.class_change_rate =
            static_cast<double>(rec.class_change_count) / std::max(1, telemetry.n);
        rows.push_back(row);
        prev_mean = rec.mean_opinion;
    }
    return rows;
}

}  // namespace osim
