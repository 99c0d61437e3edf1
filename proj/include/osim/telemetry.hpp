#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "osim/config.hpp"
#include "osim/dynamics.hpp"

namespace osim {

enum class OutcomeKind { RedMajority, BlueMajority, Stalemate };

constexpr std::string_view to_string(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::RedMajority: return "RedMajority";
        case OutcomeKind::BlueMajority: return "BlueMajority";
        default: return "Stalemate";
    }
}

struct Outcome {
    OutcomeKind kind = OutcomeKind::Stalemate;
    int at_round = 0;
    friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// One row of the per-round record. Monetary fields are integer cents so the
/// energy ledger is exact. Statistics (counts, mean, variance, class changes)
/// are computed over the 6-decimal export view of the opinions, which makes
/// them bit-reproducible from the exported state snapshots.
struct RoundRecord {
    int round = 0;
    Side broadcaster = Side::Red;
    int potency = 0;  // potency actually broadcast; 0 = skip
    std::int64_t cost_cents = 0;
    std::int64_t blue_energy_cents = 0;  // after this round's spend
    int n_red = 0;
    int n_neutral = 0;
    int n_blue = 0;
    double mean_opinion = 0.0;
    double var_opinion = 0.0;
    int accepted = 0;
    int rejected = 0;
    int backfired = 0;
    int class_change_count = 0;
    friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct BroadcastMessage {
    int round = 0;
    Side side = Side::Red;
    int potency = 0;  // 0 = skip round (empty text)
    std::int64_t cost_cents = 0;
    std::string text;
    int accepted = 0;
    int rejected = 0;
    int backfired = 0;
    friend bool operator==(const BroadcastMessage&, const BroadcastMessage&) = default;
};

/// A remote backend failed after retries and the heuristic action was
/// substituted for this round.
struct FallbackEvent {
    int round = 0;
    Side side = Side::Red;
    std::string reason;
    friend bool operator==(const FallbackEvent&, const FallbackEvent&) = default;
};

struct RunTelemetry {
    SimConfig config;
    int n = 0;
    std::size_t edge_count = 0;
    int component_count = 0;
    int duplicate_edge_warnings = 0;
    std::vector<double> initial_opinions;        // round 0 snapshot (export precision)
    std::vector<std::vector<double>> snapshots;  // snapshots[r-1] = end of round r
    std::vector<RoundRecord> rounds;
    std::vector<BroadcastMessage> messages;  // exactly one entry per executed round
    std::vector<FallbackEvent> fallbacks;
    std::vector<std::string> rng_streams;
    Outcome outcome;
};

}  // namespace osim
