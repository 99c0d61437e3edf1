#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osim/agents.hpp"
#include "osim/config.hpp"
#include "osim/net.hpp"
#include "osim/telemetry.hpp"

namespace osim {

enum class Alignment : int { RedAligned = 0, Neutral = 1, BlueAligned = 2 };

/// RedAligned iff x < 0.5 - delta; BlueAligned iff x > 0.5 + delta (both
/// strict); Neutral otherwise.
Alignment classify_alignment(double x, double delta);

struct AlignmentCounts {
    int red = 0;
    int neutral = 0;
    int blue = 0;
    int total() const { return red + neutral + blue; }
    friend bool operator==(const AlignmentCounts&, const AlignmentCounts&) = default;
};

AlignmentCounts count_alignment(std::span<const double> opinions, double delta);

/// Checked after each full round: a side wins with a strict majority
/// (count > majority_fraction * n); at the round cap with no winner the run
/// is a stalemate; otherwise the run continues.
std::optional<Outcome> check_termination(const AlignmentCounts& counts, int round,
                                         const TerminationConfig& term);

/// Mutable per-run state. Opinions evolve in full double precision; the
/// quantized vector is the 6-decimal export view used for every recorded
/// statistic and classification.
struct SimState {
    const OpinionNetwork* net = nullptr;
    SimConfig config;
    std::vector<double> opinions;
    std::vector<double> susceptibility;
    std::vector<double> epsilon;
    std::vector<double> quantized;
    std::vector<Alignment> prev_classes;
    std::int64_t blue_energy_cents = 0;
    std::int64_t initial_energy_cents = 0;
    std::int64_t cost_cents = 0;  // per unit potency
    std::array<std::optional<std::pair<std::string, int>>, 2> last_message;  // [red, blue]
    std::vector<std::string> rng_streams;
};

/// Validates the config, draws per-node opinion/susceptibility/epsilon from
/// the substreams "init.opinion", "init.susc", "init.eps", and funds Blue
/// with E0. Deterministic for a fixed (config, net).
SimState init_run(const SimConfig& config, const OpinionNetwork& net);

Observation make_observation(const SimState& state, int round, Side side);

struct RoundOutput {
    RoundRecord record;
    BroadcastMessage message;
    std::optional<FallbackEvent> fallback;
};

/// One full round, phases in fixed order:
///   1. broadcaster = Red on odd rounds, Blue on even;
///   2. the broadcaster acts on the current observation (BackendUnavailable
///      is caught here: the heuristic action substitutes, never an abort);
///   3. Blue only: potency is clamped to floor(energy / cost) and the cost
///      deducted (potency 0 = skip, no cost);
///   4. broadcast applied to every node in ascending id order;
///   5. peer sweep over the edges in a random permutation drawn from the
///      substream "round.{r}.edges", updates applied immediately;
///   6. statistics recorded from the post-sweep snapshot.
RoundOutput run_round(SimState& state, int round, Agent& red, Agent& blue);

class RunObserver {
public:
    virtual ~RunObserver() = default;
    virtual void on_init(std::span<const double> opinions) = 0;
    virtual void on_round(const RoundRecord& record, const BroadcastMessage& message,
                          std::span<const double> opinions) = 0;
};

/// Runs rounds 1..max_rounds until termination and returns full telemetry.
/// Deterministic given the seed and deterministic agents. The optional
/// observer sees each round as it completes (streaming export hangs off it).
RunTelemetry run_simulation(const SimConfig& config, const OpinionNetwork& net, Agent& red,
                            Agent& blue, RunObserver* observer = nullptr);

}  // namespace osim
