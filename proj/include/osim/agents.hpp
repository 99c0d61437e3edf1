#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "osim/dynamics.hpp"
#include "osim/telemetry.hpp"

namespace osim {

/// What a broadcasting agent sees before acting: an aggregate of the network,
/// never per-node detail.
struct Observation {
    int round = 1;
    std::string topic;
    Side own_side = Side::Red;
    int n_red = 0;
    int n_neutral = 0;
    int n_blue = 0;
    double mean_opinion = 0.5;
    std::optional<double> own_energy;  // nullopt = unlimited (Red)
    std::optional<std::pair<std::string, int>> opponent_last_message;

    int n() const { return n_red + n_neutral + n_blue; }
};

struct AgentAction {
    std::string text;
    int potency = 0;  // 0 = skip this broadcast
    bool is_skip() const { return potency == 0; }
    friend bool operator==(const AgentAction&, const AgentAction&) = default;
};

class Agent {
public:
    virtual ~Agent() = default;
    virtual AgentAction act(const Observation& obs) = 0;
    virtual std::string_view kind() const = 0;
};

struct EconomicsView {
    int p_max = 10;
    double cost_coefficient = 1.0;
};

/// Deterministic baseline policy, also the fallback when a remote backend
/// fails. Potency is p_max scaled by the losing margin
///   max(0, (opponent_count - own_count) / n) + 0.3
/// rounded, clamped to [0, p_max] and to what the agent can afford.
AgentAction heuristic_policy(const Observation& obs, const EconomicsView& econ);

/// Plays back a fixed queue of actions in order; skips once exhausted.
class ScriptedAgent final : public Agent {
public:
    explicit ScriptedAgent(std::vector<AgentAction> script) : script_(std::move(script)) {}
    AgentAction act(const Observation& obs) override;
    std::string_view kind() const override { return "scripted"; }

private:
    std::vector<AgentAction> script_;
    std::size_t next_ = 0;
};

class HeuristicAgent final : public Agent {
public:
    explicit HeuristicAgent(EconomicsView econ) : econ_(econ) {}
    AgentAction act(const Observation& obs) override { return heuristic_policy(obs, econ_); }
    std::string_view kind() const override { return "heuristic"; }

private:
    EconomicsView econ_;
};

/// Replays one side of a recorded message log, keyed by round number (not by
/// call count), so a rerun with the same config reproduces the original run.
class TranscriptAgent final : public Agent {
public:
    TranscriptAgent(const std::vector<BroadcastMessage>& log, Side side);
    AgentAction act(const Observation& obs) override;
    std::string_view kind() const override { return "transcript"; }

private:
    std::map<int, AgentAction> by_round_;
};

}  // namespace osim
