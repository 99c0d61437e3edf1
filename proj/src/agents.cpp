#include "osim/agents.hpp"

#include <algorithm>
#include <cmath>

#include "osim/format.hpp"

namespace osim {

AgentAction heuristic_policy(const Observation& obs, const EconomicsView& econ) {
    int n = std::max(1, obs.n());
    int own = obs.own_side == Side::Blue ? obs.n_blue : obs.n_red;
    int opp = obs.own_side == Side::Blue ? obs.n_red : obs.n_blue;
    double losing_margin = std::max(0.0, static_cast<double>(opp - own) / n) + 0.3;
    long potency = std::lround(econ.p_max * losing_margin);
    potency = std::clamp<long>(potency, 0, econ.p_max);
    if (obs.own_energy) {
        // +1e-9 keeps exact cent ratios (e.g. 0.30/0.10) from flooring low.
        auto affordable =
            static_cast<long>(std::floor(*obs.own_energy / econ.cost_coefficient + 1e-9));
        potency = std::min(potency, std::max(0L, affordable));
    }
    if (potency <= 0) return {"", 0};
    std::string text = strprintf("%s r%d on '%s': red=%d neutral=%d blue=%d",
                                 std::string(to_string(obs.own_side)).c_str(), obs.round,
                                 obs.topic.c_str(), obs.n_red, obs.n_neutral, obs.n_blue);
    return {std::move(text), static_cast<int>(potency)};
}

AgentAction ScriptedAgent::act(const Observation&) {
    if (next_ >= script_.size()) return {"", 0};
    return script_[next_++];
}

TranscriptAgent::TranscriptAgent(const std::vector<BroadcastMessage>& log, Side side) {
    for (const BroadcastMessage& m : log) {
        if (m.side == side) by_round_[m.round] = {m.text, m.potency};
    }
}

AgentAction TranscriptAgent::act(const Observation& obs) {
    if (by_round_.empty()) throw TranscriptExhausted();
    auto it = by_round_.find(obs.round);
    if (it == by_round_.end()) throw RoundMismatch(obs.round);
    return it->second;
}

}  // namespace osim
