#include "osim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "osim/errors.hpp"
#include "osim/format.hpp"
#include "osim/rng.hpp"

namespace osim {

Alignment classify_alignment(double x, double delta) {
    if (x < 0.5 - delta) return Alignment::RedAligned;
    if (x > 0.5 + delta) return Alignment::BlueAligned;
    return Alignment::Neutral;
}

AlignmentCounts count_alignment(std::span<const double> opinions, double delta) {
    AlignmentCounts counts;
    for (double x : opinions) {
        switch (classify_alignment(x, delta)) {
            case Alignment::RedAligned: ++counts.red; break;
            case Alignment::Neutral: ++counts.neutral; break;
            case Alignment::BlueAligned: ++counts.blue; break;
        }
    }
    return counts;
}

std::optional<Outcome> check_termination(const AlignmentCounts& counts, int round,
                                         const TerminationConfig& term) {
    double threshold = term.majority_fraction * counts.total();
    if (counts.red > threshold) return Outcome{OutcomeKind::RedMajority, round};
    if (counts.blue > threshold) return Outcome{OutcomeKind::BlueMajority, round};
    if (round >= term.max_rounds) return Outcome{OutcomeKind::Stalemate, round};
    return std::nullopt;
}

namespace {

std::int64_t to_cents(double v) { return std::llround(v * 100.0); }

void refresh_quantized(SimState& state) {
    for (std::size_t i = 0; i < state.opinions.size(); ++i) {
        state.quantized[i] = quantize6(state.opinions[i]);
    }
}

std::vector<Alignment> classify_all(std::span<const double> opinions, double delta) {
    std::vector<Alignment> classes(opinions.size());
    for (std::size_t i = 0; i < opinions.size(); ++i) {
        classes[i] = classify_alignment(opinions[i], delta);
    }
    return classes;
}

double population_mean(std::span<const double> xs) {
    double sum = std::accumulate(xs.begin(), xs.end(), 0.0);
    return sum / static_cast<double>(xs.size());
}

double population_var(std::span<const double> xs, double mean) {
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(xs.size());
}

}  // namespace

SimState init_run(const SimConfig& config, const OpinionNetwork& net) {
    config.validate();
    if (net.node_count() == 0) throw ValidationError("net", "network must be nonempty");

    SimState state;
    state.net = &net;
    state.config = config;
    const auto n = static_cast<std::size_t>(net.node_count());
    state.opinions.resize(n);
    state.susceptibility.resize(n);
    state.epsilon.resize(n);
    state.quantized.resize(n);

    rng::Rng opinion_rng(rng::substream_seed(config.seed, "init.opinion"));
    rng::Rng susc_rng(rng::substream_seed(config.seed, "init.susc"));
    rng::Rng eps_rng(rng::substream_seed(config.seed, "init.eps"));
    for (std::size_t i = 0; i < n; ++i) state.opinions[i] = config.init.opinion.sample(opinion_rng);
    for (std::size_t i = 0; i < n; ++i) {
        state.susceptibility[i] = config.init.susceptibility.sample(susc_rng);
    }
    for (std::size_t i = 0; i < n; ++i) state.epsilon[i] = config.init.epsilon.sample(eps_rng);
    state.rng_streams = {"init.opinion", "init.susc", "init.eps"};

    refresh_quantized(state);
    state.prev_classes = classify_all(state.quantized, config.termination.neutral_band);
    state.initial_energy_cents = to_cents(config.economics.initial_energy);
    state.blue_energy_cents = state.initial_energy_cents;
    state.cost_cents = to_cents(config.economics.cost_coefficient);
    return state;
}

Observation make_observation(const SimState& state, int round, Side side) {
    Observation obs;
    obs.round = round;
    obs.topic = state.config.topic;
    obs.own_side = side;
    AlignmentCounts counts =
        count_alignment(state.quantized, state.config.termination.neutral_band);
    obs.n_red = counts.red;
    obs.n_neutral = counts.neutral;
    obs.n_blue = counts.blue;
    obs.mean_opinion = population_mean(state.quantized);
    if (side == Side::Blue) {
        obs.own_energy = static_cast<double>(state.blue_energy_cents) / 100.0;
    }
    obs.opponent_last_message = state.last_message[side == Side::Red ? 1 : 0];
    return obs;
}

RoundOutput run_round(SimState& state, int round, Agent& red, Agent& blue) {
    const SimConfig& cfg = state.config;
    const OpinionNetwork& net = *state.net;
    Side side = (round % 2 == 1) ? Side::Red : Side::Blue;
    Agent& actor = side == Side::Red ? red : blue;

    Observation obs = make_observation(state, round, side);
    AgentAction action;
    std::optional<FallbackEvent> fallback;
    try {
        action = actor.act(obs);
    } catch (const BackendUnavailable& e) {
        action = heuristic_policy(
            obs, {cfg.dynamics.p_max, cfg.economics.cost_coefficient});
        fallback = FallbackEvent{round, side, e.what()};
    }
    action.potency = std::clamp(action.potency, 0, cfg.dynamics.p_max);

    std::int64_t cost = 0;
    if (side == Side::Blue && action.potency > 0) {
        std::int64_t affordable = state.blue_energy_cents / state.cost_cents;
        action.potency = static_cast<int>(
            std::min<std::int64_t>(action.potency, affordable));
        cost = state.cost_cents * action.potency;
        state.blue_energy_cents -= cost;
    }
    if (action.potency == 0) action.text.clear();

    int accepted = 0, rejected = 0, backfired = 0;
    if (action.potency >= 1) {
        for (std::size_t i = 0; i < state.opinions.size(); ++i) {
            GreenNodeState node{state.opinions[i], state.susceptibility[i], state.epsilon[i]};
            BroadcastResult result = broadcast_update(node, side, action.potency, cfg.dynamics);
            state.opinions[i] = result.opinion;
            switch (result.effect) {
                case BroadcastEffect::Accepted: ++accepted; break;
                case BroadcastEffect::Rejected: ++rejected; break;
                case BroadcastEffect::Backfired: ++backfired; break;
            }
        }
        state.last_message[side == Side::Red ? 0 : 1] = {action.text, action.potency};
    }

    // Peer sweep: asynchronous updates in a seed-derived order.
    std::string stream_name = strprintf("round.%d.edges", round);
    rng::Rng sweep_rng(rng::substream_seed(cfg.seed, stream_name));
    state.rng_streams.push_back(stream_name);
    auto apply_edge = [&](const Edge& e) {
        if (cfg.peer_mode == PeerMode::Directed) {
            GreenNodeState receiver{state.opinions[e.dst], state.susceptibility[e.dst],
                                    state.epsilon[e.dst]};
            state.opinions[e.dst] =
                peer_update_directed(receiver, state.opinions[e.src], cfg.dynamics.mu);
        } else {
            // Symmetric classic mode: the pair gate uses the tighter of the
            // two bounds, which degenerates to the global bound when epsilon
            // is constant.
            double eps = std::min(state.epsilon[e.src], state.epsilon[e.dst]);
            auto [xi, xj] = peer_update_symmetric(state.opinions[e.src], state.opinions[e.dst],
                                                  eps, cfg.dynamics.mu);
            state.opinions[e.src] = xi;
            state.opinions[e.dst] = xj;
        }
    };
    const auto& edges = net.edges();
    if (!edges.empty()) {
        if (cfg.interaction.scheme == InteractionScheme::AllEdgesShuffled) {
            std::vector<std::uint32_t> order(edges.size());
            std::iota(order.begin(), order.end(), 0);
            sweep_rng.shuffle(order);
            for (std::uint32_t idx : order) apply_edge(edges[idx]);
        } else {
            for (int t = 0; t < cfg.interaction.sample_count; ++t) {
                apply_edge(edges[sweep_rng.below(edges.size())]);
            }
        }
    }

    refresh_quantized(state);
    std::vector<Alignment> classes =
        classify_all(state.quantized, cfg.termination.neutral_band);
    int changes = 0;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (classes[i] != state.prev_classes[i]) ++changes;
    }
    state.prev_classes = std::move(classes);

    AlignmentCounts counts = count_alignment(state.quantized, cfg.termination.neutral_band);
    double mean = population_mean(state.quantized);

    RoundRecord record;
    record.round = round;
    record.broadcaster = side;
    record.potency = action.potency;
    record.cost_cents = cost;
    record.blue_energy_cents = state.blue_energy_cents;
    record.n_red = counts.red;
    record.n_neutral = counts.neutral;
    record.n_blue = counts.blue;
    record.mean_opinion = mean;
    record.var_opinion = population_var(state.quantized, mean);
    record.accepted = accepted;
    record.rejected = rejected;
    record.backfired = backfired;
    record.class_change_count = changes;

    BroadcastMessage message{round, side,     action.potency, cost,
                             action.text, accepted, rejected,     backfired};
    return {std::move(record), std::move(message), std::move(fallback)};
}

RunTelemetry run_simulation(const SimConfig& config, const OpinionNetwork& net, Agent& red,
                            Agent& blue, RunObserver* observer) {
    SimState state = init_run(config, net);

    RunTelemetry telemetry;
    telemetry.config = config;
    telemetry.n = static_cast<int>(net.node_count());
    telemetry.edge_count = net.edge_count();
    telemetry.component_count = net.component_count();
    telemetry.initial_opinions = state.quantized;
    if (observer) observer->on_init(state.quantized);

    for (int round = 1; round <= config.termination.max_rounds; ++round) {
        RoundOutput output = run_round(state, round, red, blue);
        telemetry.rounds.push_back(output.record);
        telemetry.messages.push_back(output.message);
        if (output.fallback) telemetry.fallbacks.push_back(*output.fallback);
        telemetry.snapshots.push_back(state.quantized);
        if (observer) observer->on_round(output.record, output.message, state.quantized);

        AlignmentCounts counts{output.record.n_red, output.record.n_neutral,
                               output.record.n_blue};
        if (auto outcome = check_termination(counts, round, config.termination)) {
            telemetry.outcome = *outcome;
            break;
        }
    }
    telemetry.rng_streams = state.rng_streams;
    return telemetry;
}

}  // namespace osim
