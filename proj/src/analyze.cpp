#include "osim/analyze.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "osim/errors.hpp"
#include "osim/format.hpp"
#include "osim/persist.hpp"

namespace osim {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path, const char* name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BundleError(name, "missing or unreadable");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return fields;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

double parse_double(const std::string& s, const char* file, std::size_t line) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty()) {
        throw BundleError(file, strprintf("line %zu: bad number '%s'", line, s.c_str()));
    }
    return v;
}

long long parse_int(const std::string& s, const char* file, std::size_t line) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw BundleError(file, strprintf("line %zu: bad integer '%s'", line, s.c_str()));
    }
    return v;
}

std::vector<RoundRecord> parse_rounds_csv(const std::string& text, int n) {
    auto lines = split_lines(text);
    if (lines.empty() ||
        lines[0] !=
            "round,broadcaster,potency,cost,blue_energy,n_red,n_neutral,n_blue,mean_opinion,"
            "var_opinion,accepted,rejected,backfired,class_change_rate") {
        throw BundleError("rounds.csv", "unexpected header");
    }
    std::vector<RoundRecord> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = split_csv(lines[i]);
        if (f.size() != 14) {
            throw BundleError("rounds.csv", strprintf("line %zu: expected 14 fields", i + 1));
        }
        RoundRecord r;
        r.round = static_cast<int>(parse_int(f[0], "rounds.csv", i + 1));
        if (f[1] == "red") {
            r.broadcaster = Side::Red;
        } else if (f[1] == "blue") {
            r.broadcaster = Side::Blue;
        } else {
            throw BundleError("rounds.csv", strprintf("line %zu: bad broadcaster", i + 1));
        }
        r.potency = static_cast<int>(parse_int(f[2], "rounds.csv", i + 1));
        r.cost_cents = std::llround(parse_double(f[3], "rounds.csv", i + 1) * 100.0);
        r.blue_energy_cents = std::llround(parse_double(f[4], "rounds.csv", i + 1) * 100.0);
        r.n_red = static_cast<int>(parse_int(f[5], "rounds.csv", i + 1));
        r.n_neutral = static_cast<int>(parse_int(f[6], "rounds.csv", i + 1));
        r.n_blue = static_cast<int>(parse_int(f[7], "rounds.csv", i + 1));
        r.mean_opinion = parse_double(f[8], "rounds.csv", i + 1);
        r.var_opinion = parse_double(f[9], "rounds.csv", i + 1);
        r.accepted = static_cast<int>(parse_int(f[10], "rounds.csv", i + 1));
        r.rejected = static_cast<int>(parse_int(f[11], "rounds.csv", i + 1));
        r.backfired = static_cast<int>(parse_int(f[12], "rounds.csv", i + 1));
        double rate = parse_double(f[13], "rounds.csv", i + 1);
        r.class_change_count = static_cast<int>(std::llround(rate * n));
        rows.push_back(r);
    }
    return rows;
}

std::map<int, std::vector<double>> parse_states_csv(const std::string& text) {
    auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "round,node_id,opinion") {
        throw BundleError("states.csv", "unexpected header");
    }
    std::map<int, std::vector<double>> states;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = split_csv(lines[i]);
        if (f.size() != 3) {
            throw BundleError("states.csv", strprintf("line %zu: expected 3 fields", i + 1));
        }
        int round = static_cast<int>(parse_int(f[0], "states.csv", i + 1));
        auto node = static_cast<std::size_t>(parse_int(f[1], "states.csv", i + 1));
        double opinion = parse_double(f[2], "states.csv", i + 1);
        auto& vec = states[round];
        if (node != vec.size()) {
            throw BundleError("states.csv",
                              strprintf("line %zu: node ids must be dense and ascending", i + 1));
        }
        vec.push_back(opinion);
    }
    if (!states.contains(0)) throw BundleError("states.csv", "missing round 0 snapshot");
    return states;
}

void cross_check(const BundleData& b, const json& run_json) {
    const int R = static_cast<int>(b.rounds.size());
    for (int i = 0; i < R; ++i) {
        if (b.rounds[static_cast<std::size_t>(i)].round != i + 1) {
            throw BundleError("rounds.csv", "round numbers must be consecutive from 1");
        }
    }
    if (b.outcome.at_round != R) {
        throw BundleError("run.json", "outcome round disagrees with rounds.csv row count");
    }
    if (run_json.at("graph").at("nodes").get<int>() != b.n) {
        throw BundleError("run.json", "graph.nodes disagrees with states.csv");
    }

    // Snapshot rounds must be a subset of {0..R} honoring the stride rule,
    // with round 0 and the final round always present.
    for (const auto& [round, opinions] : b.states) {
        if (round < 0 || round > R) {
            throw BundleError("states.csv", strprintf("snapshot for unknown round %d", round));
        }
        if (static_cast<int>(opinions.size()) != b.n) {
            throw BundleError("states.csv", strprintf("round %d snapshot truncated", round));
        }
        for (double x : opinions) {
            if (!(x >= 0.0 && x <= 1.0)) {
                throw BundleError("states.csv", strprintf("round %d opinion out of [0,1]", round));
            }
        }
    }
    if (R > 0 && !b.states.contains(R)) {
        throw BundleError("states.csv", "missing final round snapshot");
    }

    // Independent recount of counts and variance from the exported snapshots,
    // compared at the files' 6-decimal precision.
    double delta = b.config.termination.neutral_band;
    for (const auto& [round, opinions] : b.states) {
        if (round == 0) continue;
        const RoundRecord& rec = b.rounds[static_cast<std::size_t>(round) - 1];
        AlignmentCounts counts = count_alignment(opinions, delta);
        if (counts.red != rec.n_red || counts.neutral != rec.n_neutral ||
            counts.blue != rec.n_blue) {
            throw BundleError("states.csv",
                              strprintf("round %d alignment counts disagree with rounds.csv",
                                        round));
        }
        double sum = 0.0;
        for (double x : opinions) sum += x;
        double mean = sum / static_cast<double>(opinions.size());
        double acc = 0.0;
        for (double x : opinions) acc += (x - mean) * (x - mean);
        double var = acc / static_cast<double>(opinions.size());
        if (std::abs(quantize6(var) - rec.var_opinion) > 1e-9) {
            throw BundleError("states.csv",
                              strprintf("round %d variance disagrees with rounds.csv", round));
        }
        if (std::abs(quantize6(mean) - rec.mean_opinion) > 1e-9) {
            throw BundleError("states.csv",
                              strprintf("round %d mean disagrees with rounds.csv", round));
        }
    }

    // Message log agreement: one entry per round, matching the round rows.
    if (static_cast<int>(b.messages.size()) != R) {
        throw BundleError("messages.jsonl", "entry count disagrees with rounds.csv");
    }
    for (int i = 0; i < R; ++i) {
        const BroadcastMessage& m = b.messages[static_cast<std::size_t>(i)];
        const RoundRecord& rec = b.rounds[static_cast<std::size_t>(i)];
        if (m.round != rec.round || m.side != rec.broadcaster || m.potency != rec.potency ||
            m.cost_cents != rec.cost_cents || m.accepted != rec.accepted ||
            m.rejected != rec.rejected || m.backfired != rec.backfired) {
            throw BundleError("messages.jsonl",
                              strprintf("round %d entry disagrees with rounds.csv", rec.round));
        }
        if (m.potency == 0 && !m.text.empty()) {
            throw BundleError("messages.jsonl",
                              strprintf("round %d skip entry carries text", rec.round));
        }
    }

    // Outcome soundness: recount the final snapshot.
    if (R > 0) {
        AlignmentCounts final_counts = count_alignment(b.states.at(R), delta);
        auto recount = check_termination(final_counts, R, b.config.termination);
        OutcomeKind expected = recount ? recount->kind : OutcomeKind::Stalemate;
        // A run that stopped before max_rounds must have stopped for a majority.
        if (!recount && R < b.config.termination.max_rounds) {
            throw BundleError("run.json", "run stopped early without a majority");
        }
        if (recount && expected != b.outcome.kind) {
            throw BundleError("run.json", "outcome disagrees with final snapshot recount");
        }
    }
}

}  // namespace

BundleData read_bundle(const std::filesystem::path& dir) {
    BundleData bundle;

    std::string run_text = read_file(dir / "run.json", "run.json");
    json run_json = json::parse(run_text, nullptr, false);
    if (run_json.is_discarded() || !run_json.is_object()) {
        throw BundleError("run.json", "invalid JSON");
    }
    try {
        bundle.config = load_config(run_json.at("config").dump());
        std::string result = run_json.at("outcome").at("result").get<std::string>();
        if (result == "RedMajority") {
            bundle.outcome.kind = OutcomeKind::RedMajority;
        } else if (result == "BlueMajority") {
            bundle.outcome.kind = OutcomeKind::BlueMajority;
        } else if (result == "Stalemate") {
            bundle.outcome.kind = OutcomeKind::Stalemate;
        } else {
            throw BundleError("run.json", "unknown outcome result");
        }
        bundle.outcome.at_round = run_json.at("outcome").at("round").get<int>();
    } catch (const json::exception& e) {
        throw BundleError("run.json", e.what());
    } catch (const SimError& e) {
        throw BundleError("run.json", e.what());
    }

    bundle.states = parse_states_csv(read_file(dir / "states.csv", "states.csv"));
    bundle.n = static_cast<int>(bundle.states.at(0).size());
    bundle.rounds = parse_rounds_csv(read_file(dir / "rounds.csv", "rounds.csv"), bundle.n);
    try {
        bundle.messages =
            load_messages_jsonl(read_file(dir / "messages.jsonl", "messages.jsonl"));
    } catch (const ParseError& e) {
        throw BundleError("messages.jsonl", e.what());
    }

    cross_check(bundle, run_json);
    return bundle;
}

RunTelemetry telemetry_from_bundle(const BundleData& bundle) {
    RunTelemetry t;
    t.config = bundle.config;
    t.n = bundle.n;
    t.initial_opinions = bundle.states.at(0);
    t.rounds = bundle.rounds;
    t.messages = bundle.messages;
    t.outcome = bundle.outcome;
    for (int r = 1; r <= static_cast<int>(bundle.rounds.size()); ++r) {
        auto it = bundle.states.find(r);
        if (it == bundle.states.end()) {
            throw BundleError("states.csv",
                              strprintf("round %d snapshot absent (strided export)", r));
        }
        t.snapshots.push_back(it->second);
    }
    return t;
}

AnalysisResult analyze_bundle(const BundleData& bundle) {
    AnalysisResult result;
    double delta = bundle.config.termination.neutral_band;

    bool full_snapshots = true;
    for (int r = 1; r <= static_cast<int>(bundle.rounds.size()); ++r) {
        if (!bundle.states.contains(r)) {
            full_snapshots = false;
            break;
        }
    }

    RunTelemetry t;
    if (full_snapshots) {
        t = telemetry_from_bundle(bundle);
    } else {
        t.config = bundle.config;
        t.n = bundle.n;
        t.initial_opinions = bundle.states.at(0);
        t.rounds = bundle.rounds;
        t.messages = bundle.messages;
        t.outcome = bundle.outcome;
    }

    if (!bundle.rounds.empty()) {
        const RoundRecord& last = bundle.rounds.back();
        result.final_counts = {last.n_red, last.n_neutral, last.n_blue};
    } else {
        result.final_counts = count_alignment(bundle.states.at(0), delta);
    }
    result.efficiency = resource_efficiency(t, delta);
    if (full_snapshots) result.resilience = node_resilience(t, delta);
    result.temporal = temporal_evolution(t);
    result.polarization = polarization_series(t);
    return result;
}

std::string metrics_csv(const AnalysisResult& result) {
    std::string out = "metric,key,value\n";
    out += strprintf("alignment_distribution,n_red,%d\n", result.final_counts.red);
    out += strprintf("alignment_distribution,n_neutral,%d\n", result.final_counts.neutral);
    out += strprintf("alignment_distribution,n_blue,%d\n", result.final_counts.blue);
    out += "resource_efficiency,value," + fixed6(result.efficiency.value) + "\n";
    out += strprintf("resource_efficiency,degenerate,%d\n", result.efficiency.degenerate ? 1 : 0);
    for (std::size_t i = 0; i < result.resilience.size(); ++i) {
        out += strprintf("node_resilience,%zu,", i);
        if (result.resilience[i]) out += fixed6(*result.resilience[i]);
        out += "\n";
    }
    for (const TemporalRow& row : result.temporal) {
        out += strprintf("temporal_delta_mean,%d,", row.round) + fixed6(row.delta_mean) + "\n";
    }
    for (const TemporalRow& row : result.temporal) {
        out += strprintf("temporal_class_change_rate,%d,", row.round) +
               fixed6(row.class_change_rate) + "\n";
    }
    return out;
}

std::string polarization_csv(const AnalysisResult& result) {
    std::string out = "round,n_red,n_neutral,n_blue,var_opinion\n";
    for (const PolarizationRow& row : result.polarization) {
        out += strprintf("%d,%d,%d,%d,", row.round, row.n_red, row.n_neutral, row.n_blue) +
               fixed6(row.var_opinion) + "\n";
    }
    return out;
}

}  // namespace osim
