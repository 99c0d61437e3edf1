#include "osim/persist.hpp"

#include <set>
#include <utility>

#include "json.hpp"

#include "osim/errors.hpp"
#include "osim/format.hpp"
#include "osim/version.hpp"

namespace osim {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join_path(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown_keys(const json& j, const std::string& prefix,
                         const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.contains(it.key())) {
            throw ValidationError(join_path(prefix, it.key()), "unknown key");
        }
    }
}

const json* maybe(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ValidationError(path, "expected a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ValidationError(path, "expected an integer");
    return j.get<int>();
}

bool get_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ValidationError(path, "expected a boolean");
    return j.get<bool>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ValidationError(path, "expected a string");
    return j.get<std::string>();
}

DistConfig parse_dist(const json& j, const std::string& path) {
    if (!j.is_object()) throw ValidationError(path, "expected an object");
    const json* kind = maybe(j, "dist");
    if (!kind) throw ValidationError(join_path(path, "dist"), "missing");
    std::string name = get_string(*kind, join_path(path, "dist"));
    if (name == "constant") {
        reject_unknown_keys(j, path, {"dist", "value"});
        const json* v = maybe(j, "value");
        if (!v) throw ValidationError(join_path(path, "value"), "missing");
        return DistConfig::constant(get_number(*v, join_path(path, "value")));
    }
    if (name == "uniform") {
        reject_unknown_keys(j, path, {"dist", "lo", "hi"});
        const json* lo = maybe(j, "lo");
        const json* hi = maybe(j, "hi");
        if (!lo) throw ValidationError(join_path(path, "lo"), "missing");
        if (!hi) throw ValidationError(join_path(path, "hi"), "missing");
        return DistConfig::uniform(get_number(*lo, join_path(path, "lo")),
                                   get_number(*hi, join_path(path, "hi")));
    }
    if (name == "bimodal") {
        reject_unknown_keys(j, path, {"dist", "lo", "hi", "fraction"});
        const json* lo = maybe(j, "lo");
        const json* hi = maybe(j, "hi");
        const json* fr = maybe(j, "fraction");
        if (!lo) throw ValidationError(join_path(path, "lo"), "missing");
        if (!hi) throw ValidationError(join_path(path, "hi"), "missing");
        if (!fr) throw ValidationError(join_path(path, "fraction"), "missing");
        return DistConfig::bimodal(get_number(*lo, join_path(path, "lo")),
                                   get_number(*hi, join_path(path, "hi")),
                                   get_number(*fr, join_path(path, "fraction")));
    }
    if (name == "beta") {
        reject_unknown_keys(j, path, {"dist", "alpha", "beta"});
        const json* a = maybe(j, "alpha");
        const json* b = maybe(j, "beta");
        if (!a) throw ValidationError(join_path(path, "alpha"), "missing");
        if (!b) throw ValidationError(join_path(path, "beta"), "missing");
        return DistConfig::beta_dist(get_number(*a, join_path(path, "alpha")),
                                     get_number(*b, join_path(path, "beta")));
    }
    throw ValidationError(join_path(path, "dist"),
                          "expected one of constant|uniform|bimodal|beta");
}

ordered_json dist_to_json(const DistConfig& d) {
    switch (d.kind) {
        case DistKind::Constant: return {{"dist", "constant"}, {"value", d.value}};
        case DistKind::Uniform: return {{"dist", "uniform"}, {"lo", d.lo}, {"hi", d.hi}};
        case DistKind::Bimodal:
            return {{"dist", "bimodal"}, {"lo", d.lo}, {"hi", d.hi}, {"fraction", d.fraction}};
        default: return {{"dist", "beta"}, {"alpha", d.alpha}, {"beta", d.beta}};
    }
}

}  // namespace

SimConfig load_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(static_cast<std::size_t>(e.byte), e.what());
    }
    if (!root.is_object()) throw ValidationError("", "config must be a JSON object");

    SimConfig cfg;
    reject_unknown_keys(root, "",
                        {"seed", "topic", "dynamics", "economics", "termination", "peer_mode",
                         "interaction", "init", "snapshot_stride", "both_per_round"});

    if (const json* j = maybe(root, "seed")) {
        if (!j->is_number_integer() && !j->is_number_unsigned()) {
            throw ValidationError("seed", "expected an integer");
        }
        cfg.seed = j->get<std::uint64_t>();
    }
    if (const json* j = maybe(root, "topic")) cfg.topic = get_string(*j, "topic");

    if (const json* j = maybe(root, "dynamics")) {
        if (!j->is_object()) throw ValidationError("dynamics", "expected an object");
        reject_unknown_keys(*j, "dynamics",
                            {"mu", "p_max", "backfire_threshold", "backfire_strength",
                             "backfire_applies_to_blue"});
        if (const json* f = maybe(*j, "mu")) cfg.dynamics.mu = get_number(*f, "dynamics.mu");
        if (const json* f = maybe(*j, "p_max")) {
            cfg.dynamics.p_max = get_int(*f, "dynamics.p_max");
        }
        if (const json* f = maybe(*j, "backfire_threshold")) {
            cfg.dynamics.backfire_threshold = get_int(*f, "dynamics.backfire_threshold");
        }
        if (const json* f = maybe(*j, "backfire_strength")) {
            cfg.dynamics.backfire_strength = get_number(*f, "dynamics.backfire_strength");
        }
        if (const json* f = maybe(*j, "backfire_applies_to_blue")) {
            cfg.dynamics.backfire_applies_to_blue =
                get_bool(*f, "dynamics.backfire_applies_to_blue");
        }
    }

    if (const json* j = maybe(root, "economics")) {
        if (!j->is_object()) throw ValidationError("economics", "expected an object");
        reject_unknown_keys(*j, "economics", {"initial_energy", "cost_coefficient"});
        if (const json* f = maybe(*j, "initial_energy")) {
            cfg.economics.initial_energy = get_number(*f, "economics.initial_energy");
        }
        if (const json* f = maybe(*j, "cost_coefficient")) {
            cfg.economics.cost_coefficient = get_number(*f, "economics.cost_coefficient");
        }
    }

    if (const json* j = maybe(root, "termination")) {
        if (!j->is_object()) throw ValidationError("termination", "expected an object");
        reject_unknown_keys(*j, "termination",
                            {"max_rounds", "majority_fraction", "neutral_band"});
        if (const json* f = maybe(*j, "max_rounds")) {
            cfg.termination.max_rounds = get_int(*f, "termination.max_rounds");
        }
        if (const json* f = maybe(*j, "majority_fraction")) {
            cfg.termination.majority_fraction = get_number(*f, "termination.majority_fraction");
        }
        if (const json* f = maybe(*j, "neutral_band")) {
            cfg.termination.neutral_band = get_number(*f, "termination.neutral_band");
        }
    }

    if (const json* j = maybe(root, "peer_mode")) {
        std::string mode = get_string(*j, "peer_mode");
        if (mode == "directed") {
            cfg.peer_mode = PeerMode::Directed;
        } else if (mode == "symmetric") {
            cfg.peer_mode = PeerMode::Symmetric;
        } else {
            throw ValidationError("peer_mode", "expected directed|symmetric");
        }
    }

    if (const json* j = maybe(root, "interaction")) {
        if (!j->is_object()) throw ValidationError("interaction", "expected an object");
        reject_unknown_keys(*j, "interaction", {"scheme", "sample_count"});
        const json* scheme = maybe(*j, "scheme");
        if (!scheme) throw ValidationError("interaction.scheme", "missing");
        std::string name = get_string(*scheme, "interaction.scheme");
        if (name == "all_edges_shuffled") {
            cfg.interaction.scheme = InteractionScheme::AllEdgesShuffled;
            reject_unknown_keys(*j, "interaction", {"scheme"});
        } else if (name == "sampled_edges") {
            cfg.interaction.scheme = InteractionScheme::SampledEdges;
            const json* count = maybe(*j, "sample_count");
            if (!count) throw ValidationError("interaction.sample_count", "missing");
            cfg.interaction.sample_count = get_int(*count, "interaction.sample_count");
        } else {
            throw ValidationError("interaction.scheme",
                                  "expected all_edges_shuffled|sampled_edges");
        }
    }

    if (const json* j = maybe(root, "init")) {
        if (!j->is_object()) throw ValidationError("init", "expected an object");
        reject_unknown_keys(*j, "init", {"opinion", "susceptibility", "epsilon"});
        if (const json* f = maybe(*j, "opinion")) cfg.init.opinion = parse_dist(*f, "init.opinion");
        if (const json* f = maybe(*j, "susceptibility")) {
            cfg.init.susceptibility = parse_dist(*f, "init.susceptibility");
        }
        if (const json* f = maybe(*j, "epsilon")) cfg.init.epsilon = parse_dist(*f, "init.epsilon");
    }

    if (const json* j = maybe(root, "snapshot_stride")) {
        cfg.snapshot_stride = get_int(*j, "snapshot_stride");
    }
    if (const json* j = maybe(root, "both_per_round")) {
        cfg.both_per_round = get_bool(*j, "both_per_round");
    }

    cfg.validate();
    return cfg;
}

std::string config_to_json(const SimConfig& c) {
    ordered_json j;
    j["seed"] = c.seed;
    j["topic"] = c.topic;
    j["dynamics"] = {{"mu", c.dynamics.mu},
                     {"p_max", c.dynamics.p_max},
                     {"backfire_threshold", c.dynamics.backfire_threshold},
                     {"backfire_strength", c.dynamics.backfire_strength},
                     {"backfire_applies_to_blue", c.dynamics.backfire_applies_to_blue}};
    j["economics"] = {{"initial_energy", c.economics.initial_energy},
                      {"cost_coefficient", c.economics.cost_coefficient}};
    j["termination"] = {{"max_rounds", c.termination.max_rounds},
                        {"majority_fraction", c.termination.majority_fraction},
                        {"neutral_band", c.termination.neutral_band}};
    j["peer_mode"] = std::string(to_string(c.peer_mode));
    if (c.interaction.scheme == InteractionScheme::AllEdgesShuffled) {
        j["interaction"] = {{"scheme", "all_edges_shuffled"}};
    } else {
        j["interaction"] = {{"scheme", "sampled_edges"},
                            {"sample_count", c.interaction.sample_count}};
    }
    j["init"] = {{"opinion", dist_to_json(c.init.opinion)},
                 {"susceptibility", dist_to_json(c.init.susceptibility)},
                 {"epsilon", dist_to_json(c.init.epsilon)}};
    j["snapshot_stride"] = c.snapshot_stride;
    j["both_per_round"] = c.both_per_round;
    return j.dump(2) + "\n";
}

namespace {

constexpr const char* kRoundsHeader =
    "round,broadcaster,potency,cost,blue_energy,n_red,n_neutral,n_blue,mean_opinion,"
    "var_opinion,accepted,rejected,backfired,class_change_rate\n";

constexpr const char* kStatesHeader = "round,node_id,opinion\n";

std::string rounds_csv_row(const RoundRecord& r, int n) {
    std::string row;
    row += std::to_string(r.round);
    row += ',';
    row += to_string(r.broadcaster);
    row += ',';
    row += std::to_string(r.potency);
    row += ',';
    row += cents_to_string(r.cost_cents);
    row += ',';
    row += fixed6(static_cast<double>(r.blue_energy_cents) / 100.0);
    row += ',';
    row += std::to_string(r.n_red);
    row += ',';
    row += std::to_string(r.n_neutral);
    row += ',';
    row += std::to_string(r.n_blue);
    row += ',';
    row += fixed6(r.mean_opinion);
    row += ',';
    row += fixed6(r.var_opinion);
    row += ',';
    row += std::to_string(r.accepted);
    row += ',';
    row += std::to_string(r.rejected);
    row += ',';
    row += std::to_string(r.backfired);
    row += ',';
    row += fixed6(static_cast<double>(r.class_change_count) / std::max(1, n));
    row += '\n';
    return row;
}

json cost_to_json(std::int64_t cents) {
    if (cents % 100 == 0) return cents / 100;
    return static_cast<double>(cents) / 100.0;
}

std::string message_jsonl_line(const BroadcastMessage& m) {
    ordered_json j;
    j["round"] = m.round;
    j["side"] = std::string(to_string(m.side));
    j["potency"] = m.potency;
    j["cost"] = cost_to_json(m.cost_cents);
    j["text"] = m.text;
    j["accepted"] = m.accepted;
    j["rejected"] = m.rejected;
    j["backfired"] = m.backfired;
    return j.dump() + "\n";
}

std::string states_csv_rows(int round, std::span<const double> opinions) {
    std::string out;
    for (std::size_t i = 0; i < opinions.size(); ++i) {
        out += std::to_string(round);
        out += ',';
        out += std::to_string(i);
        out += ',';
        out += fixed6(opinions[i]);
        out += '\n';
    }
    return out;
}

bool snapshot_exported(int round, int stride, int final_round) {
    return round % stride == 0 || round == final_round;
}

}  // namespace

std::string export_rounds_csv(const RunTelemetry& telemetry) {
    std::string out = kRoundsHeader;
    for (const RoundRecord& r : telemetry.rounds) out += rounds_csv_row(r, telemetry.n);
    return out;
}

std::string export_messages_jsonl(const RunTelemetry& telemetry) {
    std::string out;
    for (const BroadcastMessage& m : telemetry.messages) out += message_jsonl_line(m);
    return out;
}

std::string export_states_csv(const RunTelemetry& telemetry) {
    std::string out = kStatesHeader;
    out += states_csv_rows(0, telemetry.initial_opinions);
    int final_round = static_cast<int>(telemetry.snapshots.size());
    for (int round = 1; round <= final_round; ++round) {
        if (snapshot_exported(round, telemetry.config.snapshot_stride, final_round)) {
            out += states_csv_rows(round, telemetry.snapshots[static_cast<std::size_t>(round) - 1]);
        }
    }
    return out;
}

std::string export_run_json(const RunTelemetry& telemetry, double duration_seconds) {
    ordered_json j;
    j["tool"] = {{"name", kToolName}, {"version", kVersion}};
    j["outcome"] = {{"result", std::string(to_string(telemetry.outcome.kind))},
                    {"round", telemetry.outcome.at_round}};
    j["rounds_executed"] = telemetry.rounds.size();
    j["graph"] = {{"nodes", telemetry.n},
                  {"edges", telemetry.edge_count},
                  {"components", telemetry.component_count}};
    j["warnings"] = {{"duplicate_edges_collapsed", telemetry.duplicate_edge_warnings}};
    ordered_json fallbacks = ordered_json::array();
    for (const FallbackEvent& f : telemetry.fallbacks) {
        fallbacks.push_back({{"round", f.round},
                             {"side", std::string(to_string(f.side))},
                             {"reason", f.reason}});
    }
    j["fallbacks"] = fallbacks;
    j["rng_streams"] = telemetry.rng_streams;
    j["duration_seconds"] = duration_seconds;
    j["config"] = ordered_json::parse(config_to_json(telemetry.config));
    return j.dump(2) + "\n";
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimError("cannot open " + path.string() + " for writing");
    out << content;
}

}  // namespace

void write_run_bundle(const RunTelemetry& telemetry, const std::filesystem::path& dir,
                      double duration_seconds) {
    std::filesystem::create_directories(dir);
    write_file(dir / "rounds.csv", export_rounds_csv(telemetry));
    write_file(dir / "messages.jsonl", export_messages_jsonl(telemetry));
    write_file(dir / "states.csv", export_states_csv(telemetry));
    write_file(dir / "run.json", export_run_json(telemetry, duration_seconds));
}

std::vector<BroadcastMessage> load_messages_jsonl(const std::string& text) {
    std::vector<BroadcastMessage> out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? text.size() - pos
                                                                    : nl - pos);
        pos = nl == std::string::npos ? text.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw ParseError(line_no, "invalid JSON message line");
        }
        BroadcastMessage m;
        try {
            m.round = j.at("round").get<int>();
            std::string side = j.at("side").get<std::string>();
            if (side == "red") {
                m.side = Side::Red;
            } else if (side == "blue") {
                m.side = Side::Blue;
            } else {
                throw ParseError(line_no, "side must be red|blue");
            }
            m.potency = j.at("potency").get<int>();
            m.cost_cents = std::llround(j.at("cost").get<double>() * 100.0);
            m.text = j.at("text").get<std::string>();
            m.accepted = j.value("accepted", 0);
            m.rejected = j.value("rejected", 0);
            m.backfired = j.value("backfired", 0);
        } catch (const json::exception& e) {
            throw ParseError(line_no, e.what());
        }
        out.push_back(std::move(m));
    }
    return out;
}

StreamingBundleWriter::StreamingBundleWriter(std::filesystem::path dir, const SimConfig& config)
    : dir_(std::move(dir)), stride_(config.snapshot_stride) {
    std::filesystem::create_directories(dir_);
    rounds_.open(dir_ / "rounds.csv", std::ios::binary);
    messages_.open(dir_ / "messages.jsonl", std::ios::binary);
    states_.open(dir_ / "states.csv", std::ios::binary);
    if (!rounds_ || !messages_ || !states_) {
        throw SimError("cannot open bundle files in " + dir_.string());
    }
    rounds_ << kRoundsHeader;
    states_ << kStatesHeader;
}

void StreamingBundleWriter::write_states_rows(int round, std::span<const double> opinions) {
    states_ << states_csv_rows(round, opinions);
}

void StreamingBundleWriter::on_init(std::span<const double> opinions) {
    write_states_rows(0, opinions);
}

void StreamingBundleWriter::on_round(const RoundRecord& record, const BroadcastMessage& message,
                                     std::span<const double> opinions) {
    n_ = static_cast<int>(opinions.size());
    rounds_ << rounds_csv_row(record, n_);
    messages_ << message_jsonl_line(message);
    last_round_ = record.round;
    if (record.round % stride_ == 0) {
        write_states_rows(record.round, opinions);
        last_round_written_ = true;
    } else {
        pending_snapshot_.assign(opinions.begin(), opinions.end());
        last_round_written_ = false;
    }
}

void StreamingBundleWriter::finalize(const RunTelemetry& telemetry, double duration_seconds) {
    if (!last_round_written_ && last_round_ > 0) {
        write_states_rows(last_round_, pending_snapshot_);
    }
    rounds_.close();
    messages_.close();
    states_.close();
    write_file(dir_ / "run.json", export_run_json(telemetry, duration_seconds));
}

}  // namespace osim
