// osim command-line front end: graph generation, run execution with
// interactive confirmation, and post-hoc bundle analysis.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "osim/agents.hpp"
#include "osim/analyze.hpp"
#include "osim/engine.hpp"
#include "osim/errors.hpp"
#include "osim/format.hpp"
#include "osim/llm_client.hpp"
#include "osim/net.hpp"
#include "osim/persist.hpp"
#include "osim/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitValidation = 2;
constexpr int kExitCredentials = 3;
constexpr int kExitBundle = 4;

std::string read_file_or_throw(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw osim::SimError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_or_throw(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw osim::SimError("cannot write " + path.string());
    out << content;
}

struct GeneratorFlags {
    std::string kind;
    std::uint32_t n = 0;
    double p = 0.1;
    int m = 2;
    int k = 4;
    double beta = 0.1;
    std::uint64_t seed = 0;
};

osim::OpinionNetwork build_from_flags(const GeneratorFlags& flags) {
    auto kind = osim::graph_kind_from_string(flags.kind);
    if (!kind) {
        throw osim::InvalidParams(
            "kind", "expected complete|erdos_renyi|barabasi_albert|watts_strogatz");
    }
    osim::GraphParams params;
    params.edge_prob = flags.p;
    params.attach_count = flags.m;
    params.ring_degree = flags.k;
    params.rewire_prob = flags.beta;
    return osim::generate_graph(*kind, params, flags.n, flags.seed);
}

int cmd_generate_graph(const GeneratorFlags& flags, const std::string& out_path) {
    osim::OpinionNetwork net = build_from_flags(flags);
    std::string header =
        osim::strprintf("osim graph kind=%s n=%u seed=%llu", flags.kind.c_str(), flags.n,
                        static_cast<unsigned long long>(flags.seed));
    write_file_or_throw(out_path, osim::to_edge_list(net, {header}));
    std::cout << "wrote " << net.edge_count() << " directed edges to " << out_path << "\n";
    return kExitOk;
}

osim::LlmBackendConfig load_llm_config(const fs::path& path, osim::Side side) {
    json j;
    try {
        j = json::parse(read_file_or_throw(path));
    } catch (const json::parse_error& e) {
        throw osim::ValidationError("llm", e.what());
    }
    if (!j.is_object()) throw osim::ValidationError("llm", "config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        static const std::set<std::string> allowed = {
            "endpoint_url", "model_name",      "api_key_env_var", "timeout_seconds",
            "max_retries",  "prompt_template", "temperature"};
        if (!allowed.contains(it.key())) {
            throw osim::ValidationError("llm." + it.key(), "unknown key");
        }
    }
    osim::LlmBackendConfig cfg;
    if (!j.contains("endpoint_url") || !j["endpoint_url"].is_string()) {
        throw osim::ValidationError("llm.endpoint_url", "required string");
    }
    cfg.endpoint_url = j["endpoint_url"].get<std::string>();
    if (!j.contains("model_name") || !j["model_name"].is_string()) {
        throw osim::ValidationError("llm.model_name", "required string");
    }
    cfg.model_name = j["model_name"].get<std::string>();
    if (j.contains("api_key_env_var")) {
        cfg.api_key_env_var = j["api_key_env_var"].get<std::string>();
    } else {
        cfg.api_key_env_var =
            side == osim::Side::Red ? "SIM_LLM_API_KEY_RED" : "SIM_LLM_API_KEY_BLUE";
    }
    if (j.contains("timeout_seconds")) cfg.timeout_seconds = j["timeout_seconds"].get<double>();
    if (j.contains("max_retries")) cfg.max_retries = j["max_retries"].get<int>();
    if (j.contains("prompt_template")) cfg.prompt_template = j["prompt_template"].get<std::string>();
    if (j.contains("temperature")) cfg.temperature = j["temperature"].get<double>();
    if (cfg.timeout_seconds <= 0) {
        throw osim::ValidationError("llm.timeout_seconds", "must be positive");
    }
    if (cfg.max_retries < 0 || cfg.max_retries > 5) {
        throw osim::ValidationError("llm.max_retries", "must be in [0, 5]");
    }
    return cfg;
}

std::vector<osim::AgentAction> load_script(const fs::path& path) {
    std::vector<osim::AgentAction> script;
    std::istringstream in(read_file_or_throw(path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("text") ||
            !j.contains("potency")) {
            throw osim::ParseError(line_no, "expected {\"text\": ..., \"potency\": ...}");
        }
        script.push_back({j["text"].get<std::string>(), j["potency"].get<int>()});
    }
    return script;
}

// Agent selection syntax: scripted:<path> | heuristic | transcript:<path> | llm:<config>.
std::unique_ptr<osim::Agent> build_agent(const std::string& spec, osim::Side side,
                                         const osim::SimConfig& config) {
    osim::EconomicsView econ{config.dynamics.p_max, config.economics.cost_coefficient};
    if (spec == "heuristic") return std::make_unique<osim::HeuristicAgent>(econ);
    auto colon = spec.find(':');
    std::string head = spec.substr(0, colon);
    std::string tail = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (head == "scripted") {
        return std::make_unique<osim::ScriptedAgent>(load_script(tail));
    }
    if (head == "transcript") {
        auto log = osim::load_messages_jsonl(read_file_or_throw(tail));
        return std::make_unique<osim::TranscriptAgent>(log, side);
    }
    if (head == "llm") {
        osim::LlmBackendConfig llm = load_llm_config(tail, side);
        std::string api_key;
        if (!llm.api_key_env_var.empty()) {
            const char* value = std::getenv(llm.api_key_env_var.c_str());
            if (value == nullptr) {
                throw osim::AuthMissing("environment variable " + llm.api_key_env_var +
                                        " is not set (needed by --" +
                                        std::string(osim::to_string(side)) + " " + spec + ")");
            }
            api_key = value;
        }
        return std::make_unique<osim::LlmAgent>(std::move(llm), config.dynamics.p_max,
                                                std::move(api_key));
    }
    throw osim::InvalidParams(std::string(osim::to_string(side)),
                              "expected scripted:<path>|heuristic|transcript:<path>|llm:<path>");
}

struct RunFlags {
    std::string config_path;
    std::string graph_path;
    GeneratorFlags gen;
    bool has_generator = false;
    std::string red_spec = "heuristic";
    std::string blue_spec = "heuristic";
    std::string out_dir;
    std::string topic;
    bool yes = false;
};

void print_settings(const osim::SimConfig& config, const osim::OpinionNetwork& net,
                    const RunFlags& flags) {
    std::cout << "settings:\n";
    std::cout << "  topic              " << (config.topic.empty() ? "(none)" : config.topic)
              << "\n";
    std::cout << "  nodes              " << net.node_count() << "\n";
    std::cout << "  edges              " << net.edge_count() << "\n";
    std::cout << "  seed               " << config.seed << "\n";
    std::cout << "  max rounds         " << config.termination.max_rounds << "\n";
    std::cout << "  neutral band       " << config.termination.neutral_band << "\n";
    std::cout << "  mu                 " << config.dynamics.mu << "\n";
    std::cout << "  p_max              " << config.dynamics.p_max << "\n";
    std::cout << "  blue energy        " << config.economics.initial_energy << "\n";
    std::cout << "  cost coefficient   " << config.economics.cost_coefficient << "\n";
    std::cout << "  peer mode          " << osim::to_string(config.peer_mode) << "\n";
    std::cout << "  red agent          " << flags.red_spec << "\n";
    std::cout << "  blue agent         " << flags.blue_spec << "\n";
}

int cmd_run(RunFlags flags) {
    osim::SimConfig config;
    if (!flags.config_path.empty()) {
        config = osim::load_config(read_file_or_throw(flags.config_path));
    }
    if (!flags.topic.empty()) config.topic = flags.topic;

    std::optional<osim::OpinionNetwork> net;
    int duplicate_warnings = 0;
    if (!flags.graph_path.empty()) {
        osim::LoadResult loaded = osim::load_edge_list(read_file_or_throw(flags.graph_path));
        duplicate_warnings = loaded.duplicates_collapsed;
        if (duplicate_warnings > 0) {
            std::cerr << "warning: collapsed " << duplicate_warnings << " duplicate edges\n";
        }
        net.emplace(std::move(loaded.network));
    } else if (flags.has_generator) {
        net.emplace(build_from_flags(flags.gen));
    } else {
        throw osim::InvalidParams("graph", "either --graph or --gen-kind is required");
    }

    // Backends resolve first so missing credentials fail before any prompt
    // or round executes.
    std::unique_ptr<osim::Agent> red = build_agent(flags.red_spec, osim::Side::Red, config);
    std::unique_ptr<osim::Agent> blue = build_agent(flags.blue_spec, osim::Side::Blue, config);

    print_settings(config, *net, flags);
    if (!flags.yes) {
        std::cout << "proceed? [y/N] " << std::flush;
        std::string reply;
        std::getline(std::cin, reply);
        if (reply != "y" && reply != "Y" && reply != "yes") {
            std::cout << "aborted\n";
            return kExitError;
        }
        if (config.topic.empty()) {
            std::cout << "topic: " << std::flush;
            std::string topic;
            std::getline(std::cin, topic);
            config.topic = topic;
        }
    }

    fs::create_directories(flags.out_dir);
    osim::StreamingBundleWriter writer(flags.out_dir, config);
    auto start = std::chrono::steady_clock::now();
    osim::RunTelemetry telemetry = osim::run_simulation(config, *net, *red, *blue, &writer);
    std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    telemetry.duplicate_edge_warnings = duplicate_warnings;
    writer.finalize(telemetry, elapsed.count());

    for (const osim::FallbackEvent& f : telemetry.fallbacks) {
        std::cerr << "warning: round " << f.round << " " << osim::to_string(f.side)
                  << " backend unavailable, heuristic substituted (" << f.reason << ")\n";
    }
    std::cout << "outcome=" << osim::to_string(telemetry.outcome.kind)
              << " round=" << telemetry.outcome.at_round << "\n";
    return kExitOk;
}

int cmd_analyze(const std::string& run_dir) {
    osim::BundleData bundle = osim::read_bundle(run_dir);
    osim::AnalysisResult result = osim::analyze_bundle(bundle);

    write_file_or_throw(fs::path(run_dir) / "metrics.csv", osim::metrics_csv(result));
    write_file_or_throw(fs::path(run_dir) / "polarization.csv",
                        osim::polarization_csv(result));

    std::cout << "alignment: red=" << result.final_counts.red
              << " neutral=" << result.final_counts.neutral
              << " blue=" << result.final_counts.blue << "\n";
    std::cout << "resource efficiency: " << osim::fixed6(result.efficiency.value)
              << (result.efficiency.degenerate ? " (degenerate: no blue gain)" : "") << "\n";
    int defined = 0;
    double sum = 0.0;
    for (const auto& r : result.resilience) {
        if (r) {
            ++defined;
            sum += *r;
        }
    }
    if (defined > 0) {
        std::cout << "mean node resilience: " << osim::fixed6(sum / defined) << " over "
                  << defined << " challenged nodes\n";
    } else {
        std::cout << "mean node resilience: undefined (no challenged nodes)\n";
    }
    if (!result.temporal.empty()) {
        const auto& last = result.temporal.back();
        std::cout << "final round delta_mean=" << osim::fixed6(last.delta_mean)
                  << " class_change_rate=" << osim::fixed6(last.class_change_rate) << "\n";
    }
    std::cout << "wrote metrics.csv and polarization.csv\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adversarial opinion-dynamics simulator"};
    app.set_version_flag("--version", osim::kVersion);
    app.require_subcommand(1);

    // generate-graph
    auto* gen_cmd = app.add_subcommand("generate-graph", "Generate a network edge list");
    GeneratorFlags gen_flags;
    std::string gen_out;
    gen_cmd->add_option("--kind", gen_flags.kind,
                        "complete|erdos_renyi|barabasi_albert|watts_strogatz")
        ->required();
    gen_cmd->add_option("--n", gen_flags.n, "node count")->required();
    gen_cmd->add_option("--p", gen_flags.p, "erdos_renyi edge probability");
    gen_cmd->add_option("--m", gen_flags.m, "barabasi_albert attachment count");
    gen_cmd->add_option("--k", gen_flags.k, "watts_strogatz ring degree (even)");
    gen_cmd->add_option("--beta", gen_flags.beta, "watts_strogatz rewire probability");
    gen_cmd->add_option("--seed", gen_flags.seed, "generator seed");
    gen_cmd->add_option("--out", gen_out, "output edge-list path")->required();

    // run
    auto* run_cmd = app.add_subcommand("run", "Execute a simulation run");
    RunFlags run_flags;
    run_cmd->add_option("--config", run_flags.config_path, "JSON config path");
    run_cmd->add_option("--graph", run_flags.graph_path, "edge-list path");
    auto* gk = run_cmd->add_option("--gen-kind", run_flags.gen.kind, "generate graph instead");
    run_cmd->add_option("--gen-n", run_flags.gen.n, "generated node count");
    run_cmd->add_option("--gen-p", run_flags.gen.p, "generated edge probability");
    run_cmd->add_option("--gen-m", run_flags.gen.m, "generated attachment count");
    run_cmd->add_option("--gen-k", run_flags.gen.k, "generated ring degree");
    run_cmd->add_option("--gen-beta", run_flags.gen.beta, "generated rewire probability");
    auto* gs = run_cmd->add_option("--gen-seed", run_flags.gen.seed,
                                   "generator seed (default: config seed)");
    run_cmd->add_option("--red", run_flags.red_spec, "red backend")->required();
    run_cmd->add_option("--blue", run_flags.blue_spec, "blue backend")->required();
    run_cmd->add_option("--out", run_flags.out_dir, "output bundle directory")->required();
    run_cmd->add_option("--topic", run_flags.topic, "topic (overrides config)");
    run_cmd->add_flag("--yes", run_flags.yes, "skip interactive confirmation");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "Recompute metrics from a run bundle");
    std::string run_dir;
    analyze_cmd->add_option("--run", run_dir, "run bundle directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (gen_cmd->parsed()) return cmd_generate_graph(gen_flags, gen_out);
        if (run_cmd->parsed()) {
            run_flags.has_generator = gk->count() > 0;
            if (run_flags.has_generator && gs->count() == 0) {
                // Default the generator seed to the config seed for one-flag runs.
                osim::SimConfig cfg;
                if (!run_flags.config_path.empty()) {
                    cfg = osim::load_config(read_file_or_throw(run_flags.config_path));
                }
                run_flags.gen.seed = cfg.seed;
            }
            return cmd_run(std::move(run_flags));
        }
        if (analyze_cmd->parsed()) return cmd_analyze(run_dir);
    } catch (const osim::AuthMissing& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCredentials;
    } catch (const osim::BundleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBundle;
    } catch (const osim::InvalidParams& e) {
        std::cerr << "error: --" << e.param() << ": "
                  << (e.what() + e.param().size() + 2) << "\n";
        return kExitValidation;
    } catch (const osim::SimError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitOk;
}
