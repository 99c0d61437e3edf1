#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "osim/engine.hpp"
#include "osim/telemetry.hpp"

namespace osim {

/// Parses and validates a JSON config document. Missing keys take defaults;
/// unknown keys are rejected (typo safety). Throws ParseError on syntax,
/// ValidationError(field path) on semantics.
SimConfig load_config(const std::string& json_text);

/// Canonical JSON echo of a validated config; load_config(config_to_json(c))
/// reproduces c exactly.
std::string config_to_json(const SimConfig& config);

std::string export_rounds_csv(const RunTelemetry& telemetry);
std::string export_messages_jsonl(const RunTelemetry& telemetry);
std::string export_states_csv(const RunTelemetry& telemetry);
std::string export_run_json(const RunTelemetry& telemetry, double duration_seconds);

/// rounds.csv + messages.jsonl + states.csv + run.json in one directory.
void write_run_bundle(const RunTelemetry& telemetry, const std::filesystem::path& dir,
                      double duration_seconds);

std::vector<BroadcastMessage> load_messages_jsonl(const std::string& text);

/// Streaming variant of write_run_bundle: rows are appended as rounds
/// complete instead of after the run. Produces byte-identical files.
class StreamingBundleWriter final : public RunObserver {
public:
    StreamingBundleWriter(std::filesystem::path dir, const SimConfig& config);

    void on_init(std::span<const double> opinions) override;
    void on_round(const RoundRecord& record, const BroadcastMessage& message,
                  std::span<const double> opinions) override;

    /// Flushes the final strided snapshot if pending and writes run.json.
    void finalize(const RunTelemetry& telemetry, double duration_seconds);

private:
    void write_states_rows(int round, std::span<const double> opinions);

    std::filesystem::path dir_;
    int stride_ = 1;
    int n_ = 0;
    std::ofstream rounds_;
    std::ofstream messages_;
    std::ofstream states_;
    int last_round_ = 0;
    bool last_round_written_ = false;
    std::vector<double> pending_snapshot_;
};

}  // namespace osim
