#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "osim/agents.hpp"

namespace osim {

/// Remote LLM backend over the OpenAI-compatible chat-completions wire
/// protocol. Any server speaking that protocol works, which is how
/// self-hosted open-weight models plug in.
struct LlmBackendConfig {
    std::string endpoint_url;      // e.g. http://127.0.0.1:8080/v1
    std::string model_name;
    std::string api_key_env_var;   // empty = no Authorization header
    double timeout_seconds = 30.0;
    int max_retries = 2;           // extra attempts after the first, <= 5
    std::string prompt_template;   // placeholders: {topic},{round},{counts},{mean},{energy},{opponent_message}
    double temperature = 0.7;
};

std::string default_prompt_template();

/// Fills the template placeholders from an observation.
std::string render_prompt(std::string_view tmpl, const Observation& obs);

/// Extracts the first JSON object {"message": ..., "potency": ...} found in
/// free text. Potency is clamped into [1, p_max]; `clamped` reports whether
/// clamping fired.
std::optional<AgentAction> parse_llm_reply(std::string_view content, int p_max, bool& clamped);

class LlmClient {
public:
    using Sleeper = std::function<void(double seconds)>;

    /// api_key is the resolved key value ("" = endpoint needs no auth);
    /// resolution from the environment happens at startup, not here.
    LlmClient(LlmBackendConfig config, int p_max, std::string api_key, Sleeper sleeper = {});

    /// One chat-completion round trip with retry on transport or parse
    /// failure (backoff 1s, 2s, 4s, ...). Throws BackendUnavailable once
    /// max_retries extra attempts are exhausted.
    AgentAction act(const Observation& obs);

    int attempts_made() const noexcept { return attempts_made_; }
    int clamp_events() const noexcept { return clamp_events_; }

private:
    std::optional<AgentAction> attempt(const Observation& obs, std::string& error_out);

    LlmBackendConfig config_;
    int p_max_;
    std::string api_key_;
    Sleeper sleeper_;
    int attempts_made_ = 0;
    int clamp_events_ = 0;
};

class LlmAgent final : public Agent {
public:
    LlmAgent(LlmBackendConfig config, int p_max, std::string api_key,
             LlmClient::Sleeper sleeper = {})
        : client_(std::move(config), p_max, std::move(api_key), std::move(sleeper)) {}

    AgentAction act(const Observation& obs) override { return client_.act(obs); }
    std::string_view kind() const override { return "llm"; }

    LlmClient& client() noexcept { return client_; }

private:
    LlmClient client_;
};

}  // namespace osim
