#include "osim/llm_client.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "osim/errors.hpp"
#include "osim/format.hpp"

namespace osim {

using nlohmann::json;

std::string default_prompt_template() {
    // Neutral scaffold only; role instructions are supplied by the user's
    // config, never shipped here.
    return "You are a broadcasting agent in a simulated opinion exercise on the topic "
           "\"{topic}\". Round {round}. Audience alignment: {counts}. Mean opinion: {mean}. "
           "Your remaining energy: {energy}. Opponent's last message: {opponent_message}. "
           "Compose one short broadcast message for the audience and rate its potency.";
}

namespace {

void replace_all(std::string& s, std::string_view key, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = s.find(key, pos)) != std::string::npos) {
        s.replace(pos, key.size(), value);
        pos += value.size();
    }
}

}  // namespace

std::string render_prompt(std::string_view tmpl, const Observation& obs) {
    std::string out(tmpl);
    replace_all(out, "{topic}", obs.topic);
    replace_all(out, "{round}", std::to_string(obs.round));
    replace_all(out, "{counts}",
                strprintf("red=%d neutral=%d blue=%d", obs.n_red, obs.n_neutral, obs.n_blue));
    replace_all(out, "{mean}", strprintf("%.3f", obs.mean_opinion));
    replace_all(out, "{energy}",
                obs.own_energy ? strprintf("%.2f", *obs.own_energy) : std::string("unlimited"));
    std::string opp = "none";
    if (obs.opponent_last_message) {
        opp = strprintf("\"%s\" (potency %d)", obs.opponent_last_message->first.c_str(),
                        obs.opponent_last_message->second);
    }
    replace_all(out, "{opponent_message}", opp);
    return out;
}

std::optional<AgentAction> parse_llm_reply(std::string_view content, int p_max, bool& clamped) {
    clamped = false;
    // Scan for the first balanced {...} region that parses and carries the
    // expected fields; models often wrap the object in prose.
    for (std::size_t start = content.find('{'); start != std::string_view::npos;
         start = content.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < content.size(); ++i) {
            char c = content[i];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                --depth;
                if (depth == 0) {
                    json j = json::parse(content.substr(start, i - start + 1), nullptr, false);
                    if (j.is_object() && j.contains("message") && j["message"].is_string() &&
                        j.contains("potency") && j["potency"].is_number()) {
                        auto raw = static_cast<long long>(std::llround(j["potency"].get<double>()));
                        int potency = static_cast<int>(std::clamp<long long>(raw, 1, p_max));
                        clamped = potency != raw;
                        return AgentAction{j["message"].get<std::string>(), potency};
                    }
                    break;  // balanced but unusable; try the next '{'
                }
            }
        }
    }
    return std::nullopt;
}

namespace {

struct EndpointParts {
    std::string base;  // scheme://host[:port]
    std::string path;  // prefix, no trailing slash
};

EndpointParts split_endpoint(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ValidationError("endpoint_url", "must start with http:// or https://");
    }
    auto path_start = url.find('/', scheme_end + 3);
    EndpointParts parts;
    if (path_start == std::string::npos) {
        parts.base = url;
    } else {
        parts.base = url.substr(0, path_start);
        parts.path = url.substr(path_start);
    }
    while (!parts.path.empty() && parts.path.back() == '/') parts.path.pop_back();
    return parts;
}

}  // namespace

LlmClient::LlmClient(LlmBackendConfig config, int p_max, std::string api_key, Sleeper sleeper)
    : config_(std::move(config)), p_max_(p_max), api_key_(std::move(api_key)),
      sleeper_(std::move(sleeper)) {
    if (!sleeper_) {
        sleeper_ = [](double seconds) {
            std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
        };
    }
}

std::optional<AgentAction> LlmClient::attempt(const Observation& obs, std::string& error_out) {
    EndpointParts parts = split_endpoint(config_.endpoint_url);
    httplib::Client client(parts.base);
    auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));

    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    const std::string& tmpl =
        config_.prompt_template.empty() ? default_prompt_template() : config_.prompt_template;
    json body = {
        {"model", config_.model_name},
        {"messages",
         json::array({json{{"role", "system"}, {"content", render_prompt(tmpl, obs)}},
                      json{{"role", "user"},
                           {"content", strprintf("Reply with exactly one JSON object of the "
                                                 "form {\"message\": \"<broadcast text>\", "
                                                 "\"potency\": <integer 1..%d>}.",
                                                 p_max_)}}})},
        {"temperature", config_.temperature},
    };

    auto res = client.Post(parts.path + "/chat/completions", headers, body.dump(),
                           "application/json");
    if (!res) {
        error_out = "transport error: " + httplib::to_string(res.error());
        return std::nullopt;
    }
    if (res->status != 200) {
        error_out = strprintf("HTTP %d", res->status);
        return std::nullopt;
    }
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array() ||
        reply["choices"].empty() || !reply["choices"][0].contains("message") ||
        !reply["choices"][0]["message"].contains("content") ||
        !reply["choices"][0]["message"]["content"].is_string()) {
        error_out = "malformed completion payload";
        return std::nullopt;
    }
    std::string content = reply["choices"][0]["message"]["content"].get<std::string>();
    bool clamped = false;
    auto action = parse_llm_reply(content, p_max_, clamped);
    if (!action) {
        error_out = "no parseable {message, potency} object in reply";
        return std::nullopt;
    }
    if (clamped) ++clamp_events_;
    return action;
}

AgentAction LlmClient::act(const Observation& obs) {
    std::string last_error = "no attempt made";
    for (int attempt_no = 0; attempt_no <= config_.max_retries; ++attempt_no) {
        ++attempts_made_;
        auto action = attempt(obs, last_error);
        if (action) return *action;
        if (attempt_no < config_.max_retries) {
            sleeper_(std::pow(2.0, attempt_no));  // 1s, 2s, 4s, ...
        }
    }
    throw BackendUnavailable(strprintf("%s after %d attempts: %s", config_.endpoint_url.c_str(),
                                       config_.max_retries + 1, last_error.c_str()));
}

}  // namespace osim
