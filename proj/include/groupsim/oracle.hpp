#pragma once

#include "groupsim/core.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace groupsim {

struct GroupTree;

enum class PromptTemplate {
    group_find,
    group_generate,
    decision,
    emotion_update,
    engagement_predict,
    classify,
};

std::string_view to_string(PromptTemplate t);

/// Named slots. Template placeholders are filled from here; extra keys are
/// ignored by the renderer but visible to the stub oracle.
using OracleContext = std::map<std::string, std::string>;

struct OracleRequest {
    PromptTemplate tmpl = PromptTemplate::decision;
    OracleContext context;
    std::optional<std::string> agent_id;
    std::optional<int> day;
};

struct OracleReply {
    std::uint64_t correlation_id = 0;
    std::string raw_text;
};

/// Raw template text, with "{slot}" placeholders and "{{"/"}}" escapes.
std::string_view template_text(PromptTemplate t);

/// Placeholder names the template requires, in first-appearance order.
std::vector<std::string> template_slots(PromptTemplate t);

/// Substitutes every placeholder. Throws MissingSlot.
std::string render_prompt(const OracleRequest& request);

// ---------------------------------------------------------------------------
// Reply grammars. Each parser locates its block inside possibly chatty text
// and rejects anything that does not match the block exactly.

EmotionState parse_emotion_reply(std::string_view text);

/// `options` is consulted only when the reply chooses "predict".
ActionDecision parse_decision_reply(std::string_view text, const std::vector<ActionKind>& available,
                                    const std::vector<std::string>& options = {});

/// Counts only; day and date are filled by the caller.
DailyEngagement parse_engagement_reply(std::string_view text);

std::pair<Domain, std::string> parse_classify_reply(std::string_view text);

/// Agent id to characteristic, in reply order.
std::vector<std::pair<std::string, Characteristic>> parse_group_generate_reply(std::string_view text);

/// Cuts the outline block out of a group-find reply: everything from the first
/// "##" line through the last outline line.
std::string extract_outline_block(std::string_view text);

// Formatting helpers shared by context builders and the stub.
std::string format_number(double v);
std::string format_emotions_slot(const EmotionState& e);
std::string format_attitudes_slot(const EmotionState& e);
std::string format_actions_slot(const std::vector<ActionKind>& actions);
std::string format_emotion_reply(const EmotionState& e);
std::string format_engagement_reply(const DailyEngagement& e);

/// Reads a numeric context value. Throws UnparseableReply when absent.
double context_number(const OracleContext& ctx, const std::string& key);

// ---------------------------------------------------------------------------

/// Source of replies. Implementations must be safe to call concurrently.
class OracleBackend {
public:
    virtual ~OracleBackend() = default;

    /// Throws OracleUnavailable on transport failure (retried by the gateway).
    virtual std::string complete(const OracleRequest& request, const std::string& prompt) = 0;
    virtual std::string_view name() const = 0;
    /// Masks secrets before text is logged.
    virtual std::string redact(std::string text) const { return text; }
};

struct StubConfig {
    /// Relative bound on the hash jitter applied to stub replies.
    double jitter_bound = 0.02;
    /// Per-day decay of the emotional response to the same heat.
    double day_decay = 0.1;
    /// Fraction of a group reached at unit heat on day 1.
    double base_reach = 0.03;
    /// Extra reach from emotional arousal.
    double arousal_gain = 0.3;
};

/// Deterministic rule-based replies. A pure function of (template, context);
/// the run seed travels in the context under "seed".
class StubOracle final : public OracleBackend {
public:
    explicit StubOracle(StubConfig config = {});

    std::string complete(const OracleRequest& request, const std::string& prompt) override;
    std::string_view name() const override { return "stub"; }

    const StubConfig& config() const noexcept { return config_; }

private:
    std::string emotion_reply(const OracleContext& ctx, std::string_view agent_id) const;
    std::string decision_reply(const OracleContext& ctx) const;
    std::string engagement_reply(const OracleContext& ctx, std::string_view agent_id) const;
    std::string classify_reply(const OracleContext& ctx) const;
    std::string group_find_reply(const OracleContext& ctx) const;
    std::string group_generate_reply(const OracleContext& ctx) const;

    StubConfig config_;
};

/// Sentiment in [-1, 1] from a fixed keyword lexicon.
double event_valence(std::string_view text);

/// Emotion vector the stub drifts towards for a given valence.
EmotionState valence_target(double valence);

struct RemoteConfig {
    std::string endpoint;
    std::string api_key;
    std::string model;
    double temperature = 0.1;
    std::chrono::seconds timeout{60};

    /// Fills endpoint, key and model from ORACLE_ENDPOINT, ORACLE_API_KEY
    /// and ORACLE_MODEL when set.
    static RemoteConfig from_env(RemoteConfig base);
    static RemoteConfig from_env();
};

/// Chat-completions style HTTP endpoint.
class RemoteOracle final : public OracleBackend {
public:
    explicit RemoteOracle(RemoteConfig config);

    std::string complete(const OracleRequest& request, const std::string& prompt) override;
    std::string_view name() const override { return "remote"; }
    std::string redact(std::string text) const override;

    /// JSON body sent for a prompt (exposed for logging and tests).
    std::string request_body(const std::string& prompt) const;

private:
    RemoteConfig config_;
    std::string scheme_host_port_;
    std::string path_;
};

struct GatewayConfig {
    int max_inflight = 8;
    int retries = 3;
    std::chrono::milliseconds backoff{500};
    bool verbose = false;
};

/// Front door to an oracle backend: renders prompts, bounds the number of
/// requests in flight, retries transport failures with exponential backoff
/// and parses replies into domain values.
class OracleGateway {
public:
    OracleGateway(std::unique_ptr<OracleBackend> backend, GatewayConfig config = {});

    OracleReply ask(const OracleRequest& request);

    std::pair<Domain, std::string> classify_event(const EventRecord& event);
    EmotionState query_emotion_update(const OracleContext& agent_view, std::string agent_id,
                                      int day);
    ActionDecision query_decision(const OracleContext& agent_view, std::string agent_id, int day,
                                  const std::vector<ActionKind>& available,
                                  const std::vector<std::string>& options = {});
    DailyEngagement query_engagement(const OracleContext& agent_view, std::string agent_id,
                                     int day);
    /// Asks for a group document and returns its outline block.
    std::string query_group_document(const std::string& country, Domain domain);
    std::vector<std::pair<std::string, Characteristic>> query_characteristics(
        const std::vector<GroupSpec>& specs, const std::string& country, std::uint64_t seed);

    const OracleBackend& backend() const noexcept { return *backend_; }
    bool is_stub() const noexcept;
    std::uint64_t requests_sent() const noexcept { return next_id_.load() - 1; }

private:
    std::unique_ptr<OracleBackend> backend_;
    GatewayConfig config_;
    std::counting_semaphore<> inflight_;
    std::atomic<std::uint64_t> next_id_{1};
};

std::unique_ptr<OracleGateway> make_stub_gateway(StubConfig stub = {}, GatewayConfig config = {});

}  // namespace groupsim
