#include "groupsim/errors.hpp"
#include "groupsim/oracle.hpp"

#include <spdlog/spdlog.h>

#include <thread>

namespace groupsim {

namespace {

std::ptrdiff_t checked_inflight(const GatewayConfig& c) {
    if (c.max_inflight < 1) throw ValidationError("max_inflight must be at least 1");
    if (c.retries < 0) throw ValidationError("retries must be non-negative");
    return c.max_inflight;
}

class SemaphoreGuard {
public:
    explicit SemaphoreGuard(std::counting_semaphore<>& s) : s_(s) { s_.acquire(); }
    ~SemaphoreGuard() { s_.release(); }
    SemaphoreGuard(const SemaphoreGuard&) = delete;
    SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

private:
    std::counting_semaphore<>& s_;
};

std::string join_options(const std::vector<std::string>& options) {
    std::string out;
    for (std::size_t i = 0; i < options.size(); ++i) {
        if (i) out += "|";
        out += options[i];
    }
    return out;
}

}  // namespace

OracleGateway::OracleGateway(std::unique_ptr<OracleBackend> backend, GatewayConfig config)
    : backend_(std::move(backend)), config_(config), inflight_(checked_inflight(config)) {
    if (!backend_) throw ValidationError("oracle gateway needs a backend");
}

bool OracleGateway::is_stub() const noexcept {
    return dynamic_cast<const StubOracle*>(backend_.get()) != nullptr;
}

OracleReply OracleGateway::ask(const OracleRequest& request) {
    const auto prompt = render_prompt(request);
    const auto id = next_id_.fetch_add(1);
    if (config_.verbose) {
        spdlog::debug("oracle[{}] {} agent={} day={}\n{}", id, to_string(request.tmpl),
                      request.agent_id.value_or("-"), request.day.value_or(0),
                      backend_->redact(prompt));
    }

    SemaphoreGuard guard(inflight_);
    auto delay = config_.backoff;
    for (int attempt = 0;; ++attempt) {
        try {
            auto text = backend_->complete(request, prompt);
            if (config_.verbose) {
                spdlog::debug("oracle[{}] reply\n{}", id, backend_->redact(text));
            }
            return OracleReply{id, std::move(text)};
        } catch (const OracleUnavailable& e) {
            if (attempt >= config_.retries) throw;
            spdlog::warn("oracle[{}] attempt {} failed: {}; retrying in {} ms", id, attempt + 1,
                         backend_->redact(e.what()), delay.count());
            std::this_thread::sleep_for(delay);
            delay *= 2;
        }
    }
}

std::pair<Domain, std::string> OracleGateway::classify_event(const EventRecord& event) {
    std::string domains;
    for (auto d : kAllDomains) {
        if (!domains.empty()) domains += ", ";
        domains += to_string(d);
    }
    OracleRequest req{PromptTemplate::classify,
                      {{"title", event.title},
                       {"content", event.content},
                       {"domains", domains},
                       {"meta.domain", std::string(to_string(event.domain))},
                       {"meta.country", event.country}},
                      std::nullopt,
                      std::nullopt};
    return parse_classify_reply(ask(req).raw_text);
}

EmotionState OracleGateway::query_emotion_update(const OracleContext& agent_view,
                                                 std::string agent_id, int day) {
    OracleRequest req{PromptTemplate::emotion_update, agent_view, std::move(agent_id), day};
    return parse_emotion_reply(ask(req).raw_text);
}

ActionDecision OracleGateway::query_decision(const OracleContext& agent_view, std::string agent_id,
                                             int day, const std::vector<ActionKind>& available,
                                             const std::vector<std::string>& options) {
    OracleRequest req{PromptTemplate::decision, agent_view, std::move(agent_id), day};
    req.context["available_actions"] = format_actions_slot(available);
    req.context["options"] = join_options(options);
    return parse_decision_reply(ask(req).raw_text, available, options);
}

DailyEngagement OracleGateway::query_engagement(const OracleContext& agent_view,
                                                std::string agent_id, int day) {
    OracleRequest req{PromptTemplate::engagement_predict, agent_view, std::move(agent_id), day};
    auto e = parse_engagement_reply(ask(req).raw_text);
    e.day = day;
    if (auto it = agent_view.find("date"); it != agent_view.end()) {
        if (auto d = parse_date(it->second)) e.date = *d;
    }
    return e;
}

std::string OracleGateway::query_group_document(const std::string& country, Domain domain) {
    OracleRequest req{PromptTemplate::group_find,
                      {{"country", country}, {"domain", std::string(to_string(domain))}},
                      std::nullopt,
                      std::nullopt};
    return extract_outline_block(ask(req).raw_text);
}

std::vector<std::pair<std::string, Characteristic>> OracleGateway::query_characteristics(
    const std::vector<GroupSpec>& specs, const std::string& country, std::uint64_t seed) {
    std::string document;
    for (const auto& s : specs) {
        document += "- " + s.name + ": " + std::to_string(s.population) + "\n";
    }
    OracleRequest req{PromptTemplate::group_generate,
                      {{"document", document}, {"country", country}, {"seed", std::to_string(seed)}},
                      std::nullopt,
                      std::nullopt};
    return parse_group_generate_reply(ask(req).raw_text);
}

std::unique_ptr<OracleGateway> make_stub_gateway(StubConfig stub, GatewayConfig config) {
    return std::make_unique<OracleGateway>(std::make_unique<StubOracle>(stub), config);
}

}  // namespace groupsim
