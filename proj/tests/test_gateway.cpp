#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "groupsim/errors.hpp"
#include "groupsim/json_io.hpp"
#include "groupsim/oracle.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <set>
#include <thread>
#include <vector>

using namespace groupsim;
using namespace std::chrono_literals;

namespace {

// Fails the first `failures` calls with OracleUnavailable, then delegates to the stub.
class FlakyBackend final : public OracleBackend {
public:
    explicit FlakyBackend(int failures) : remaining_(failures) {}
    std::string complete(const OracleRequest& r, const std::string& p) override {
        ++calls;
        if (remaining_-- > 0) throw OracleUnavailable("connection refused");
        return stub_.complete(r, p);
    }
    std::string_view name() const override { return "flaky"; }

    std::atomic<int> calls{0};

private:
    std::atomic<int> remaining_;
    StubOracle stub_;
};

// Records the peak number of concurrent calls.
class SlowBackend final : public OracleBackend {
public:
    std::string complete(const OracleRequest& r, const std::string& p) override {
        const int now = ++active_;
        int seen = peak.load();
        while (now > seen && !peak.compare_exchange_weak(seen, now)) {
        }
        std::this_thread::sleep_for(5ms);
        --active_;
        return stub_.complete(r, p);
    }
    std::string_view name() const override { return "slow"; }

    std::atomic<int> peak{0};

private:
    std::atomic<int> active_{0};
    StubOracle stub_;
};

OracleRequest classify_request() {
    return {PromptTemplate::classify,
            {{"title", "t"},
             {"content", "c"},
             {"domains", "education"},
             {"meta.domain", "education"},
             {"meta.country", "CN"}},
            std::nullopt,
            std::nullopt};
}

class LocalServer {
public:
    explicit LocalServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
        server_.Post("/v1/chat/completions", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~LocalServer() {
        server_.stop();
        thread_.join();
    }
    std::string url() const {
        return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

RemoteConfig remote_config(const std::string& url) {
    RemoteConfig c;
    c.endpoint = url;
    c.api_key = "test-key";
    c.model = "test-model";
    c.timeout = 5s;
    return c;
}

}  // namespace

TEST(Gateway, RetriesTransientFailures) {
    auto backend = std::make_unique<FlakyBackend>(2);
    auto* raw = backend.get();
    OracleGateway gateway(std::move(backend), {8, 3, 1ms, false});
    const auto reply = gateway.ask(classify_request());
    EXPECT_EQ(raw->calls.load(), 3);
    EXPECT_EQ(parse_classify_reply(reply.raw_text).second, "CN");
}

TEST(Gateway, GivesUpAfterRetries) {
    auto backend = std::make_unique<FlakyBackend>(10);
    auto* raw = backend.get();
    OracleGateway gateway(std::move(backend), {8, 2, 1ms, false});
    EXPECT_THROW(gateway.ask(classify_request()), OracleUnavailable);
    EXPECT_EQ(raw->calls.load(), 3);
}

TEST(Gateway, BoundsRequestsInFlight) {
    auto backend = std::make_unique<SlowBackend>();
    auto* raw = backend.get();
    OracleGateway gateway(std::move(backend), {3, 0, 1ms, false});
    std::vector<std::jthread> threads;
    for (int i = 0; i < 12; ++i) {
        threads.emplace_back([&] { gateway.ask(classify_request()); });
    }
    threads.clear();
    EXPECT_LE(raw->peak.load(), 3);
    EXPECT_GE(raw->peak.load(), 1);
}

TEST(Gateway, CorrelationIdsAreUnique) {
    auto gateway = make_stub_gateway();
    std::set<std::uint64_t> ids;
    for (int i = 0; i < 20; ++i) ids.insert(gateway->ask(classify_request()).correlation_id);
    EXPECT_EQ(ids.size(), 20u);
    EXPECT_EQ(gateway->requests_sent(), 20u);
}

TEST(Gateway, RejectsBadConfig) {
    EXPECT_THROW(OracleGateway(std::make_unique<StubOracle>(), {0, 3, 1ms, false}),
                 ValidationError);
    EXPECT_THROW(OracleGateway(std::make_unique<StubOracle>(), {1, -1, 1ms, false}),
                 ValidationError);
}

TEST(Gateway, ClassifyEventUsesMetadataWithStub) {
    auto gateway = make_stub_gateway();
    EventRecord e;
    e.title = "t";
    e.domain = Domain::sports;
    e.country = "US";
    EXPECT_EQ(gateway->classify_event(e), (std::pair<Domain, std::string>{Domain::sports, "US"}));
}

TEST(RemoteOracle, TalksToChatEndpoint) {
    std::string auth;
    std::string body;
    LocalServer server([&](const httplib::Request& req, httplib::Response& res) {
        auth = req.get_header_value("Authorization");
        body = req.body;
        Json reply{{"choices", Json::array({Json{{"message", {{"role", "assistant"},
                                                              {"content", "Domain: health\nCountry: FR\n"}}}}})}};
        res.set_content(reply.dump(), "application/json");
    });
    OracleGateway gateway(std::make_unique<RemoteOracle>(remote_config(server.url())),
                          {2, 0, 1ms, false});
    EventRecord e;
    e.title = "Hospital strike";
    e.country = "FR";
    EXPECT_EQ(gateway.classify_event(e), (std::pair<Domain, std::string>{Domain::health, "FR"}));
    EXPECT_EQ(auth, "Bearer test-key");
    const auto sent = Json::parse(body);
    EXPECT_EQ(sent.at("model"), "test-model");
    EXPECT_NE(sent.at("messages").at(0).at("content").get<std::string>().find("Hospital strike"),
              std::string::npos);
}

TEST(RemoteOracle, ServerErrorIsUnavailableAndRetried) {
    std::atomic<int> hits{0};
    LocalServer server([&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 503;
        res.set_content("overloaded", "text/plain");
    });
    OracleGateway gateway(std::make_unique<RemoteOracle>(remote_config(server.url())),
                          {2, 2, 1ms, false});
    EXPECT_THROW(gateway.ask(classify_request()), OracleUnavailable);
    EXPECT_EQ(hits.load(), 3);
}

TEST(RemoteOracle, GarbageBodyIsUnparseable) {
    LocalServer server([&](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"choices\": []}", "application/json");
    });
    RemoteOracle remote(remote_config(server.url()));
    EXPECT_THROW(remote.complete(classify_request(), "x"), UnparseableReply);
}

TEST(RemoteOracle, RefusedConnectionIsUnavailable) {
    RemoteOracle remote(remote_config("http://127.0.0.1:1/v1/chat/completions"));
    EXPECT_THROW(remote.complete(classify_request(), "x"), OracleUnavailable);
}
