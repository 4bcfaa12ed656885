#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "groupsim/errors.hpp"
#include "groupsim/json_io.hpp"
#include "groupsim/oracle.hpp"

#include <cstdlib>

namespace groupsim {

RemoteConfig RemoteConfig::from_env(RemoteConfig base) {
    if (const char* v = std::getenv("ORACLE_ENDPOINT"); v && *v) base.endpoint = v;
    if (const char* v = std::getenv("ORACLE_API_KEY"); v && *v) base.api_key = v;
    if (const char* v = std::getenv("ORACLE_MODEL"); v && *v) base.model = v;
    return base;
}

RemoteConfig RemoteConfig::from_env() { return from_env(RemoteConfig{}); }

RemoteOracle::RemoteOracle(RemoteConfig config) : config_(std::move(config)) {
    const auto& url = config_.endpoint;
    const auto scheme_end = url.find("://");
    if (url.empty() || scheme_end == std::string::npos) {
        throw ValidationError("oracle endpoint must be an http(s) URL, got '" + url + "'");
    }
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw ValidationError("unsupported oracle endpoint scheme: " + scheme);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    scheme_host_port_ = url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

std::string RemoteOracle::request_body(const std::string& prompt) const {
    Json body{{"model", config_.model},
              {"temperature", config_.temperature},
              {"messages", Json::array({Json{{"role", "user"}, {"content", prompt}}})}};
    return body.dump();
}

std::string RemoteOracle::redact(std::string text) const {
    if (config_.api_key.empty()) return text;
    for (auto pos = text.find(config_.api_key); pos != std::string::npos;
         pos = text.find(config_.api_key, pos)) {
        text.replace(pos, config_.api_key.size(), "***");
    }
    return text;
}

std::string RemoteOracle::complete(const OracleRequest& /*request*/, const std::string& prompt) {
    httplib::Client client(scheme_host_port_);
    const auto timeout = config_.timeout.count();
    client.set_connection_timeout(timeout, 0);
    client.set_read_timeout(timeout, 0);
    client.set_write_timeout(timeout, 0);

    httplib::Headers headers;
    if (!config_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.api_key);
    }
    auto res = client.Post(path_, headers, request_body(prompt), "application/json");
    if (!res) {
        throw OracleUnavailable("oracle request failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw OracleUnavailable("oracle returned HTTP " + std::to_string(res->status));
    }
    Json reply;
    try {
        reply = Json::parse(res->body);
    } catch (const Json::parse_error&) {
        throw UnparseableReply("oracle reply is not JSON");
    }
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const Json::exception&) {
        throw UnparseableReply("oracle reply lacks choices[0].message.content");
    }
}

}  // namespace groupsim
