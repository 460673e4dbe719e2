#include "kgqa/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>
#include <thread>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "kgqa/errors.hpp"
#include "kgqa/prompts.hpp"
#include "kgqa/text.hpp"

namespace kgqa::gateway {
namespace {

using nlohmann::json;

class HttpBackend : public ModelBackend {
public:
    explicit HttpBackend(BackendConfig config) : config_(std::move(config)) {
        std::size_t scheme = config_.endpoint.find("://");
        if (scheme == std::string::npos)
            throw ConfigError("endpoint must be a full URL: " + config_.endpoint);
        std::size_t slash = config_.endpoint.find('/', scheme + 3);
        if (slash == std::string::npos) {
            base_ = config_.endpoint;
            path_ = "/v1/chat/completions";
        } else {
            base_ = config_.endpoint.substr(0, slash);
            path_ = config_.endpoint.substr(slash);
        }
    }

    std::string id() const override { return "http:" + config_.model; }

    std::string complete(const ModelRequest& request) override {
        json body{{"model", config_.model},
                  {"temperature", request.temperature},
                  {"max_tokens", request.max_output}};
        body["messages"] = json::array();
        if (!request.system_instruction.empty())
            body["messages"].push_back(
                {{"role", "system"}, {"content", request.system_instruction}});
        body["messages"].push_back({{"role", "user"}, {"content", request.user_content}});

        httplib::Headers headers;
        if (!config_.api_key_env.empty()) {
            if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
                headers.emplace("Authorization", std::string("Bearer ") + key);
        }

        const int max_attempts = 3;
        for (int attempt = 1;; ++attempt) {
            httplib::Client client(base_);
            client.set_connection_timeout(std::chrono::milliseconds(config_.timeout_ms));
            client.set_read_timeout(std::chrono::milliseconds(config_.timeout_ms));
            auto result = client.Post(path_, headers, body.dump(), "application/json");
            if (!result) {
                if (attempt < max_attempts) {
                    std::this_thread::sleep_for(std::chrono::milliseconds(100u << attempt));
                    continue;
                }
                throw GatewayError("transport failure calling " + base_ + ": " +
                                       httplib::to_string(result.error()),
                                   attempt, true);
            }
            if (result->status < 200 || result->status >= 300)
                throw GatewayError("backend returned status " + std::to_string(result->status) +
                                       " for " + base_ + path_,
                                   attempt, false);
            return extract_content(result->body);
        }
    }

private:
    static std::string extract_content(const std::string& body) {
        json doc = json::parse(body, nullptr, false);
        if (doc.is_discarded()) throw MalformedResponseError("response body is not JSON");
        if (!doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array() ||
            doc["choices"].empty())
            throw MalformedResponseError("response has no choices");
        const json& choice = doc["choices"][0];
        if (!choice.is_object() || !choice.contains("message") || !choice["message"].is_object())
            throw MalformedResponseError("response choice has no message object");
        const json& message = choice["message"];
        if (!message.contains("content") || !message["content"].is_string())
            throw MalformedResponseError("response lacks choices[0].message.content text");
        return message["content"].get<std::string>();
    }

    BackendConfig config_;
    std::string base_;
    std::string path_;
};

} // namespace

std::string_view role_name(ModelRole role) {
    switch (role) {
    case ModelRole::translator: return "translator";
    case ModelRole::selector: return "selector";
    case ModelRole::reader: return "reader";
    }
    return "translator";
}

ModelResponse generate(const ModelRequest& request, ModelBackend& backend) {
    if (request.user_content.empty())
        throw std::invalid_argument("model request must carry user content");
    auto start = std::chrono::steady_clock::now();
    ModelResponse response;
    response.text = backend.complete(request);
    response.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    response.backend_id = backend.id();
    return response;
}

StubTranslator::StubTranslator(std::map<std::string, std::string> table)
    : table_(std::move(table)) {}

StubTranslator StubTranslator::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open translation table: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw ConfigError("translation table must be a JSON object: " + path);
    std::map<std::string, std::string> table;
    for (const auto& [question, cql] : doc.items()) {
        if (!cql.is_string())
            throw ConfigError("translation table values must be strings: " + path);
        table[question] = cql.get<std::string>();
    }
    return StubTranslator(std::move(table));
}

std::string StubTranslator::complete(const ModelRequest& request) {
    auto it = table_.find(request.user_content);
    return it == table_.end() ? std::string() : it->second;
}

std::string StubSelector::complete(const ModelRequest& request) {
    auto parsed = prompts::parse_selector_user(request.user_content);
    if (!parsed)
        throw GatewayError("selector request is not in the " + std::string(prompts::kVersion) +
                               " prompt layout",
                           1, false);
    if (parsed->candidates.empty())
        throw GatewayError("selector request carries no candidates", 1, false);
    const std::string* best = nullptr;
    double best_score = -1.0;
    for (const auto& candidate : parsed->candidates) {
        double score = text::bigram_dice(parsed->mention, candidate);
        if (!best || score > best_score || (score == best_score && candidate < *best)) {
            best = &candidate;
            best_score = score;
        }
    }
    return *best;
}

std::string StubReader::complete(const ModelRequest& request) {
    auto parsed = prompts::parse_reader_user(request.user_content);
    if (!parsed)
        throw GatewayError("reader request is not in the " + std::string(prompts::kVersion) +
                               " prompt layout",
                           1, false);
    if (parsed->facts.empty()) return {};

    std::vector<const std::string*> tails;
    for (const auto& [relation, tail] : parsed->facts)
        if (text::shares_bigram(relation, parsed->question)) tails.push_back(&tail);
    if (tails.empty())
        for (const auto& [relation, tail] : parsed->facts) tails.push_back(&tail);

    std::string out;
    std::set<std::string_view> seen;
    for (const std::string* tail : tails) {
        if (!seen.insert(*tail).second) continue;
        out += "ANSWER: ";
        out += *tail;
        out += "\n";
    }
    return out;
}

std::unique_ptr<ModelBackend> make_backend(ModelRole role, const BackendConfig& config) {
    if (config.kind == "stub") {
        switch (role) {
        case ModelRole::translator:
            return std::make_unique<StubTranslator>(
                config.table.empty() ? StubTranslator()
                                     : StubTranslator::from_file(config.table));
        case ModelRole::selector: return std::make_unique<StubSelector>();
        case ModelRole::reader: return std::make_unique<StubReader>();
        }
    }
    if (config.kind == "http") {
        if (config.endpoint.empty() || config.model.empty())
            throw ConfigError("http backend for " + std::string(role_name(role)) +
                              " needs both endpoint and model");
        return std::make_unique<HttpBackend>(config);
    }
    throw ConfigError("unknown backend kind '" + config.kind + "' for " +
                      std::string(role_name(role)));
}

} // namespace kgqa::gateway
