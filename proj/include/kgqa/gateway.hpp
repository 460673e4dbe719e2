#pragma once

// One abstraction for all three model roles: CQL translation, entity
// selection, and retrieval reading. Each role runs against either a live
// OpenAI-compatible chat endpoint or a deterministic stub.

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace kgqa::gateway {

enum class ModelRole { translator, selector, reader };

std::string_view role_name(ModelRole role);

struct ModelRequest {
    ModelRole role = ModelRole::translator;
    std::string system_instruction;
    std::string user_content; // non-empty
    double temperature = 0.0;
    std::size_t max_output = 512;
};

struct ModelResponse {
    std::string text;
    std::chrono::milliseconds latency{0};
    std::string backend_id;
};

class ModelBackend {
public:
    virtual ~ModelBackend() = default;
    virtual std::string id() const = 0;
    // Returns the assistant text. Throws GatewayError on transport/status
    // failure and MalformedResponseError when the reply cannot be decoded.
    virtual std::string complete(const ModelRequest& request) = 0;
};

// Validates the request, dispatches to the backend, stamps latency and
// backend id. Errors from the backend propagate unchanged.
ModelResponse generate(const ModelRequest& request, ModelBackend& backend);

// Question -> CQL lookup; unknown questions yield empty text, which callers
// treat as "no translation", never as a transport failure.
class StubTranslator : public ModelBackend {
public:
    StubTranslator() = default;
    explicit StubTranslator(std::map<std::string, std::string> table);
    static StubTranslator from_file(const std::string& path);

    std::string id() const override { return "stub-translator"; }
    std::string complete(const ModelRequest& request) override;

private:
    std::map<std::string, std::string> table_;
};

// Picks the candidate with the highest bigram similarity to the mention,
// ties broken lexicographically.
class StubSelector : public ModelBackend {
public:
    std::string id() const override { return "stub-selector"; }
    std::string complete(const ModelRequest& request) override;
};

// Answers with the tails of facts whose relation shares a bigram with the
// question; if none does, with every retrieved tail. Output is ANSWER lines.
class StubReader : public ModelBackend {
public:
    std::string id() const override { return "stub-reader"; }
    std::string complete(const ModelRequest& request) override;
};

struct BackendConfig {
    std::string kind = "stub"; // "stub" | "http"
    std::string table;       // stub translator: question->CQL JSON map path
    std::string endpoint;    // http: full chat-completions URL
    std::string model;       // http: model name sent on the wire
    std::string api_key_env; // http: environment variable holding the key
    std::size_t timeout_ms = 30000;
};

// Throws ConfigError for unknown kinds or missing http fields.
std::unique_ptr<ModelBackend> make_backend(ModelRole role, const BackendConfig& config);

} // namespace kgqa::gateway
