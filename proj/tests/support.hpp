#pragma once

// Shared helpers for the test binaries: fixture paths and scripted model
// backends with no network behind them.

#include <filesystem>
#include <string>
#include <vector>

#include "kgqa/errors.hpp"
#include "kgqa/gateway.hpp"

namespace support {

inline std::filesystem::path fixture_path(const std::string& name) {
    return std::filesystem::path(KGQA_FIXTURE_DIR) / name;
}

// Replays canned replies in order; repeats the last one when exhausted.
struct ScriptedBackend final : kgqa::gateway::ModelBackend {
    std::vector<std::string> replies;
    std::vector<kgqa::gateway::ModelRequest> seen;
    std::size_t next = 0;

    explicit ScriptedBackend(std::vector<std::string> r) : replies(std::move(r)) {}

    std::string id() const override { return "scripted"; }

    std::string complete(const kgqa::gateway::ModelRequest& request) override {
        seen.push_back(request);
        if (replies.empty()) return "";
        const std::size_t i = next < replies.size() ? next : replies.size() - 1;
        ++next;
        return replies[i];
    }
};

struct FailingBackend final : kgqa::gateway::ModelBackend {
    std::string id() const override { return "failing"; }

    std::string complete(const kgqa::gateway::ModelRequest&) override {
        throw kgqa::GatewayError("backend unavailable", 1, false);
    }
};

} // namespace support
