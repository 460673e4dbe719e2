#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "kgqa/errors.hpp"
#include "kgqa/gateway.hpp"
#include "kgqa/kg.hpp"
#include "kgqa/prompts.hpp"
#include "support.hpp"

using namespace kgqa;
using namespace kgqa::gateway;
using json = nlohmann::json;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("generate validates and stamps the response") {
    support::ScriptedBackend backend({"reply text"});

    ModelRequest request;
    request.user_content = "hi";
    auto response = generate(request, backend);
    CHECK(response.text == "reply text");
    CHECK(response.backend_id == "scripted");

    ModelRequest empty;
    CHECK_THROWS_AS(generate(empty, backend), std::invalid_argument);
}

TEST_CASE("stub translator is a verbatim lookup table") {
    StubTranslator table(std::map<std::string, std::string>{{"q1?", "match ..."}});
    ModelRequest request;
    request.user_content = prompts::translator_user("q1?");
    CHECK(table.complete(request) == "match ...");

    request.user_content = "unknown question";
    CHECK(table.complete(request) == "");

    SUBCASE("loading from disk") {
        auto translator = StubTranslator::from_file(
            support::fixture_path("tiny_translations.json").string());
        ModelRequest fixture;
        fixture.user_content = "What is the capital of China?";
        CHECK(translator.complete(fixture) ==
              R"(match (:ENTITY{name:"China"})-[:Relationship{name:"capital"}]->(c))"
              R"( return c.name)");
    }

    SUBCASE("table file validation") {
        CHECK_THROWS_AS(StubTranslator::from_file("/nonexistent/table.json"), ConfigError);
        auto arr = write_temp("kgqa_test_table_arr.json", "[1, 2]");
        CHECK_THROWS_AS(StubTranslator::from_file(arr.string()), ConfigError);
        auto bad_value = write_temp("kgqa_test_table_val.json", R"({"q": 7})");
        CHECK_THROWS_AS(StubTranslator::from_file(bad_value.string()), ConfigError);
        std::filesystem::remove(arr);
        std::filesystem::remove(bad_value);
    }
}

TEST_CASE("stub selector and reader insist on the v1 layout") {
    StubSelector selector;
    ModelRequest request;
    request.role = ModelRole::selector;
    request.user_content = prompts::selector_user("q?", "Chan", {"China", "Jackie Chan"});
    CHECK(selector.complete(request) == "Jackie Chan");

    request.user_content = "free-form text";
    CHECK_THROWS_AS(selector.complete(request), GatewayError);

    request.user_content = prompts::selector_user("q?", "Chan", {});
    CHECK_THROWS_AS(selector.complete(request), GatewayError);

    StubReader reader;
    ModelRequest read;
    read.role = ModelRole::reader;
    read.user_content = prompts::reader_user("what is the capital?",
                                             {{"China", "capital", "Beijing"},
                                              {"China", "area", "big"}});
    CHECK(prompts::parse_answer_labels(reader.complete(read)) ==
          std::vector<std::string>{"Beijing"});

    read.user_content = prompts::reader_user("no facts at all?", {});
    CHECK(reader.complete(read).empty());

    read.user_content = "free-form text";
    CHECK_THROWS_AS(reader.complete(read), GatewayError);
}

TEST_CASE("prompt layout round trips") {
    const std::vector<std::string> candidates = {"a", "b [x]"};
    auto parsed = prompts::parse_selector_user(prompts::selector_user("q?", "m", candidates));
    REQUIRE(parsed.has_value());
    CHECK(parsed->question == "q?");
    CHECK(parsed->mention == "m");
    CHECK(parsed->candidates == candidates);
    CHECK(prompts::parse_selector_user("nope") == std::nullopt);
    CHECK_FALSE(prompts::translator_system().empty());
    CHECK_FALSE(prompts::selector_system().empty());
    CHECK_FALSE(prompts::reader_system().empty());
}

TEST_CASE("backend factory") {
    BackendConfig stub;
    stub.kind = "stub";
    CHECK(make_backend(ModelRole::selector, stub) != nullptr);
    CHECK(make_backend(ModelRole::reader, stub) != nullptr);

    stub.table = support::fixture_path("tiny_translations.json").string();
    auto translator = make_backend(ModelRole::translator, stub);
    ModelRequest request;
    request.user_content = "What is the capital of China?";
    CHECK_FALSE(translator->complete(request).empty());

    BackendConfig unknown;
    unknown.kind = "bogus";
    CHECK_THROWS_AS(make_backend(ModelRole::translator, unknown), ConfigError);

    BackendConfig missing;
    missing.kind = "http";
    missing.model = "m";
    CHECK_THROWS_AS(make_backend(ModelRole::translator, missing), ConfigError);
    missing.model = "";
    missing.endpoint = "http://x/y";
    CHECK_THROWS_AS(make_backend(ModelRole::translator, missing), ConfigError);
}

TEST_CASE("http backend speaks the chat-completions protocol") {
    httplib::Server server;

    std::string seen_body;
    std::string seen_auth;
    std::string seen_path;
    auto capture = [&](const httplib::Request& req) {
        seen_body = req.body;
        seen_auth = req.get_header_value("Authorization");
        seen_path = req.path;
    };

    json ok;
    ok["choices"][0]["message"]["content"] = "hello from the wire";
    const std::string ok_payload = ok.dump();

    server.Post("/custom/chat", [&](const httplib::Request& req, httplib::Response& res) {
        capture(req);
        res.set_content(ok_payload, "application/json");
    });
    server.Post("/v1/chat/completions",
                [&](const httplib::Request& req, httplib::Response& res) {
                    capture(req);
                    res.set_content(ok_payload, "application/json");
                });
    server.Post("/error", [&](const httplib::Request&, httplib::Response& res) {
        res.status = 500;
        res.set_content("boom", "text/plain");
    });
    server.Post("/notjson", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("certainly not json", "text/plain");
    });
    server.Post("/nochoices", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"choices": []})", "application/json");
    });
    server.Post("/nomessage", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"choices": [{"x": 1}]})", "application/json");
    });
    server.Post("/nocontent", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"choices": [{"message": {"content": 42}}]})", "application/json");
    });

    const int port = server.bind_to_any_port("127.0.0.1");
    if (port <= 0) {
        WARN("cannot bind a loopback port; skipping http backend checks");
        return;
    }
    std::thread serving([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    const std::string base = "http://127.0.0.1:" + std::to_string(port);

    setenv("KGQA_TEST_API_KEY", "secret-key-xyz", 1);
    BackendConfig config;
    config.kind = "http";
    config.model = "test-model";
    config.api_key_env = "KGQA_TEST_API_KEY";
    config.timeout_ms = 5000;

    ModelRequest request;
    request.system_instruction = "be terse";
    request.user_content = "say hello";

    {
        config.endpoint = base + "/custom/chat";
        auto backend = make_backend(ModelRole::translator, config);
        CHECK(backend->complete(request) == "hello from the wire");
        CHECK(seen_path == "/custom/chat");
        CHECK(seen_auth == "Bearer secret-key-xyz");

        const json body = json::parse(seen_body);
        CHECK(body["model"] == "test-model");
        REQUIRE(body["messages"].is_array());
        REQUIRE(body["messages"].size() == 2);
        CHECK(body["messages"][0]["role"] == "system");
        CHECK(body["messages"][0]["content"] == "be terse");
        CHECK(body["messages"][1]["role"] == "user");
        CHECK(body["messages"][1]["content"] == "say hello");
    }

    {
        // A bare origin defaults to the standard chat-completions path.
        config.endpoint = base;
        auto backend = make_backend(ModelRole::translator, config);
        CHECK(backend->complete(request) == "hello from the wire");
        CHECK(seen_path == "/v1/chat/completions");
    }

    {
        // Without the env var no Authorization header is sent.
        config.endpoint = base + "/custom/chat";
        config.api_key_env = "KGQA_TEST_API_KEY_UNSET";
        unsetenv("KGQA_TEST_API_KEY_UNSET");
        auto backend = make_backend(ModelRole::translator, config);
        CHECK(backend->complete(request) == "hello from the wire");
        CHECK(seen_auth.empty());
        config.api_key_env = "KGQA_TEST_API_KEY";
    }

    {
        config.endpoint = base + "/error";
        auto backend = make_backend(ModelRole::translator, config);
        try {
            backend->complete(request);
            FAIL("expected GatewayError");
        } catch (const GatewayError& e) {
            CHECK(e.attempts() == 1);     // status errors are not retried
            CHECK_FALSE(e.retryable());
        }
    }

    auto expect_malformed = [&](const std::string& path, const std::string& message) {
        config.endpoint = base + path;
        auto backend = make_backend(ModelRole::translator, config);
        CHECK_THROWS_WITH_AS(backend->complete(request), message.c_str(),
                             MalformedResponseError);
    };
    expect_malformed("/notjson", "response body is not JSON");
    expect_malformed("/nochoices", "response has no choices");
    expect_malformed("/nomessage", "response choice has no message object");
    expect_malformed("/nocontent", "response lacks choices[0].message.content text");

    server.stop();
    serving.join();

    {
        // Transport failures retry, then surface as retryable.
        config.endpoint = "http://127.0.0.1:" + std::to_string(port);
        config.timeout_ms = 200;
        auto backend = make_backend(ModelRole::translator, config);
        try {
            backend->complete(request);
            FAIL("expected GatewayError");
        } catch (const GatewayError& e) {
            CHECK(e.attempts() == 3);
            CHECK(e.retryable());
        }
    }
}
