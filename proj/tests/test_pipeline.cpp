#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "kgqa/errors.hpp"
#include "kgqa/pipeline.hpp"
#include "support.hpp"

using namespace kgqa;
using namespace kgqa::pipeline;
using json = nlohmann::json;

namespace {

const AnswerSet kMovies = {"Police Story", "Rush Hour", "Shinjuku Incident"};

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

PipelineConfig tiny_config() {
    return load_config(support::fixture_path("tiny_config.json").string());
}

} // namespace

TEST_CASE("dataset loading") {
    auto examples = load_dataset(support::fixture_path("tiny_dataset.jsonl").string());
    REQUIRE(examples.size() == 5);
    CHECK(examples[0].question ==
          "What are the classic movies of Jackie Chan [Hong Kong actor]?");
    CHECK(examples[0].gold_answers == kMovies);
    CHECK(examples[0].gold_cql.has_value());
    CHECK_FALSE(examples[2].gold_cql.has_value()); // unannotated question
    CHECK(examples[1].gold_answers == AnswerSet{"Beijing"});

    SUBCASE("blank lines are skipped, order preserved") {
        std::istringstream in(R"({"question": "a?", "answers": []})"
                              "\n\n"
                              R"({"question": "b?", "answers": ["x"]})"
                              "\n");
        auto loaded = load_dataset(in);
        REQUIRE(loaded.size() == 2);
        CHECK(loaded[0].question == "a?");
        CHECK(loaded[0].gold_answers.empty());
        CHECK(loaded[1].gold_answers == AnswerSet{"x"});
    }

    SUBCASE("malformed lines carry their line number") {
        std::istringstream bad_json("{\"question\": \"a?\", \"answers\": []}\nnot json\n");
        CHECK_THROWS_WITH_AS(load_dataset(bad_json), "line 2: not a JSON object", DatasetError);

        std::istringstream no_question("{\"answers\": []}\n");
        CHECK_THROWS_WITH_AS(load_dataset(no_question),
                             "line 1: \"question\" must be a non-empty string", DatasetError);

        std::istringstream bad_answers("{\"question\": \"a?\", \"answers\": \"x\"}\n");
        CHECK_THROWS_WITH_AS(load_dataset(bad_answers),
                             "line 1: \"answers\" must be an array of strings", DatasetError);

        std::istringstream bad_cql("{\"question\": \"a?\", \"cql\": 1, \"answers\": []}\n");
        CHECK_THROWS_WITH_AS(load_dataset(bad_cql),
                             "line 1: \"cql\" must be a string when present", DatasetError);

        CHECK_THROWS_AS(load_dataset(std::string("/nonexistent/data.jsonl")), DatasetError);
    }
}

TEST_CASE("config loading resolves paths and validates fields") {
    auto config = tiny_config();
    CHECK(config.graph.ends_with("tiny_kg.csv"));
    CHECK(std::filesystem::exists(config.graph));
    CHECK(std::filesystem::exists(config.dataset));
    CHECK(config.err.top_k == 3);
    CHECK(config.err.selection_mode == repair::SelectionMode::oracle);
    CHECK(config.fusion.sigma == 1.0);
    CHECK(config.fusion.rule == fusion::Rule::dda);
    CHECK(config.workflow == Workflow::both);
    CHECK(config.concurrency == 1);
    CHECK(config.translator.kind == "stub");
    CHECK(config.translator.table.ends_with("tiny_translations.json"));

    SUBCASE("rejects bad fields") {
        CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);

        auto no_graph = write_temp("kgqa_cfg_nograph.json", R"({"dataset": "d.jsonl"})");
        CHECK_THROWS_AS(load_config(no_graph.string()), ConfigError);

        auto bad_flow = write_temp("kgqa_cfg_flow.json",
                                   R"({"graph": "g.csv", "dataset": "d.jsonl",)"
                                   R"( "workflows": "sideways"})");
        CHECK_THROWS_AS(load_config(bad_flow.string()), ConfigError);

        auto bad_conc = write_temp("kgqa_cfg_conc.json",
                                   R"({"graph": "g.csv", "dataset": "d.jsonl",)"
                                   R"( "concurrency": 0})");
        CHECK_THROWS_AS(load_config(bad_conc.string()), ConfigError);

        auto bad_sigma = write_temp("kgqa_cfg_sigma.json",
                                    R"({"graph": "g.csv", "dataset": "d.jsonl",)"
                                    R"( "fusion": {"sigma": 1.5}})");
        CHECK_THROWS_AS(load_config(bad_sigma.string()), ConfigError);

        for (auto p : {"kgqa_cfg_nograph.json", "kgqa_cfg_flow.json", "kgqa_cfg_conc.json",
                       "kgqa_cfg_sigma.json"})
            std::filesystem::remove(std::filesystem::temp_directory_path() / p);
    }
}

TEST_CASE("difficulty classification") {
    CHECK(difficulty_of(std::nullopt) == "simple");
    CHECK(difficulty_of(std::string(
              R"(match (:ENTITY{name:"China"})-[:Relationship{name:"capital"}]->(c))"
              R"( return c.name)")) == "simple");
    CHECK(difficulty_of(std::string(
              R"(match ()-[:Relationship{name:"r"}]->(v) where v.name = "x" return v.name)")) ==
          "complex");
    CHECK(difficulty_of(std::string(
              R"(match ()-[:Relationship{name:"r"}]->(v) return count(*))")) == "complex");
    CHECK(difficulty_of(std::string(
              R"(match ()-[:Relationship{name:"r"}]->(v) return v.name order by v.name)")) ==
          "complex");
    // Two relation mentions (a two-hop path) count as complex.
    CHECK(difficulty_of(std::string(
              R"(match (:ENTITY{name:"a"})-[:Relationship{name:"r1"}]->(x))"
              R"(-[:Relationship{name:"r2"}]->(y) return y.name)")) == "complex");
    // Unparseable text falls back to keyword heuristics.
    CHECK(difficulty_of(std::string("totally broken where v.name = \"x\"")) == "complex");
    CHECK(difficulty_of(std::string("gibberish")) == "simple");
}

TEST_CASE("benchmark over the movie fixtures") {
    auto config = tiny_config();
    auto result = run_benchmark(config);

    REQUIRE(result.questions.size() == 5);
    CHECK_FALSE(result.any_errors());

    CHECK(result.report.acc_ex == doctest::Approx(1.0));
    CHECK(result.report.acc_lx == doctest::Approx(0.6));
    CHECK(result.report.macro_f1 == doctest::Approx(1.0));

    const auto& q1 = result.questions[0];
    CHECK(q1.eval.pred_answers == kMovies);
    CHECK(q1.translator_answers == kMovies);
    CHECK(q1.searcher_answers == kMovies);
    CHECK(q1.eval.logical_match);
    CHECK(q1.difficulty == "simple");

    // Question 3 has no scripted translation: the searcher path carries it.
    const auto& q3 = result.questions[2];
    REQUIRE(q3.translator_answers.has_value());
    CHECK(q3.translator_answers->empty());
    CHECK_FALSE(q3.eval.pred_cql.has_value());
    CHECK(q3.eval.pred_answers == kMovies);
    bool noted = false;
    for (const auto& w : q3.warnings) noted = noted || w == "translator produced no query";
    CHECK(noted);

    // Question 4: retrieval finds nothing (the question never names the
    // entity exactly), but the repaired query answers it.
    const auto& q4 = result.questions[3];
    REQUIRE(q4.searcher_answers.has_value());
    CHECK(q4.searcher_answers->empty());
    CHECK(q4.eval.pred_answers == AnswerSet{"actor"});
    CHECK(q4.eval.logical_match);

    // Question 5: the translator confidently answers the wrong question;
    // the decision rule hands the final answer to retrieval.
    const auto& q5 = result.questions[4];
    CHECK(q5.translator_answers == AnswerSet{"actor"});
    CHECK(q5.searcher_answers == AnswerSet{"Beijing"});
    CHECK(q5.eval.pred_answers == AnswerSet{"Beijing"});
    CHECK(q5.eval.execution_match);
    CHECK_FALSE(q5.eval.logical_match);
}

TEST_CASE("workflow restriction changes scores the expected way") {
    auto config = tiny_config();

    config.workflow = Workflow::translator_only;
    auto translator_only = run_benchmark(config);
    CHECK(translator_only.report.acc_ex == doctest::Approx(0.6));
    for (const auto& q : translator_only.questions)
        CHECK_FALSE(q.searcher_answers.has_value());

    config.workflow = Workflow::searcher_only;
    auto searcher_only = run_benchmark(config);
    CHECK(searcher_only.report.acc_ex == doctest::Approx(0.8));
    CHECK(searcher_only.report.acc_lx == doctest::Approx(0.0));
    for (const auto& q : searcher_only.questions)
        CHECK_FALSE(q.translator_answers.has_value());

    config.workflow = Workflow::both;
    auto both = run_benchmark(config);
    CHECK(both.report.acc_ex == doctest::Approx(1.0));
    CHECK(both.report.acc_ex >= translator_only.report.acc_ex);
    CHECK(both.report.acc_ex >= searcher_only.report.acc_ex);
}

TEST_CASE("reports are deterministic and scheduling-independent") {
    auto config = tiny_config();
    auto first = serialize_report(run_benchmark(config), config);

    config.concurrency = 8;
    auto concurrent = serialize_report(run_benchmark(config), config);
    CHECK(first == concurrent);

    const json doc = json::parse(first);
    CHECK(doc["config"].contains("graph"));
    CHECK_FALSE(doc["config"].contains("concurrency")); // run mechanics stay out
    CHECK(doc["aggregates"]["acc_ex"] == 1.0);
    CHECK(doc["difficulty"]["simple"]["count"] == 5);
    CHECK(doc["difficulty"]["complex"]["count"] == 0);
    REQUIRE(doc["questions"].is_array());
    REQUIRE(doc["questions"].size() == 5);
    const json& q1 = doc["questions"][0];
    for (auto key : {"question", "difficulty", "gold_cql", "pred_cql", "gold_answers",
                     "pred_answers", "p", "r", "f1", "logical_match", "execution_match",
                     "warnings", "errors"})
        CHECK(q1.contains(key));
    CHECK(q1["pred_answers"].size() == 3);
    CHECK(doc["questions"][2]["pred_cql"].is_null());
}

TEST_CASE("per-question failures are recorded, not fatal") {
    // A translator pointing at a dead port fails after its retries; the
    // searcher still answers and the run completes.
    auto dataset = write_temp("kgqa_pipe_dead_data.jsonl",
                              R"({"question": "What is the capital of China?",)"
                              R"( "answers": ["Beijing"]})"
                              "\n");
    json cfg;
    cfg["graph"] = support::fixture_path("tiny_kg.csv").string();
    cfg["dataset"] = dataset.string();
    cfg["backends"]["translator"] = {{"kind", "http"},
                                     {"endpoint", "http://127.0.0.1:9"},
                                     {"model", "m"},
                                     {"timeout_ms", 200}};
    auto cfg_path = write_temp("kgqa_pipe_dead_cfg.json", cfg.dump());

    auto config = load_config(cfg_path.string());
    auto result = run_benchmark(config);
    REQUIRE(result.questions.size() == 1);
    CHECK(result.any_errors());
    REQUIRE_FALSE(result.questions[0].errors.empty());
    CHECK(result.questions[0].errors[0].starts_with("translator path failed:"));
    CHECK(result.questions[0].searcher_answers == AnswerSet{"Beijing"});
    CHECK(result.questions[0].eval.pred_answers == AnswerSet{"Beijing"});

    std::filesystem::remove(dataset);
    std::filesystem::remove(cfg_path);
}

TEST_CASE("an empty dataset produces an empty but serializable run") {
    auto dataset = write_temp("kgqa_pipe_empty_data.jsonl", "");
    json cfg;
    cfg["graph"] = support::fixture_path("tiny_kg.csv").string();
    cfg["dataset"] = dataset.string();
    auto cfg_path = write_temp("kgqa_pipe_empty_cfg.json", cfg.dump());

    auto config = load_config(cfg_path.string());
    auto result = run_benchmark(config);
    CHECK(result.questions.empty());
    CHECK_FALSE(result.any_errors());
    const json doc = json::parse(serialize_report(result, config));
    CHECK(doc["questions"].empty());
    CHECK(doc["difficulty"]["simple"]["count"] == 0);

    std::filesystem::remove(dataset);
    std::filesystem::remove(cfg_path);
}
