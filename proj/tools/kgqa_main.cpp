// Command-line front end: graph inspection, single-question debugging for
// both workflows, full benchmark runs, and report re-evaluation.
//
// Exit codes: 0 success, 1 configuration or load failure, 2 benchmark run
// completed but recorded per-question errors.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "kgqa/cql.hpp"
#include "kgqa/errors.hpp"
#include "kgqa/gateway.hpp"
#include "kgqa/kg.hpp"
#include "kgqa/metrics.hpp"
#include "kgqa/pipeline.hpp"
#include "kgqa/prompts.hpp"
#include "kgqa/repair.hpp"
#include "kgqa/retrieval.hpp"
#include "kgqa/text.hpp"

namespace {

using kgqa::pipeline::PipelineConfig;

// CLI debugging commands have no gold answers, so oracle selection cannot
// run; they silently fall back to the heuristic rule.
kgqa::repair::ErrConfig cli_err_config(const PipelineConfig& config) {
    kgqa::repair::ErrConfig err = config.err;
    if (err.selection_mode == kgqa::repair::SelectionMode::oracle) {
        err.selection_mode = kgqa::repair::SelectionMode::heuristic;
        std::cerr << "note: oracle selection needs gold answers; using heuristic\n";
    }
    return err;
}

int cmd_kg_stats(const std::string& graph_path) {
    auto graph = kgqa::kg::KnowledgeGraph::load_file(graph_path);
    std::cout << "triples: " << graph.triples().size() << "\n"
              << "entities: " << graph.entity_names().size() << "\n"
              << "relations: " << graph.relation_names().size() << "\n";
    return 0;
}

int cmd_translate(const std::string& question, const std::string& config_path) {
    PipelineConfig config = kgqa::pipeline::load_config(config_path);
    auto graph = kgqa::kg::KnowledgeGraph::load_file(config.graph);
    auto translator = kgqa::gateway::make_backend(kgqa::gateway::ModelRole::translator,
                                                  config.translator);
    auto selector = kgqa::gateway::make_backend(kgqa::gateway::ModelRole::selector,
                                                config.selector);

    kgqa::gateway::ModelRequest request;
    request.role = kgqa::gateway::ModelRole::translator;
    request.system_instruction = kgqa::prompts::translator_system();
    request.user_content = kgqa::prompts::translator_user(question);
    std::string generated(kgqa::text::trim(kgqa::gateway::generate(request, *translator).text));
    if (generated.empty()) {
        std::cout << "generated: (none)\n";
        return 0;
    }
    std::cout << "generated: " << generated << "\n";

    auto correction = kgqa::repair::correct_cql(question, generated, graph,
                                                cli_err_config(config), *selector);
    std::cout << "corrected: " << correction.best << "\n";
    for (const auto& warning : correction.warnings) std::cerr << "warning: " << warning << "\n";
    try {
        std::cout << "answers:\n";
        for (const auto& answer : kgqa::cql::execute_cql(correction.best, graph))
            std::cout << answer << "\n";
    } catch (const kgqa::Error& e) {
        std::cerr << "warning: corrected query does not execute: " << e.what() << "\n";
    }
    return 0;
}

int cmd_err(const std::string& question, const std::string& cql_text,
            const std::string& config_path) {
    PipelineConfig config = kgqa::pipeline::load_config(config_path);
    auto graph = kgqa::kg::KnowledgeGraph::load_file(config.graph);
    auto selector = kgqa::gateway::make_backend(kgqa::gateway::ModelRole::selector,
                                                config.selector);
    auto correction = kgqa::repair::correct_cql(question, cql_text, graph,
                                                cli_err_config(config), *selector);
    std::cout << "best: " << correction.best << "\n";
    for (const auto& candidate : correction.candidates)
        std::cout << "candidate: " << candidate << "\n";
    for (const auto& [mention, name] : correction.chosen_entities)
        std::cout << "entity: " << mention << " -> " << name << "\n";
    for (const auto& relation : correction.chosen_relations)
        std::cout << "relation: " << relation << "\n";
    for (const auto& warning : correction.warnings) std::cerr << "warning: " << warning << "\n";
    return 0;
}

int cmd_search(const std::string& question, const std::string& config_path) {
    PipelineConfig config = kgqa::pipeline::load_config(config_path);
    auto graph = kgqa::kg::KnowledgeGraph::load_file(config.graph);
    auto reader = kgqa::gateway::make_backend(kgqa::gateway::ModelRole::reader, config.reader);
    for (const auto& answer : kgqa::retrieval::answer_by_retrieval(question, graph, *reader))
        std::cout << answer << "\n";
    return 0;
}

int cmd_run(const std::string& config_path, std::optional<std::size_t> concurrency,
            const std::string& out_path) {
    PipelineConfig config = kgqa::pipeline::load_config(config_path);
    if (concurrency) config.concurrency = *concurrency;
    auto result = kgqa::pipeline::run_benchmark(config);
    std::string report = kgqa::pipeline::serialize_report(result, config);
    if (out_path.empty()) {
        std::cout << report;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw kgqa::ConfigError("cannot write report: " + out_path);
        out << report;
    }
    return result.any_errors() ? 2 : 0;
}

int cmd_eval(const std::string& report_path) {
    std::ifstream in(report_path);
    if (!in) throw kgqa::ConfigError("cannot open report: " + report_path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("questions") ||
        !doc["questions"].is_array())
        throw kgqa::ConfigError("report must be a JSON object with a \"questions\" array");

    std::vector<kgqa::metrics::EvaluationRecord> records;
    for (const auto& q : doc["questions"]) {
        if (!q.is_object()) throw kgqa::ConfigError("every question record must be an object");
        auto answers = [&](const char* key) {
            kgqa::AnswerSet set;
            if (q.contains(key) && q[key].is_array())
                for (const auto& a : q[key])
                    if (a.is_string()) set.insert(a.get<std::string>());
            return set;
        };
        std::optional<std::string> gold_cql;
        if (q.contains("gold_cql") && q["gold_cql"].is_string())
            gold_cql = q["gold_cql"].get<std::string>();
        std::optional<std::string> pred_cql;
        if (q.contains("pred_cql") && q["pred_cql"].is_string())
            pred_cql = q["pred_cql"].get<std::string>();
        records.push_back(kgqa::metrics::evaluate(q.value("question", std::string()), gold_cql,
                                                  pred_cql, answers("gold_answers"),
                                                  answers("pred_answers")));
    }
    std::cout << "records: " << records.size() << "\n";
    if (records.empty()) return 0;
    auto report = kgqa::metrics::aggregate(std::move(records));
    std::cout << "acc_lx: " << report.acc_lx << "\n"
              << "acc_ex: " << report.acc_ex << "\n"
              << "macro_p: " << report.macro_p << "\n"
              << "macro_r: " << report.macro_r << "\n"
              << "macro_f1: " << report.macro_f1 << "\n";

    if (doc.contains("aggregates") && doc["aggregates"].is_object()) {
        const auto& stored = doc["aggregates"];
        auto matches = [&](const char* key, double recomputed) {
            return stored.contains(key) && stored[key].is_number() &&
                   std::abs(stored[key].get<double>() - recomputed) <= 1e-9;
        };
        if (!matches("acc_lx", report.acc_lx) || !matches("acc_ex", report.acc_ex) ||
            !matches("macro_p", report.macro_p) || !matches("macro_r", report.macro_r) ||
            !matches("macro_f1", report.macro_f1)) {
            std::cerr << "error: stored aggregates disagree with recomputation\n";
            return 1;
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"question answering over a property-graph knowledge base"};
    app.require_subcommand(1);

    auto* kg_cmd = app.add_subcommand("kg", "knowledge graph utilities");
    kg_cmd->require_subcommand(1);
    std::string graph_path;
    auto* stats_cmd = kg_cmd->add_subcommand("stats", "print triple/entity/relation counts");
    stats_cmd->add_option("graph", graph_path, "triple CSV file")->required();

    std::string question;
    std::string config_path;
    auto* translate_cmd =
        app.add_subcommand("translate", "translate one question to CQL, repair, and execute");
    translate_cmd->add_option("question", question, "natural-language question")->required();
    translate_cmd->add_option("-c,--config", config_path, "pipeline config JSON")->required();

    std::string cql_text;
    auto* err_cmd = app.add_subcommand("err", "repair entity/relation names in a CQL query");
    err_cmd->add_option("question", question, "natural-language question")->required();
    err_cmd->add_option("cql", cql_text, "query to repair")->required();
    err_cmd->add_option("-c,--config", config_path, "pipeline config JSON")->required();

    auto* search_cmd = app.add_subcommand("search", "answer one question by retrieval");
    search_cmd->add_option("question", question, "natural-language question")->required();
    search_cmd->add_option("-c,--config", config_path, "pipeline config JSON")->required();

    std::string run_config;
    std::string out_path;
    std::optional<std::size_t> concurrency;
    auto* run_cmd = app.add_subcommand("run", "run the benchmark described by a config");
    run_cmd->add_option("config", run_config, "pipeline config JSON")->required();
    run_cmd->add_option("--concurrency", concurrency, "override the config's concurrency cap");
    run_cmd->add_option("-o,--out", out_path, "write the report here instead of stdout");

    std::string report_path;
    auto* eval_cmd = app.add_subcommand("eval", "recompute metrics from a report's records");
    eval_cmd->add_option("report", report_path, "report JSON produced by run")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (stats_cmd->parsed()) return cmd_kg_stats(graph_path);
        if (translate_cmd->parsed()) return cmd_translate(question, config_path);
        if (err_cmd->parsed()) return cmd_err(question, cql_text, config_path);
        if (search_cmd->parsed()) return cmd_search(question, config_path);
        if (run_cmd->parsed()) return cmd_run(run_config, concurrency, out_path);
        if (eval_cmd->parsed()) return cmd_eval(report_path);
    } catch (const kgqa::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
