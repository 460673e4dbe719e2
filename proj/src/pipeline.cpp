#include "kgqa/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>
#include <utility>

#include <json.hpp>

#include "kgqa/cql.hpp"
#include "kgqa/errors.hpp"
#include "kgqa/kg.hpp"
#include "kgqa/prompts.hpp"
#include "kgqa/retrieval.hpp"
#include "kgqa/text.hpp"

namespace kgqa::pipeline {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string resolve_path(const std::filesystem::path& base, const std::string& path) {
    if (path.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (base / p).lexically_normal().string();
}

gateway::BackendConfig parse_backend(const json& node, const std::filesystem::path& base,
                                     const char* role) {
    gateway::BackendConfig cfg;
    if (node.is_null()) return cfg;
    if (!node.is_object())
        throw ConfigError(std::string("backends.") + role + " must be an object");
    cfg.kind = node.value("kind", std::string("stub"));
    cfg.table = resolve_path(base, node.value("table", std::string()));
    cfg.endpoint = node.value("endpoint", std::string());
    cfg.model = node.value("model", std::string());
    cfg.api_key_env = node.value("api_key_env", std::string());
    cfg.timeout_ms = node.value("timeout_ms", cfg.timeout_ms);
    return cfg;
}

ordered_json backend_snapshot(const gateway::BackendConfig& cfg) {
    ordered_json out;
    out["kind"] = cfg.kind;
    if (!cfg.table.empty()) out["table"] = cfg.table;
    if (!cfg.endpoint.empty()) out["endpoint"] = cfg.endpoint;
    if (!cfg.model.empty()) out["model"] = cfg.model;
    if (!cfg.api_key_env.empty()) out["api_key_env"] = cfg.api_key_env;
    return out;
}

std::string_view workflow_name(Workflow w) {
    switch (w) {
    case Workflow::translator_only: return "translator-only";
    case Workflow::searcher_only: return "searcher-only";
    case Workflow::both: return "both";
    }
    return "both";
}

ordered_json answers_json(const AnswerSet& answers) {
    ordered_json arr = ordered_json::array();
    for (const auto& a : answers) arr.push_back(a);
    return arr;
}

ordered_json aggregates_json(const metrics::Report& report) {
    ordered_json out;
    out["acc_lx"] = report.acc_lx;
    out["acc_ex"] = report.acc_ex;
    out["macro_p"] = report.macro_p;
    out["macro_r"] = report.macro_r;
    out["macro_f1"] = report.macro_f1;
    return out;
}

void process_question(const DatasetExample& example, const kg::KnowledgeGraph& graph,
                      const PipelineConfig& config, gateway::ModelBackend& translator,
                      gateway::ModelBackend& selector, gateway::ModelBackend& reader,
                      QuestionRecord& record) {
    const bool run_translator = config.workflow != Workflow::searcher_only;
    const bool run_searcher = config.workflow != Workflow::translator_only;
    std::optional<std::string> pred_cql;
    AnswerSet s_answers;
    AnswerSet i_answers;

    if (run_translator) {
        try {
            gateway::ModelRequest request;
            request.role = gateway::ModelRole::translator;
            request.system_instruction = prompts::translator_system();
            request.user_content = prompts::translator_user(example.question);
            std::string generated(text::trim(gateway::generate(request, translator).text));
            if (generated.empty()) {
                record.warnings.push_back("translator produced no query");
            } else {
                auto correction =
                    repair::correct_cql(example.question, generated, graph, config.err,
                                        selector, example.gold_answers);
                pred_cql = correction.best;
                for (auto& w : correction.warnings) record.warnings.push_back(std::move(w));
                try {
                    s_answers = cql::execute_cql(correction.best, graph);
                } catch (const std::exception& e) {
                    record.errors.push_back(std::string("query execution failed: ") + e.what());
                }
            }
        } catch (const std::exception& e) {
            record.errors.push_back(std::string("translator path failed: ") + e.what());
        }
        record.translator_answers = s_answers;
    }

    if (run_searcher) {
        try {
            i_answers = retrieval::answer_by_retrieval(example.question, graph, reader);
        } catch (const std::exception& e) {
            record.errors.push_back(std::string("searcher path failed: ") + e.what());
        }
        record.searcher_answers = i_answers;
    }

    AnswerSet final_answers;
    if (config.workflow == Workflow::translator_only) final_answers = s_answers;
    else if (config.workflow == Workflow::searcher_only) final_answers = i_answers;
    else final_answers = fusion::fuse(config.fusion, s_answers, i_answers, example.gold_answers);

    record.eval = metrics::evaluate(example.question, example.gold_cql, pred_cql,
                                    example.gold_answers, std::move(final_answers));
    record.difficulty = difficulty_of(example.gold_cql);
}

} // namespace

std::vector<DatasetExample> load_dataset(std::istream& in) {
    std::vector<DatasetExample> examples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (text::trim(line).empty()) continue;

        json doc = json::parse(line, nullptr, false);
        if (doc.is_discarded() || !doc.is_object())
            throw DatasetError(line_no, "not a JSON object");
        DatasetExample ex;
        if (!doc.contains("question") || !doc["question"].is_string() ||
            doc["question"].get<std::string>().empty())
            throw DatasetError(line_no, "\"question\" must be a non-empty string");
        ex.question = doc["question"].get<std::string>();
        if (doc.contains("cql")) {
            if (!doc["cql"].is_string())
                throw DatasetError(line_no, "\"cql\" must be a string when present");
            ex.gold_cql = doc["cql"].get<std::string>();
        }
        if (!doc.contains("answers") || !doc["answers"].is_array())
            throw DatasetError(line_no, "\"answers\" must be an array of strings");
        for (const auto& a : doc["answers"]) {
            if (!a.is_string())
                throw DatasetError(line_no, "\"answers\" must be an array of strings");
            ex.gold_answers.insert(a.get<std::string>());
        }
        examples.push_back(std::move(ex));
    }
    return examples;
}

std::vector<DatasetExample> load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError(0, "cannot open dataset: " + path);
    return load_dataset(in);
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw ConfigError("config must be a JSON object: " + path);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();

    PipelineConfig cfg;
    if (!doc.contains("graph") || !doc["graph"].is_string())
        throw ConfigError("config needs a \"graph\" path");
    if (!doc.contains("dataset") || !doc["dataset"].is_string())
        throw ConfigError("config needs a \"dataset\" path");
    cfg.graph = resolve_path(base, doc["graph"].get<std::string>());
    cfg.dataset = resolve_path(base, doc["dataset"].get<std::string>());

    if (doc.contains("err")) {
        const json& err = doc["err"];
        if (!err.is_object()) throw ConfigError("\"err\" must be an object");
        cfg.err.top_k = err.value("top_k", cfg.err.top_k);
        cfg.err.candidate_limit = err.value("candidate_limit", cfg.err.candidate_limit);
        std::string mode = err.value("selection_mode", std::string("heuristic"));
        if (mode == "oracle") cfg.err.selection_mode = repair::SelectionMode::oracle;
        else if (mode == "heuristic") cfg.err.selection_mode = repair::SelectionMode::heuristic;
        else throw ConfigError("err.selection_mode must be \"oracle\" or \"heuristic\"");
        if (cfg.err.top_k < 1) throw ConfigError("err.top_k must be at least 1");
        if (cfg.err.candidate_limit < cfg.err.top_k)
            throw ConfigError("err.candidate_limit must be at least err.top_k");
    }
    if (doc.contains("fusion")) {
        const json& fus = doc["fusion"];
        if (!fus.is_object()) throw ConfigError("\"fusion\" must be an object");
        cfg.fusion.sigma = fus.value("sigma", cfg.fusion.sigma);
        if (cfg.fusion.sigma < 0.0 || cfg.fusion.sigma > 1.0)
            throw ConfigError("fusion.sigma must lie in [0, 1]");
        std::string rule = fus.value("rule", std::string("dda"));
        if (rule == "dda") cfg.fusion.rule = fusion::Rule::dda;
        else if (rule == "bna") cfg.fusion.rule = fusion::Rule::bna;
        else throw ConfigError("fusion.rule must be \"dda\" or \"bna\"");
    }
    if (doc.contains("backends")) {
        const json& backends = doc["backends"];
        if (!backends.is_object()) throw ConfigError("\"backends\" must be an object");
        cfg.translator = parse_backend(backends.value("translator", json()), base, "translator");
        cfg.selector = parse_backend(backends.value("selector", json()), base, "selector");
        cfg.reader = parse_backend(backends.value("reader", json()), base, "reader");
    }
    if (doc.contains("workflows")) {
        std::string w = doc["workflows"].is_string() ? doc["workflows"].get<std::string>() : "";
        if (w == "translator-only") cfg.workflow = Workflow::translator_only;
        else if (w == "searcher-only") cfg.workflow = Workflow::searcher_only;
        else if (w == "both") cfg.workflow = Workflow::both;
        else
            throw ConfigError(
                "workflows must be \"translator-only\", \"searcher-only\", or \"both\"");
    }
    if (doc.contains("concurrency")) {
        if (!doc["concurrency"].is_number_unsigned() || doc["concurrency"].get<std::size_t>() < 1)
            throw ConfigError("concurrency must be a positive integer");
        cfg.concurrency = doc["concurrency"].get<std::size_t>();
    }
    return cfg;
}

std::string difficulty_of(const std::optional<std::string>& gold_cql) {
    if (!gold_cql) return "simple";
    const std::string& raw = *gold_cql;
    if (cql::extract_entities(raw).size() >= 2 || cql::extract_relations(raw).size() >= 2)
        return "complex";
    try {
        cql::CqlAst ast = cql::parse_cql(raw);
        if (ast.ret.count_star || !ast.where.empty() || ast.order_by) return "complex";
    } catch (const ParseError&) {
        std::string norm = metrics::normalize_cql(raw);
        if (norm.find("count(*)") != std::string::npos ||
            norm.find(" where ") != std::string::npos ||
            norm.find(" order by ") != std::string::npos)
            return "complex";
    }
    return "simple";
}

bool RunResult::any_errors() const {
    for (const auto& q : questions)
        if (!q.errors.empty()) return true;
    return false;
}

RunResult run_benchmark(const PipelineConfig& config) {
    if (config.err.top_k < 1) throw ConfigError("err.top_k must be at least 1");
    if (config.err.candidate_limit < config.err.top_k)
        throw ConfigError("err.candidate_limit must be at least err.top_k");
    if (config.fusion.sigma < 0.0 || config.fusion.sigma > 1.0)
        throw ConfigError("fusion.sigma must lie in [0, 1]");
    if (config.concurrency < 1) throw ConfigError("concurrency must be a positive integer");

    const kg::KnowledgeGraph graph = kg::KnowledgeGraph::load_file(config.graph);
    const std::vector<DatasetExample> dataset = load_dataset(config.dataset);
    auto translator = gateway::make_backend(gateway::ModelRole::translator, config.translator);
    auto selector = gateway::make_backend(gateway::ModelRole::selector, config.selector);
    auto reader = gateway::make_backend(gateway::ModelRole::reader, config.reader);

    RunResult result;
    result.questions.resize(dataset.size());

    // Each worker claims question indexes and fills its own slot, so record
    // order (and therefore the report) is independent of scheduling.
    auto worker_body = [&](std::size_t index) {
        process_question(dataset[index], graph, config, *translator, *selector, *reader,
                         result.questions[index]);
    };
    const std::size_t workers =
        std::min<std::size_t>(config.concurrency, std::max<std::size_t>(dataset.size(), 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < dataset.size(); ++i) worker_body(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < dataset.size();
                     i = next.fetch_add(1))
                    worker_body(i);
            });
        }
        for (auto& t : pool) t.join();
    }

    if (!result.questions.empty()) {
        std::vector<metrics::EvaluationRecord> records;
        records.reserve(result.questions.size());
        for (const auto& q : result.questions) records.push_back(q.eval);
        result.report = metrics::aggregate(std::move(records));
    }
    return result;
}

std::string serialize_report(const RunResult& result, const PipelineConfig& config) {
    ordered_json doc;
    ordered_json& snapshot = doc["config"];
    snapshot["graph"] = config.graph;
    snapshot["dataset"] = config.dataset;
    snapshot["err"]["top_k"] = config.err.top_k;
    snapshot["err"]["candidate_limit"] = config.err.candidate_limit;
    snapshot["err"]["selection_mode"] =
        config.err.selection_mode == repair::SelectionMode::oracle ? "oracle" : "heuristic";
    snapshot["fusion"]["sigma"] = config.fusion.sigma;
    snapshot["fusion"]["rule"] = config.fusion.rule == fusion::Rule::dda ? "dda" : "bna";
    snapshot["backends"]["translator"] = backend_snapshot(config.translator);
    snapshot["backends"]["selector"] = backend_snapshot(config.selector);
    snapshot["backends"]["reader"] = backend_snapshot(config.reader);
    snapshot["workflows"] = std::string(workflow_name(config.workflow));

    doc["aggregates"] = aggregates_json(result.report);

    ordered_json difficulty;
    for (std::string_view level : {"simple", "complex"}) {
        std::vector<metrics::EvaluationRecord> subset;
        for (const auto& q : result.questions)
            if (q.difficulty == level) subset.push_back(q.eval);
        ordered_json entry;
        entry["count"] = subset.size();
        if (!subset.empty()) {
            metrics::Report sub = metrics::aggregate(std::move(subset));
            entry.update(aggregates_json(sub));
        }
        difficulty[std::string(level)] = std::move(entry);
    }
    doc["difficulty"] = std::move(difficulty);

    ordered_json questions = ordered_json::array();
    for (const auto& q : result.questions) {
        ordered_json item;
        item["question"] = q.eval.question;
        item["difficulty"] = q.difficulty;
        item["gold_cql"] = q.eval.gold_cql ? ordered_json(*q.eval.gold_cql) : ordered_json();
        item["pred_cql"] = q.eval.pred_cql ? ordered_json(*q.eval.pred_cql) : ordered_json();
        item["gold_answers"] = answers_json(q.eval.gold_answers);
        item["pred_answers"] = answers_json(q.eval.pred_answers);
        if (q.translator_answers) item["translator_answers"] = answers_json(*q.translator_answers);
        if (q.searcher_answers) item["searcher_answers"] = answers_json(*q.searcher_answers);
        item["p"] = q.eval.p;
        item["r"] = q.eval.r;
        item["f1"] = q.eval.f1;
        item["logical_match"] = q.eval.logical_match;
        item["execution_match"] = q.eval.execution_match;
        item["warnings"] = q.warnings;
        item["errors"] = q.errors;
        questions.push_back(std::move(item));
    }
    doc["questions"] = std::move(questions);
    return doc.dump(2) + "\n";
}

} // namespace kgqa::pipeline
