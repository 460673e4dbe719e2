#pragma once

// End-to-end benchmark orchestration: load graph + dataset, run the
// query-translation and retrieval workflows over every question, fuse, score,
// and emit a deterministic JSON report.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kgqa/answer.hpp"
#include "kgqa/fusion.hpp"
#include "kgqa/gateway.hpp"
#include "kgqa/metrics.hpp"
#include "kgqa/repair.hpp"

namespace kgqa::pipeline {

struct DatasetExample {
    std::string question;
    std::optional<std::string> gold_cql;
    AnswerSet gold_answers; // may be empty
};

// JSON-lines, one object per line: {"question": str, "cql": str (optional),
// "answers": [str, ...]}. Order preserved; blank lines skipped. Throws
// DatasetError with the offending line number.
std::vector<DatasetExample> load_dataset(std::istream& in);
std::vector<DatasetExample> load_dataset(const std::string& path);

enum class Workflow { translator_only, searcher_only, both };

struct PipelineConfig {
    std::string graph;   // triple CSV path
    std::string dataset; // JSONL path
    repair::ErrConfig err;
    fusion::FusionConfig fusion;
    gateway::BackendConfig translator;
    gateway::BackendConfig selector;
    gateway::BackendConfig reader;
    Workflow workflow = Workflow::both;
    std::size_t concurrency = 1;
};

// Reads the JSON config (sections: graph, dataset, err, fusion, backends,
// workflows, concurrency); relative paths resolve against the config file's
// directory. Throws ConfigError on missing/invalid fields.
PipelineConfig load_config(const std::string& path);

// "complex" when the gold query uses count(*), a where clause, order by, or
// two or more entity/relation mentions; otherwise (or without a gold query)
// "simple".
std::string difficulty_of(const std::optional<std::string>& gold_cql);

struct QuestionRecord {
    metrics::EvaluationRecord eval;
    std::string difficulty;
    std::optional<AnswerSet> translator_answers; // S(Q), present when that path ran
    std::optional<AnswerSet> searcher_answers;   // I(Q), present when that path ran
    std::vector<std::string> warnings; // soft notes (empty translation, repair warnings)
    std::vector<std::string> errors;   // hard per-path failures, question still recorded
};

struct RunResult {
    metrics::Report report; // aggregates over eval records, dataset order
    std::vector<QuestionRecord> questions;

    bool any_errors() const;
};

// Processes questions independently (up to config.concurrency in flight);
// the result is identical regardless of scheduling. Aborts only on
// config/graph/dataset failure; per-question failures are recorded.
RunResult run_benchmark(const PipelineConfig& config);

// Report document: config snapshot (minus run mechanics like concurrency),
// the five aggregates, per-difficulty breakdown, and per-question records.
// No timestamps or timings, so identical runs serialize byte-identically.
std::string serialize_report(const RunResult& result, const PipelineConfig& config);

} // namespace kgqa::pipeline
