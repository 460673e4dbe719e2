#pragma once

// Scoring: logical accuracy (normalized query match), execution accuracy
// (answer-set equality), precision/recall/F1, and corpus aggregation.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgqa/answer.hpp"

namespace kgqa::metrics {

struct Prf1 {
    double p = 0;
    double r = 0;
    double f1 = 0;
};

// p = |gold ∩ pred| / |pred|, r = |gold ∩ pred| / |gold|, f1 = 2pr/(p+r).
// Conventions the formulas leave undefined: both sets empty → (1,1,1);
// exactly one empty → (0,0,0).
Prf1 prf1(const AnswerSet& pred, const AnswerSet& gold);

// Canonical text for comparing queries: parseable input is re-rendered;
// otherwise keywords are lowercased, whitespace runs collapse to one space,
// and string literals are rewritten double-quoted. Condition order is
// deliberately preserved, so reordered conditions stay distinct.
std::string normalize_cql(std::string_view text);

struct EvaluationRecord {
    std::string question;
    std::optional<std::string> gold_cql;
    std::optional<std::string> pred_cql;
    AnswerSet gold_answers;
    AnswerSet pred_answers;
    double p = 0;
    double r = 0;
    double f1 = 0;
    bool logical_match = false;   // normalize_cql(pred) == normalize_cql(gold), both present
    bool execution_match = false; // pred_answers == gold_answers
};

EvaluationRecord evaluate(std::string question, std::optional<std::string> gold_cql,
                          std::optional<std::string> pred_cql, AnswerSet gold_answers,
                          AnswerSet pred_answers);

struct Report {
    double acc_lx = 0;
    double acc_ex = 0;
    double macro_p = 0;
    double macro_r = 0;
    double macro_f1 = 0;
    std::vector<EvaluationRecord> records;
};

// Fraction of pairs whose normalized texts match. Throws std::invalid_argument
// on an empty list (the ratio is undefined).
double logical_accuracy(const std::vector<std::pair<std::string, std::string>>& pred_gold_pairs);

// Fraction of records with equal answer sets. Throws on empty input.
double execution_accuracy(const std::vector<EvaluationRecord>& records);

// Arithmetic means over records of each per-question quantity. Throws on
// empty input. Permutation-invariant.
Report aggregate(std::vector<EvaluationRecord> records);

} // namespace kgqa::metrics
