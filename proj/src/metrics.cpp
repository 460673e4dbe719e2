#include "kgqa/metrics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>
#include <utility>

#include "kgqa/cql.hpp"
#include "kgqa/errors.hpp"

namespace kgqa::metrics {
namespace {

bool word_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_keyword(std::string_view lowered) {
    static constexpr std::array<std::string_view, 13> keywords = {
        "match", "return", "distinct", "count", "where", "and",   "or",
        "order", "by",     "asc",      "desc",  "limit", "contains"};
    return std::find(keywords.begin(), keywords.end(), lowered) != keywords.end();
}

// Normalization for text the parser rejects: token-level cleanup only, no
// structural interpretation.
std::string fallback_normalize(std::string_view text) {
    std::string out;
    bool saw_space = false;
    auto separate = [&] {
        if (saw_space && !out.empty()) out.push_back(' ');
        saw_space = false;
    };
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            saw_space = true;
            ++i;
        } else if (word_start(c)) {
            std::size_t j = i + 1;
            while (j < n && word_char(text[j])) ++j;
            std::string word(text.substr(i, j - i));
            std::string lowered = word;
            std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                           [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
            separate();
            out += is_keyword(lowered) ? lowered : word;
            i = j;
        } else if (c == '"' || c == '\'') {
            std::string value;
            std::size_t j = i + 1;
            while (j < n && text[j] != c) {
                if (text[j] == '\\' && j + 1 < n) {
                    char next = text[j + 1];
                    if (next == c || next == '\\') value.push_back(next);
                    else {
                        value.push_back('\\');
                        value.push_back(next);
                    }
                    j += 2;
                } else {
                    value.push_back(text[j]);
                    ++j;
                }
            }
            if (j < n) ++j; // closing quote; an unterminated string ends the scan
            separate();
            out.push_back('"');
            for (char v : value) {
                if (v == '"' || v == '\\') out.push_back('\\');
                out.push_back(v);
            }
            out.push_back('"');
            i = j;
        } else {
            separate();
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

} // namespace

Prf1 prf1(const AnswerSet& pred, const AnswerSet& gold) {
    if (pred.empty() && gold.empty()) return {1.0, 1.0, 1.0};
    if (pred.empty() || gold.empty()) return {0.0, 0.0, 0.0};
    std::size_t overlap = 0;
    for (const auto& value : pred)
        if (gold.contains(value)) ++overlap;
    Prf1 out;
    out.p = static_cast<double>(overlap) / static_cast<double>(pred.size());
    out.r = static_cast<double>(overlap) / static_cast<double>(gold.size());
    out.f1 = (out.p + out.r) == 0 ? 0.0 : 2.0 * out.p * out.r / (out.p + out.r);
    return out;
}

std::string normalize_cql(std::string_view text) {
    try {
        return cql::render_cql(cql::parse_cql(text));
    } catch (const ParseError&) {
        return fallback_normalize(text);
    }
}

EvaluationRecord evaluate(std::string question, std::optional<std::string> gold_cql,
                          std::optional<std::string> pred_cql, AnswerSet gold_answers,
                          AnswerSet pred_answers) {
    EvaluationRecord rec;
    rec.question = std::move(question);
    rec.gold_cql = std::move(gold_cql);
    rec.pred_cql = std::move(pred_cql);
    rec.gold_answers = std::move(gold_answers);
    rec.pred_answers = std::move(pred_answers);
    Prf1 scores = prf1(rec.pred_answers, rec.gold_answers);
    rec.p = scores.p;
    rec.r = scores.r;
    rec.f1 = scores.f1;
    rec.logical_match = rec.gold_cql && rec.pred_cql &&
                        normalize_cql(*rec.pred_cql) == normalize_cql(*rec.gold_cql);
    rec.execution_match = rec.pred_answers == rec.gold_answers;
    return rec;
}

double logical_accuracy(
    const std::vector<std::pair<std::string, std::string>>& pred_gold_pairs) {
    if (pred_gold_pairs.empty())
        throw std::invalid_argument("logical accuracy of an empty pair list is undefined");
    std::size_t matches = 0;
    for (const auto& [pred, gold] : pred_gold_pairs)
        if (normalize_cql(pred) == normalize_cql(gold)) ++matches;
    return static_cast<double>(matches) / static_cast<double>(pred_gold_pairs.size());
}

double execution_accuracy(const std::vector<EvaluationRecord>& records) {
    if (records.empty())
        throw std::invalid_argument("execution accuracy of an empty record list is undefined");
    std::size_t matches = 0;
    for (const auto& rec : records)
        if (rec.execution_match) ++matches;
    return static_cast<double>(matches) / static_cast<double>(records.size());
}

Report aggregate(std::vector<EvaluationRecord> records) {
    if (records.empty()) throw std::invalid_argument("cannot aggregate zero records");
    Report report;
    for (const auto& rec : records) {
        report.acc_lx += rec.logical_match ? 1.0 : 0.0;
        report.acc_ex += rec.execution_match ? 1.0 : 0.0;
        report.macro_p += rec.p;
        report.macro_r += rec.r;
        report.macro_f1 += rec.f1;
    }
    const double n = static_cast<double>(records.size());
    report.acc_lx /= n;
    report.acc_ex /= n;
    report.macro_p /= n;
    report.macro_r /= n;
    report.macro_f1 /= n;
    report.records = std::move(records);
    return report;
}

} // namespace kgqa::metrics
