#include "kgqa/repair.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "kgqa/cql.hpp"
#include "kgqa/errors.hpp"
#include "kgqa/gateway.hpp"
#include "kgqa/kg.hpp"
#include "kgqa/metrics.hpp"
#include "kgqa/prompts.hpp"
#include "kgqa/text.hpp"

namespace kgqa::repair {
namespace {

std::string fallback_choice(std::string_view mention, const std::vector<std::string>& candidates,
                            const SimScorer& scorer) {
    const std::string* best = nullptr;
    double best_score = -1.0;
    for (const auto& candidate : candidates) {
        double score = scorer(mention, candidate);
        if (!best || score > best_score || (score == best_score && candidate < *best)) {
            best = &candidate;
            best_score = score;
        }
    }
    return *best;
}

bool parses(std::string_view text) {
    try {
        cql::parse_cql(text);
        return true;
    } catch (const ParseError&) {
        return false;
    }
}

} // namespace

double sim_score(std::string_view a, std::string_view b) {
    return text::bigram_dice(a, b);
}

std::string select_entity(std::string_view question, std::string_view mention,
                          const std::vector<std::string>& candidates,
                          gateway::ModelBackend& selector) {
    if (candidates.empty())
        throw SelectionError("no candidates for mention \"" + std::string(mention) + "\"");
    gateway::ModelRequest request;
    request.role = gateway::ModelRole::selector;
    request.system_instruction = prompts::selector_system();
    request.user_content = prompts::selector_user(question, mention, candidates);
    std::string reply(text::trim(gateway::generate(request, selector).text));
    if (std::find(candidates.begin(), candidates.end(), reply) != candidates.end()) return reply;
    return fallback_choice(mention, candidates, sim_score);
}

CorrectionResult correct_cql(std::string_view question, std::string_view cql_p,
                             const kg::KnowledgeGraph& graph, const ErrConfig& config,
                             gateway::ModelBackend& selector,
                             const std::optional<AnswerSet>& gold, const SimScorer& scorer) {
    if (config.top_k < 1) throw ConfigError("top_k must be at least 1");
    if (config.candidate_limit < config.top_k)
        throw ConfigError("candidate_limit must be at least top_k");
    if (config.selection_mode == SelectionMode::oracle && !gold)
        throw std::invalid_argument("oracle selection needs gold answers");
    const SimScorer& score = scorer ? scorer : SimScorer(sim_score);

    CorrectionResult result;
    result.mode_used = config.selection_mode;

    // Entity pass: rewrite mentions left to right. current_count[v] is the
    // number of earlier mentions that now carry the value v, which is exactly
    // the occurrence index the next mention of v has in the evolving text.
    std::string working(cql_p);
    std::map<std::string, std::size_t, std::less<>> current_count;
    for (const auto& mention : cql::extract_entities(cql_p)) {
        std::size_t occurrence = current_count[mention];
        auto candidates = kg::find_relative_entities(mention, graph, config.candidate_limit);
        std::string chosen = mention;
        if (candidates.empty()) {
            result.warnings.push_back("no entity candidates for \"" + mention + "\"");
        } else {
            chosen = select_entity(question, mention, candidates, selector);
        }
        if (chosen != mention) {
            try {
                working = cql::substitute(working, mention, chosen, cql::MentionKind::entity,
                                          occurrence);
            } catch (const SubstitutionError& e) {
                result.warnings.push_back(std::string("entity substitution failed: ") + e.what());
                chosen = mention;
            }
        }
        result.chosen_entities.emplace_back(mention, chosen);
        ++current_count[chosen];
    }

    // Relation pass: only the first relation mention is corrected; each kept
    // candidate name yields one rewrite.
    struct Candidate {
        std::string query;
        std::optional<std::string> relation;
    };
    std::vector<Candidate> built;
    auto relations = cql::extract_relations(working);
    if (!relations.empty()) {
        const std::string& first = relations.front();
        auto candidates = kg::find_relative_relations(first, graph, config.candidate_limit);
        if (candidates.empty()) {
            result.warnings.push_back("no relation candidates for \"" + first + "\"");
        } else {
            std::vector<std::pair<double, std::size_t>> ranked;
            for (std::size_t i = 0; i < candidates.size(); ++i)
                ranked.emplace_back(score(candidates[i], first), i);
            std::stable_sort(ranked.begin(), ranked.end(),
                             [](const auto& a, const auto& b) { return a.first > b.first; });
            ranked.resize(std::min<std::size_t>(config.top_k, ranked.size()));
            for (const auto& [unused, idx] : ranked) {
                const std::string& relation = candidates[idx];
                try {
                    built.push_back({cql::substitute(working, first, relation,
                                                     cql::MentionKind::relation, 0),
                                     relation});
                } catch (const SubstitutionError& e) {
                    result.warnings.push_back(std::string("relation substitution failed: ") +
                                              e.what());
                }
            }
        }
    }
    if (built.empty()) built.push_back({working, std::nullopt});

    // Keep only candidates the parser accepts; a fully unusable set degrades
    // to the unmodified input.
    for (auto& candidate : built) {
        if (!parses(candidate.query)) {
            result.warnings.push_back("dropped unparseable candidate: " + candidate.query);
            continue;
        }
        if (candidate.relation) result.chosen_relations.push_back(*candidate.relation);
        result.candidates.push_back(std::move(candidate.query));
    }
    if (result.candidates.empty()) {
        result.candidates = {std::string(cql_p)};
        result.best = std::string(cql_p);
        result.warnings.push_back("no candidate parses; keeping the input query");
        return result;
    }

    std::vector<AnswerSet> executions;
    executions.reserve(result.candidates.size());
    for (const auto& candidate : result.candidates) {
        try {
            executions.push_back(cql::execute_cql(candidate, graph));
        } catch (const Error& e) {
            executions.emplace_back();
            result.warnings.push_back("candidate execution failed: " + std::string(e.what()));
        }
    }

    std::size_t best_index = 0;
    if (config.selection_mode == SelectionMode::oracle) {
        double best_f1 = -1.0;
        for (std::size_t i = 0; i < executions.size(); ++i) {
            double f1 = metrics::prf1(executions[i], *gold).f1;
            if (f1 > best_f1) {
                best_f1 = f1;
                best_index = i;
            }
        }
    } else {
        best_index = 0;
        for (std::size_t i = 0; i < executions.size(); ++i) {
            if (!executions[i].empty()) {
                best_index = i;
                break;
            }
        }
    }
    result.best = result.candidates[best_index];
    return result;
}

} // namespace kgqa::repair
