#pragma once

// Entity and relation repair for generated queries: every entity mention is
// re-linked to its best knowledge-base name, the first relation mention is
// expanded into the top-k most similar relation names, and the best of the
// resulting candidate queries is kept.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgqa/answer.hpp"

namespace kgqa::kg {
class KnowledgeGraph;
}
namespace kgqa::gateway {
class ModelBackend;
}

namespace kgqa::repair {

enum class SelectionMode {
    oracle,    // best candidate by F1 of its execution against gold answers
    heuristic, // first candidate whose execution is non-empty, else the first
};

struct ErrConfig {
    std::size_t top_k = 3;           // relation candidates kept, >= 1
    std::size_t candidate_limit = 10; // fuzzy-lookup width, >= top_k
    SelectionMode selection_mode = SelectionMode::heuristic;
};

struct CorrectionResult {
    std::string best;
    std::vector<std::string> candidates; // all parseable rewrites, best among them
    std::vector<std::pair<std::string, std::string>> chosen_entities; // mention -> name
    std::vector<std::string> chosen_relations; // kept relation names, score order
    SelectionMode mode_used = SelectionMode::heuristic;
    std::vector<std::string> warnings;
};

// Pluggable mention-to-name scorer; the default is bigram Dice similarity.
using SimScorer = std::function<double(std::string_view, std::string_view)>;

// Symmetric, deterministic, 1 on identical strings.
double sim_score(std::string_view a, std::string_view b);

// One candidate from a non-empty list. The backend's reply is trusted only
// if it is verbatim one of the candidates; anything else falls back to the
// deterministic rule (highest sim_score against the mention, ties
// lexicographically). Throws SelectionError when candidates is empty.
std::string select_entity(std::string_view question, std::string_view mention,
                          const std::vector<std::string>& candidates,
                          gateway::ModelBackend& selector);

// Full repair of cql_p. Entity mentions are replaced in textual order, each
// by select_entity over the graph's fuzzy candidates (mentions with no
// candidates stay unchanged, with a warning). Only the first relation
// mention is corrected: its fuzzy candidates are ranked by scorer (ties keep
// fuzzy-lookup order) and the top_k best each yield one candidate query.
// Candidates that fail to parse are dropped with a warning; if nothing
// usable remains, the result degrades to the input query.
//
// Oracle mode requires gold and picks the candidate whose execution has
// maximal F1 against it (earliest wins ties). Heuristic mode picks the first
// candidate that executes to a non-empty answer, else the first. A candidate
// whose execution raises an error scores as empty, with a warning.
CorrectionResult correct_cql(std::string_view question, std::string_view cql_p,
                             const kg::KnowledgeGraph& graph, const ErrConfig& config,
                             gateway::ModelBackend& selector,
                             const std::optional<AnswerSet>& gold = std::nullopt,
                             const SimScorer& scorer = {});

} // namespace kgqa::repair
