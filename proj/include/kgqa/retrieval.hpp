#pragma once

// Retrieval-augmented answering: find topic entities in the question, pull
// their one-hop triples, verbalize them, and ask a reader model for labeled
// answers.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kgqa/answer.hpp"
#include "kgqa/kg.hpp"

namespace kgqa::gateway {
class ModelBackend;
}

namespace kgqa::retrieval {

// Seam for a trained extraction model; the default extractor needs none.
class TopicExtractorBackend {
public:
    virtual ~TopicExtractorBackend() = default;
    virtual std::vector<std::string> extract(std::string_view question) = 0;
};

struct RetrievalOptions {
    // Hard cap on verbalized triples per question, truncating in retrieval
    // order, so context length stays bounded.
    std::size_t max_triples = 200;
    // Also retrieve triples whose tail is a topic entity. Off by default:
    // the subgraph is read as outgoing edges only.
    bool include_incoming = false;
};

struct RetrievalContext {
    std::vector<std::string> topic_entities; // deduplicated, question order
    std::vector<kg::Triple> triples;         // per-entity one-hop, capped
    std::string verbalized;
};

// Default extractor: maximal non-overlapping substrings of the question that
// exactly match entity names, longest match first, scanning left to right on
// bytes (no word boundaries, so it works for unsegmented scripts).
std::vector<std::string> extract_topic_entities(std::string_view question,
                                                const kg::KnowledgeGraph& graph);

// Live-extractor variant: every raw mention is mapped to its best matching
// entity name (exact names map to themselves); unmappable mentions drop out.
std::vector<std::string> extract_topic_entities(std::string_view question,
                                                const kg::KnowledgeGraph& graph,
                                                TopicExtractorBackend& extractor);

// Template sentences ("The <relation> of <head> is <tail>.") joined by single
// spaces; empty input gives empty text.
std::string verbalize(const std::vector<kg::Triple>& triples);

RetrievalContext build_context(const std::vector<std::string>& topic_entities,
                               const kg::KnowledgeGraph& graph,
                               const RetrievalOptions& options = {});

// Full retrieval path with the default extractor. No topic entities or no
// retrieved triples mean an empty answer; a reader failure raises
// RetrievalError instead of masquerading as empty.
AnswerSet answer_by_retrieval(std::string_view question, const kg::KnowledgeGraph& graph,
                              gateway::ModelBackend& reader,
                              const RetrievalOptions& options = {});

AnswerSet answer_by_retrieval(std::string_view question, const kg::KnowledgeGraph& graph,
                              TopicExtractorBackend& extractor, gateway::ModelBackend& reader,
                              const RetrievalOptions& options = {});

} // namespace kgqa::retrieval
