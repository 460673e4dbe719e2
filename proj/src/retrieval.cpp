#include "kgqa/retrieval.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "kgqa/errors.hpp"
#include "kgqa/gateway.hpp"
#include "kgqa/prompts.hpp"

namespace kgqa::retrieval {
namespace {

std::vector<std::string> dedupe(std::vector<std::string> names) {
    std::vector<std::string> out;
    for (auto& name : names)
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
    return out;
}

AnswerSet read_answers(std::string_view question, const RetrievalContext& context,
                       gateway::ModelBackend& reader) {
    if (context.triples.empty()) return {};
    gateway::ModelRequest request;
    request.role = gateway::ModelRole::reader;
    request.system_instruction = prompts::reader_system();
    request.user_content = prompts::reader_user(question, context.triples);
    std::string response;
    try {
        response = gateway::generate(request, reader).text;
    } catch (const Error& e) {
        throw RetrievalError(std::string("reader failed: ") + e.what());
    }
    auto labels = prompts::parse_answer_labels(response);
    return {labels.begin(), labels.end()};
}

} // namespace

std::vector<std::string> extract_topic_entities(std::string_view question,
                                                const kg::KnowledgeGraph& graph) {
    std::vector<std::string> found;
    const std::size_t longest = graph.max_entity_name_bytes();
    std::size_t i = 0;
    while (i < question.size()) {
        std::size_t cap = std::min(longest, question.size() - i);
        std::size_t matched = 0;
        for (std::size_t len = cap; len >= 1; --len) {
            if (graph.has_entity(question.substr(i, len))) {
                matched = len;
                break;
            }
        }
        if (matched) {
            found.emplace_back(question.substr(i, matched));
            i += matched;
        } else {
            ++i;
        }
    }
    return dedupe(std::move(found));
}

std::vector<std::string> extract_topic_entities(std::string_view question,
                                                const kg::KnowledgeGraph& graph,
                                                TopicExtractorBackend& extractor) {
    std::vector<std::string> mapped;
    for (const auto& mention : extractor.extract(question)) {
        auto candidates = kg::find_relative_entities(mention, graph, 1);
        if (!candidates.empty()) mapped.push_back(std::move(candidates.front()));
    }
    return dedupe(std::move(mapped));
}

std::string verbalize(const std::vector<kg::Triple>& triples) {
    std::string out;
    for (const auto& triple : triples) {
        if (!out.empty()) out.push_back(' ');
        out += prompts::verbalize_triple(triple);
    }
    return out;
}

RetrievalContext build_context(const std::vector<std::string>& topic_entities,
                               const kg::KnowledgeGraph& graph,
                               const RetrievalOptions& options) {
    RetrievalContext context;
    context.topic_entities = dedupe(topic_entities);
    std::set<kg::Triple> seen;
    auto add = [&](const kg::Triple& triple) {
        if (context.triples.size() < options.max_triples && seen.insert(triple).second)
            context.triples.push_back(triple);
    };
    for (const auto& entity : context.topic_entities) {
        for (const auto& triple : graph.outgoing(entity)) add(triple);
        if (options.include_incoming)
            for (const auto& triple : graph.triples())
                if (triple.tail == entity) add(triple);
    }
    context.verbalized = verbalize(context.triples);
    return context;
}

AnswerSet answer_by_retrieval(std::string_view question, const kg::KnowledgeGraph& graph,
                              gateway::ModelBackend& reader, const RetrievalOptions& options) {
    auto topics = extract_topic_entities(question, graph);
    if (topics.empty()) return {};
    return read_answers(question, build_context(topics, graph, options), reader);
}

AnswerSet answer_by_retrieval(std::string_view question, const kg::KnowledgeGraph& graph,
                              TopicExtractorBackend& extractor, gateway::ModelBackend& reader,
                              const RetrievalOptions& options) {
    auto topics = extract_topic_entities(question, graph, extractor);
    if (topics.empty()) return {};
    return read_answers(question, build_context(topics, graph, options), reader);
}

} // namespace kgqa::retrieval
