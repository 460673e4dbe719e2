#include "kgqa/kg.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>
#include <utility>

#include "kgqa/errors.hpp"
#include "kgqa/text.hpp"

namespace kgqa::kg {
namespace {

bool contains(std::string_view haystack, std::string_view needle) {
    return haystack.find(needle) != std::string_view::npos;
}

// One CSV record: three fields, standard quoting (embedded quotes doubled).
// Whitespace around unquoted fields and outside quotes is not significant.
std::vector<std::string> split_record(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    const std::size_t n = line.size();
    auto fail = [&](const std::string& reason) -> void {
        throw IngestError(line_no, std::string(line), reason);
    };

    while (true) {
        while (pos < n && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
        std::string field;
        if (pos < n && line[pos] == '"') {
            ++pos;
            bool closed = false;
            while (pos < n) {
                if (line[pos] == '"') {
                    if (pos + 1 < n && line[pos + 1] == '"') {
                        field.push_back('"');
                        pos += 2;
                    } else {
                        ++pos;
                        closed = true;
                        break;
                    }
                } else {
                    field.push_back(line[pos]);
                    ++pos;
                }
            }
            if (!closed) fail("unterminated quoted field");
            while (pos < n && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
            if (pos < n && line[pos] != ',') fail("unexpected text after closing quote");
        } else {
            std::size_t start = pos;
            while (pos < n && line[pos] != ',') ++pos;
            field = std::string(text::trim(line.substr(start, pos - start)));
        }
        fields.push_back(std::move(field));
        if (pos >= n) break;
        ++pos; // consume the comma; a trailing comma yields an empty final field
        if (pos >= n) {
            fields.emplace_back();
            break;
        }
    }
    return fields;
}

bool is_blank(std::string_view line) {
    return text::trim(line).empty();
}

} // namespace

FuzzyIndex::FuzzyIndex(const std::set<std::string, std::less<>>& names) {
    entries_.reserve(names.size());
    for (const auto& name : names) {
        Entry e;
        e.name = name;
        e.base = std::string(text::strip_qualifier(name));
        e.bigrams = text::bigram_multiset(name);
        entries_.push_back(std::move(e));
    }
}

std::vector<std::string> FuzzyIndex::find_relative(std::string_view mention,
                                                   std::size_t limit) const {
    std::vector<std::string> out;
    if (limit == 0 || entries_.empty()) return out;

    const auto mention_bigrams = text::bigram_multiset(mention);
    std::vector<const Entry*> substring_hits;
    std::vector<const Entry*> rest;
    const Entry* exact = nullptr;
    for (const auto& e : entries_) {
        if (e.name == mention) {
            exact = &e;
        } else if (contains(e.name, mention) || contains(mention, e.base)) {
            substring_hits.push_back(&e);
        } else {
            rest.push_back(&e);
        }
    }

    std::vector<std::pair<double, const Entry*>> scored;
    scored.reserve(substring_hits.size());
    for (const Entry* e : substring_hits)
        scored.emplace_back(text::bigram_dice(mention_bigrams, e->bigrams, false), e);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second->name < b.second->name;
    });

    std::vector<std::pair<double, const Entry*>> by_edit;
    by_edit.reserve(rest.size());
    for (const Entry* e : rest)
        by_edit.emplace_back(text::edit_similarity(mention, e->name), e);
    std::sort(by_edit.begin(), by_edit.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second->name < b.second->name;
    });

    if (exact) out.push_back(exact->name);
    for (const auto& [score, e] : scored) {
        if (out.size() >= limit) return out;
        out.push_back(e->name);
    }
    for (const auto& [score, e] : by_edit) {
        if (out.size() >= limit) return out;
        out.push_back(e->name);
    }
    return out;
}

KnowledgeGraph KnowledgeGraph::load(std::istream& source) {
    KnowledgeGraph graph;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(source, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (is_blank(line) || line.front() == '#') continue;

        auto fields = split_record(line, line_no);
        if (fields.size() != 3) {
            throw IngestError(line_no, line,
                              "expected 3 fields, got " + std::to_string(fields.size()));
        }
        if (text::trim(fields[0]).empty()) throw IngestError(line_no, line, "empty head field");
        if (text::trim(fields[1]).empty())
            throw IngestError(line_no, line, "empty relation field");
        if (fields[2].empty()) throw IngestError(line_no, line, "empty tail field");
        graph.triples_.push_back(
            Triple{std::move(fields[0]), std::move(fields[1]), std::move(fields[2])});
    }
    graph.build_indices();
    return graph;
}

KnowledgeGraph KnowledgeGraph::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError(0, path, "cannot open triple file");
    return load(in);
}

void KnowledgeGraph::build_indices() {
    std::sort(triples_.begin(), triples_.end());
    triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());
    for (const auto& t : triples_) {
        entity_names_.insert(t.head);
        relation_names_.insert(t.relation);
        max_entity_bytes_ = std::max(max_entity_bytes_, t.head.size());
    }
    entity_fuzzy_ = FuzzyIndex(entity_names_);
    relation_fuzzy_ = FuzzyIndex(relation_names_);
}

bool KnowledgeGraph::has_entity(std::string_view name) const {
    return entity_names_.find(name) != entity_names_.end();
}

std::span<const Triple> KnowledgeGraph::outgoing(std::string_view head) const {
    auto lo = std::lower_bound(triples_.begin(), triples_.end(), head,
                               [](const Triple& t, std::string_view h) { return t.head < h; });
    auto hi = std::upper_bound(lo, triples_.end(), head,
                               [](std::string_view h, const Triple& t) { return h < t.head; });
    return {lo, hi};
}

std::vector<std::string> find_relative_entities(std::string_view mention,
                                                const KnowledgeGraph& graph,
                                                std::size_t limit) {
    return graph.entity_fuzzy_index().find_relative(mention, limit);
}

std::vector<std::string> find_relative_relations(std::string_view mention,
                                                 const KnowledgeGraph& graph,
                                                 std::size_t limit) {
    return graph.relation_fuzzy_index().find_relative(mention, limit);
}

std::vector<Triple> one_hop_subgraph(std::string_view entity, const KnowledgeGraph& graph) {
    auto span = graph.outgoing(entity);
    return {span.begin(), span.end()};
}

} // namespace kgqa::kg
