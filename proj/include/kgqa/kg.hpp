#pragma once

// In-memory triple store with exact, fuzzy and one-hop lookup.
//
// Triple files are UTF-8 CSV: one record per line, three fields
// (head, relation, tail). Fields containing commas or quotes are wrapped in
// double quotes with embedded quotes doubled. Lines starting with '#' and
// blank lines are ignored. Duplicate records are deduplicated; record order
// never affects query behavior.

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kgqa::kg {

struct Triple {
    std::string head;
    std::string relation;
    std::string tail;

    auto operator<=>(const Triple&) const = default;
};

// Substring/edit-distance candidate lookup over a fixed name set.
// Built once at load time; queries are read-only.
class FuzzyIndex {
public:
    FuzzyIndex() = default;
    explicit FuzzyIndex(const std::set<std::string, std::less<>>& names);

    // Up to `limit` names ranked by relatedness to `mention`:
    //   1. the exact match, if any;
    //   2. names that contain the mention, or whose base name (trailing
    //      "[qualifier]" stripped) is contained in the mention, by descending
    //      bigram Dice similarity;
    //   3. the top `limit` names by normalized edit similarity.
    // Ties break lexicographically; the result is deterministic.
    std::vector<std::string> find_relative(std::string_view mention, std::size_t limit) const;

private:
    struct Entry {
        std::string name;
        std::string base; // qualifier-stripped form
        std::vector<std::uint64_t> bigrams;
    };
    std::vector<Entry> entries_; // sorted by name
};

using NameSet = std::set<std::string, std::less<>>;

// Immutable after load; safe for unlimited concurrent readers.
// The sorted triple vector doubles as the exact head index: all triples with
// a given head form one contiguous run, found by binary search.
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;

    // Parses the triple file format described above.
    // Throws IngestError (with line number and raw text) on a malformed record.
    static KnowledgeGraph load(std::istream& source);
    static KnowledgeGraph load_file(const std::string& path);

    // Deduplicated triples, sorted by (head, relation, tail).
    const std::vector<Triple>& triples() const { return triples_; }

    const NameSet& entity_names() const { return entity_names_; }     // S_E: distinct heads
    const NameSet& relation_names() const { return relation_names_; } // S_R: distinct relations

    bool has_entity(std::string_view name) const;

    // All triples with the given head, sorted by (relation, tail).
    std::span<const Triple> outgoing(std::string_view head) const;

    const FuzzyIndex& entity_fuzzy_index() const { return entity_fuzzy_; }
    const FuzzyIndex& relation_fuzzy_index() const { return relation_fuzzy_; }

    // Longest entity name, in bytes. Used by the dictionary topic extractor.
    std::size_t max_entity_name_bytes() const { return max_entity_bytes_; }

private:
    std::vector<Triple> triples_;
    NameSet entity_names_;
    NameSet relation_names_;
    FuzzyIndex entity_fuzzy_;
    FuzzyIndex relation_fuzzy_;
    std::size_t max_entity_bytes_ = 0;

    void build_indices();
};

// Up to `limit` entity names related to `mention`, best first.
// An unknown mention yields an empty list, not an error.
std::vector<std::string> find_relative_entities(std::string_view mention,
                                                const KnowledgeGraph& graph, std::size_t limit);

// Same ranking over relation names.
std::vector<std::string> find_relative_relations(std::string_view mention,
                                                 const KnowledgeGraph& graph, std::size_t limit);

// All triples whose head equals `entity`, ordered by (relation, tail).
std::vector<Triple> one_hop_subgraph(std::string_view entity, const KnowledgeGraph& graph);

} // namespace kgqa::kg
