#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "generators.hpp"
#include "kgqa/errors.hpp"
#include "kgqa/kg.hpp"
#include "support.hpp"

using namespace kgqa;
using kg::KnowledgeGraph;
using kg::Triple;

namespace {

KnowledgeGraph graph_of(const std::string& csv) {
    std::istringstream in(csv);
    return KnowledgeGraph::load(in);
}

} // namespace

TEST_CASE("triple files: comments, quoting, trimming, dedup") {
    auto graph = graph_of("# comment line\n"
                          "\n"
                          "China,capital,Beijing\n"
                          "  spaced ,  rel ,  tail value  \n"
                          "\"salt, pepper\",contains,\"he said \"\"hi\"\"\"\n"
                          "China,capital,Beijing\n");

    REQUIRE(graph.triples().size() == 3);
    CHECK(graph.triples().front() == Triple{"China", "capital", "Beijing"});

    // Unquoted fields are trimmed; quoted content is preserved verbatim.
    CHECK(graph.has_entity("spaced"));
    CHECK(graph.outgoing("spaced")[0] == Triple{"spaced", "rel", "tail value"});
    CHECK(graph.outgoing("salt, pepper")[0].tail == "he said \"hi\"");

    // S_E holds heads only.
    CHECK(graph.entity_names() == kg::NameSet{"China", "salt, pepper", "spaced"});
    CHECK_FALSE(graph.has_entity("Beijing"));
    CHECK(graph.relation_names() == kg::NameSet{"capital", "contains", "rel"});
    CHECK(graph.max_entity_name_bytes() == std::string("salt, pepper").size());
}

TEST_CASE("triple files: BOM and CRLF endings") {
    auto graph = graph_of("\xEF\xBB\xBF" "China,capital,Beijing\r\nFrance,capital,Paris\r\n");
    CHECK(graph.triples().size() == 2);
    CHECK(graph.has_entity("China"));
    CHECK(graph.has_entity("France"));
}

TEST_CASE("triple files: malformed records carry line numbers") {
    std::istringstream two_fields("China,capital\n");
    CHECK_THROWS_WITH_AS(KnowledgeGraph::load(two_fields), "line 1: expected 3 fields, got 2",
                         IngestError);

    std::istringstream late_error("# header\nChina,capital,Beijing\na,b,c,d\n");
    CHECK_THROWS_WITH_AS(KnowledgeGraph::load(late_error), "line 3: expected 3 fields, got 4",
                         IngestError);

    std::istringstream unterminated("\"China,capital,Beijing\n");
    CHECK_THROWS_WITH_AS(KnowledgeGraph::load(unterminated), "line 1: unterminated quoted field",
                         IngestError);

    std::istringstream trailing("\"China\"x,capital,Beijing\n");
    CHECK_THROWS_WITH_AS(KnowledgeGraph::load(trailing),
                         "line 1: unexpected text after closing quote", IngestError);

    std::istringstream empty_head(" ,capital,Beijing\n");
    CHECK_THROWS_WITH_AS(KnowledgeGraph::load(empty_head), "line 1: empty head field",
                         IngestError);

    CHECK_THROWS_AS(KnowledgeGraph::load_file("/nonexistent/kb.csv"), IngestError);
}

TEST_CASE("outgoing runs and one-hop lookup") {
    auto graph = KnowledgeGraph::load_file(support::fixture_path("tiny_kg.csv").string());

    auto run = graph.outgoing("Jackie Chan [Hong Kong actor]");
    REQUIRE(run.size() == 3);
    CHECK(std::is_sorted(run.begin(), run.end()));
    CHECK(run[0].tail == "Police Story");

    CHECK(graph.outgoing("nobody").empty());
    CHECK(kg::one_hop_subgraph("Jackie Chan [Hong Kong actor]", graph).size() == 3);
    CHECK(kg::one_hop_subgraph("nobody", graph).empty());
}

TEST_CASE("fuzzy lookup ranks exact, containment, then edit similarity") {
    auto graph = KnowledgeGraph::load_file(support::fixture_path("tiny_kg.csv").string());

    // Exact name first.
    auto exact = kg::find_relative_entities("China", graph, 5);
    REQUIRE_FALSE(exact.empty());
    CHECK(exact.front() == "China");

    // Mention equal to the qualifier-stripped base lands in the containment
    // bucket ahead of everything inexact.
    auto base = kg::find_relative_entities("Jackie Chan", graph, 5);
    REQUIRE_FALSE(base.empty());
    CHECK(base.front() == "Jackie Chan [Hong Kong actor]");

    // "Chan" is contained in the full name; "China" only relates by edit
    // distance (lev 2 over 5 codepoints).
    auto partial = kg::find_relative_entities("Chan", graph, 5);
    REQUIRE(partial.size() >= 2);
    CHECK(partial[0] == "Jackie Chan [Hong Kong actor]");
    CHECK(partial[1] == "China");

    CHECK(kg::find_relative_entities("China", graph, 1).size() == 1);
    CHECK(kg::find_relative_entities("China", graph, 0).empty());

    auto relations = kg::find_relative_relations("classic movie", graph, 10);
    REQUIRE_FALSE(relations.empty());
    CHECK(relations.front() == "classic movie");
}

TEST_CASE("fuzzy lookup containment ties break lexicographically") {
    auto graph = graph_of("ab x,r,1\nab y,r,2\n");
    auto ranked = kg::find_relative_entities("ab", graph, 5);
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0] == "ab x");
    CHECK(ranked[1] == "ab y");
}

TEST_CASE("csv round trip over random triples") {
    gen::Rng rng(515151);
    for (int iter = 0; iter < 60; ++iter) {
        auto triples = gen::random_triples(rng, 60);
        auto graph = gen::load_graph(triples);

        auto expected = triples;
        std::sort(expected.begin(), expected.end());
        expected.erase(std::unique(expected.begin(), expected.end()), expected.end());

        CAPTURE(iter);
        CHECK(graph.triples() == expected);

        std::set<std::string> heads;
        for (const auto& t : expected) heads.insert(t.head);
        CHECK(graph.entity_names().size() == heads.size());
    }
}
