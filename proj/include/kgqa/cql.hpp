#pragma once

// CQL: the graph query dialect produced by the translator.
//
// Supported grammar, everything else is rejected (syntax errors carry a byte
// offset; recognized-but-unsupported constructs raise a distinct error naming
// the construct):
//
//   query   := match path [where] return [order] [limit]
//   path    := source hop hop?                      (1 or 2 hops, linear)
//   source  := '(' [':ENTITY{name:"..."}'] ')'
//   hop     := '-[:Relationship{name:"..."}]->' '(' var ')'     forward
//            | '<-[:Relationship{name:"..."}]-' '(' var ')'     backward
//   where   := 'where' cond ('and' cond)*
//   cond    := var '.' prop op literal              op: = <> < <= > >= contains
//   return  := 'return' ['distinct'] (proj (',' proj)* | 'count(*)')
//   proj    := var '.' prop
//   order   := 'order by' var '.' prop ['asc'|'desc']
//   limit   := 'limit' positive-integer
//
// Keywords are case-insensitive; the ENTITY / Relationship markers and all
// names are case-sensitive. String literals may be double- or single-quoted
// with backslash escapes; the canonical rendering is double-quoted. Bare
// numeric literals in conditions are accepted and canonicalize to quoted
// strings (execution compares numerically when both sides are numeric).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgqa/answer.hpp"

namespace kgqa::kg {
class KnowledgeGraph;
}

namespace kgqa::cql {

enum class Direction { forward, backward };

enum class CmpOp { eq, ne, lt, le, gt, ge, contains };

struct Hop {
    std::optional<std::string> anchor; // entity name; only the first hop may have one
    std::string relation;
    Direction direction = Direction::forward;
    std::string target; // variable bound to the hop's far node

    bool operator==(const Hop&) const = default;
};

struct Projection {
    std::string variable;
    std::string property;

    bool operator==(const Projection&) const = default;
};

struct Condition {
    std::string variable;
    std::string property;
    CmpOp op = CmpOp::eq;
    std::string literal;

    bool operator==(const Condition&) const = default;
};

struct OrderBy {
    std::string variable;
    std::string property;
    bool ascending = true;

    bool operator==(const OrderBy&) const = default;
};

struct ReturnClause {
    bool distinct = false;
    bool count_star = false;
    std::vector<Projection> projections; // empty iff count_star

    bool operator==(const ReturnClause&) const = default;
};

struct CqlAst {
    std::vector<Hop> hops; // size 1 or 2
    std::vector<Condition> where;
    ReturnClause ret;
    std::optional<OrderBy> order_by;
    std::optional<std::uint64_t> limit;

    bool operator==(const CqlAst&) const = default;
};

// Throws ParseError on syntax errors, UnsupportedFeatureError on recognized
// constructs outside the grammar (extra hops, count over expressions,
// distinct count(*), 'or', multiple match paths, anchored targets).
CqlAst parse_cql(std::string_view text);

// Canonical text: lowercase keywords, single spaces, double-quoted names.
// parse_cql(render_cql(ast)) == ast for every valid AST.
std::string render_cql(const CqlAst& ast);

// Mention extraction over raw text. Tolerant of text that does not parse:
// every well-formed `:ENTITY{name:"..."}` / `:Relationship{name:"..."}`
// occurrence is reported in textual order, duplicates preserved.
std::vector<std::string> extract_entities(std::string_view text);
std::vector<std::string> extract_relations(std::string_view text);

enum class MentionKind { entity, relation };

// Replaces the occurrence-th mention (0-based, counted among mentions of the
// given kind whose value equals `old_name`) with `new_name`, leaving every
// other byte untouched. Throws SubstitutionError if that occurrence does not
// exist. substitute(t, x, x, k, i) returns t byte-identically.
std::string substitute(std::string_view text, std::string_view old_name,
                       std::string_view new_name, MentionKind kind, std::size_t occurrence);

// Evaluates the query against the graph.
//
// Result construction is deterministic: bindings are enumerated, filtered by
// the where clause, ordered, projected (multiple projections join with ", "),
// deduplicated when distinct, truncated by limit, then collected into a set.
// Without `order by`, rows order bytewise-lexicographically on the bound
// value tuple. With `order by`, the key orders class-aware: values that parse
// entirely as finite decimal numbers come first and compare numerically,
// remaining values compare bytewise; ties fall back to the tuple order.
// The same class-aware comparison drives <, <=, >, >= in where clauses.
//
// An anchor entity absent from the graph yields an empty set. A projection,
// condition, or order key whose property is not "name" (the only node
// property) throws ExecutionError, as does an unbound variable.
AnswerSet execute_cql(const CqlAst& ast, const kg::KnowledgeGraph& graph);

// parse + execute; parse failures propagate.
AnswerSet execute_cql(std::string_view text, const kg::KnowledgeGraph& graph);

} // namespace kgqa::cql
