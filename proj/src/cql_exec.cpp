#include "kgqa/cql.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <unordered_set>
#include <utility>

#include "kgqa/errors.hpp"
#include "kgqa/kg.hpp"

namespace kgqa::cql {
namespace {

bool parse_number(std::string_view s, double& out) {
    if (s.empty()) return false;
    const char* last = s.data() + s.size();
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), last, v);
    if (ec != std::errc() || p != last || !std::isfinite(v)) return false;
    out = v;
    return true;
}

// Total order for where-clause inequalities and order-by keys: fully numeric
// values come first and compare numerically (equal numbers fall back to byte
// order so "3" and "3.0" stay distinct); everything else compares bytewise.
int compare_values(std::string_view a, std::string_view b) {
    double x = 0, y = 0;
    const bool a_num = parse_number(a, x);
    const bool b_num = parse_number(b, y);
    if (a_num != b_num) return a_num ? -1 : 1;
    if (a_num && b_num) {
        if (x < y) return -1;
        if (x > y) return 1;
    }
    int c = a.compare(b);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

bool condition_holds(std::string_view value, CmpOp op, std::string_view literal) {
    switch (op) {
    case CmpOp::eq: return value == literal;
    case CmpOp::ne: return value != literal;
    case CmpOp::lt: return compare_values(value, literal) < 0;
    case CmpOp::le: return compare_values(value, literal) <= 0;
    case CmpOp::gt: return compare_values(value, literal) > 0;
    case CmpOp::ge: return compare_values(value, literal) >= 0;
    case CmpOp::contains: return value.find(literal) != std::string_view::npos;
    }
    return false;
}

using Row = std::vector<std::string>; // one value per hop target, in hop order

// Index of a referenced variable; the only node property is "name".
std::size_t resolve(const CqlAst& ast, const std::string& variable,
                    const std::string& property) {
    if (property != "name")
        throw ExecutionError("unknown property '" + property + "'; nodes expose only 'name'");
    for (std::size_t h = 0; h < ast.hops.size(); ++h)
        if (ast.hops[h].target == variable) return h;
    throw ExecutionError("unbound variable '" + variable + "'");
}

void bind_first_hop(const Hop& hop, const kg::KnowledgeGraph& graph, std::vector<Row>& rows) {
    if (hop.direction == Direction::forward && hop.anchor) {
        for (const auto& t : graph.outgoing(*hop.anchor))
            if (t.relation == hop.relation) rows.push_back({t.tail});
        return;
    }
    for (const auto& t : graph.triples()) {
        if (t.relation != hop.relation) continue;
        if (hop.direction == Direction::forward) {
            rows.push_back({t.tail});
        } else if (!hop.anchor || t.tail == *hop.anchor) {
            rows.push_back({t.head});
        }
    }
}

void bind_second_hop(const Hop& hop, const kg::KnowledgeGraph& graph, std::vector<Row>& rows) {
    std::vector<Row> next;
    for (const auto& row : rows) {
        const std::string& source = row.front();
        if (hop.direction == Direction::forward) {
            for (const auto& t : graph.outgoing(source))
                if (t.relation == hop.relation) next.push_back({source, t.tail});
        } else {
            for (const auto& t : graph.triples())
                if (t.relation == hop.relation && t.tail == source)
                    next.push_back({source, t.head});
        }
    }
    rows = std::move(next);
}

} // namespace

AnswerSet execute_cql(const CqlAst& ast, const kg::KnowledgeGraph& graph) {
    if (ast.hops.empty() || ast.hops.size() > 2)
        throw ExecutionError("pattern must have 1 or 2 hops");

    // Resolve every reference up front so a bad query fails the same way on
    // every graph, including ones where no row survives.
    std::vector<std::size_t> where_indices;
    for (const auto& c : ast.where) where_indices.push_back(resolve(ast, c.variable, c.property));
    std::vector<std::size_t> projected;
    for (const auto& p : ast.ret.projections)
        projected.push_back(resolve(ast, p.variable, p.property));
    std::size_t order_index = 0;
    if (ast.order_by) order_index = resolve(ast, ast.order_by->variable, ast.order_by->property);

    std::vector<Row> rows;
    bind_first_hop(ast.hops.front(), graph, rows);
    if (ast.hops.size() == 2) bind_second_hop(ast.hops.back(), graph, rows);

    std::erase_if(rows, [&](const Row& row) {
        for (std::size_t i = 0; i < ast.where.size(); ++i) {
            const auto& c = ast.where[i];
            if (!condition_holds(row[where_indices[i]], c.op, c.literal)) return true;
        }
        return false;
    });

    std::vector<std::string> ordered;
    if (ast.ret.count_star) {
        ordered.push_back(std::to_string(rows.size()));
    } else {
        std::sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
            if (ast.order_by) {
                int c = compare_values(a[order_index], b[order_index]);
                if (!ast.order_by->ascending) c = -c;
                if (c != 0) return c < 0;
            }
            return a < b;
        });
        ordered.reserve(rows.size());
        for (const auto& row : rows) {
            std::string value;
            for (std::size_t i = 0; i < projected.size(); ++i) {
                if (i > 0) value += ", ";
                value += row[projected[i]];
            }
            ordered.push_back(std::move(value));
        }
        if (ast.ret.distinct) {
            std::unordered_set<std::string> seen;
            std::vector<std::string> unique;
            for (auto& value : ordered)
                if (seen.insert(value).second) unique.push_back(std::move(value));
            ordered = std::move(unique);
        }
    }
    if (ast.limit && ordered.size() > *ast.limit) ordered.resize(*ast.limit);
    return AnswerSet(ordered.begin(), ordered.end());
}

AnswerSet execute_cql(std::string_view text, const kg::KnowledgeGraph& graph) {
    return execute_cql(parse_cql(text), graph);
}

} // namespace kgqa::cql
