#include "kgqa/cql.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <string>
#include <utility>

#include "kgqa/errors.hpp"

namespace kgqa::cql {
namespace {

enum class TokType {
    ident,
    str,
    num,
    lparen,
    rparen,
    lbrace,
    rbrace,
    lbracket,
    rbracket,
    colon,
    dot,
    comma,
    star,
    dash,
    arrow, // ->
    lt,
    gt,
    le,
    ge,
    ne, // <>
    eq,
    end
};

struct Token {
    TokType type;
    std::string text;  // raw spelling (identifier text, number digits)
    std::string value; // unescaped content for str tokens
    std::size_t pos;
};

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<Token> lex(std::string_view text) {
    std::vector<Token> toks;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        std::size_t pos = i;
        auto push = [&](TokType t, std::size_t len) {
            toks.push_back({t, std::string(text.substr(pos, len)), {}, pos});
            i += len;
        };
        if (ident_start(c)) {
            std::size_t j = i + 1;
            while (j < n && ident_char(text[j])) ++j;
            push(TokType::ident, j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i + 1;
            while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j + 1 < n && text[j] == '.' &&
                std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
                j += 2;
                while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            }
            push(TokType::num, j - i);
        } else if (c == '"' || c == '\'') {
            std::string value;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < n) {
                if (text[j] == '\\' && j + 1 < n) {
                    char next = text[j + 1];
                    if (next == c || next == '\\') {
                        value.push_back(next);
                    } else {
                        value.push_back('\\');
                        value.push_back(next);
                    }
                    j += 2;
                } else if (text[j] == c) {
                    closed = true;
                    ++j;
                    break;
                } else {
                    value.push_back(text[j]);
                    ++j;
                }
            }
            if (!closed) throw ParseError(pos, "closing quote", "end of input");
            toks.push_back({TokType::str, std::string(text.substr(pos, j - pos)),
                            std::move(value), pos});
            i = j;
        } else {
            switch (c) {
            case '(': push(TokType::lparen, 1); break;
            case ')': push(TokType::rparen, 1); break;
            case '{': push(TokType::lbrace, 1); break;
            case '}': push(TokType::rbrace, 1); break;
            case '[': push(TokType::lbracket, 1); break;
            case ']': push(TokType::rbracket, 1); break;
            case ':': push(TokType::colon, 1); break;
            case '.': push(TokType::dot, 1); break;
            case ',': push(TokType::comma, 1); break;
            case '*': push(TokType::star, 1); break;
            case '=': push(TokType::eq, 1); break;
            case '-':
                if (i + 1 < n && text[i + 1] == '>') push(TokType::arrow, 2);
                else push(TokType::dash, 1);
                break;
            case '<':
                if (i + 1 < n && text[i + 1] == '=') push(TokType::le, 2);
                else if (i + 1 < n && text[i + 1] == '>') push(TokType::ne, 2);
                else push(TokType::lt, 1);
                break;
            case '>':
                if (i + 1 < n && text[i + 1] == '=') push(TokType::ge, 2);
                else push(TokType::gt, 1);
                break;
            default:
                throw ParseError(pos, "a query token", "'" + std::string(1, c) + "'");
            }
        }
    }
    toks.push_back({TokType::end, "", {}, n});
    return toks;
}

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(lex(text)) {}

    CqlAst parse() {
        CqlAst ast;
        expect_keyword("match");
        parse_pattern(ast);
        if (peek().type == TokType::comma)
            throw UnsupportedFeatureError(peek().pos, "multiple match paths");
        if (at_keyword("where")) parse_where(ast);
        expect_keyword("return");
        parse_return(ast);
        if (at_keyword("order")) parse_order(ast);
        if (at_keyword("limit")) parse_limit(ast);
        if (peek().type != TokType::end)
            throw ParseError(peek().pos, "end of query", describe(peek()));
        return ast;
    }

private:
    std::vector<Token> toks_;
    std::size_t i_ = 0;
    std::vector<std::string> variables_;

    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(i_ + ahead, toks_.size() - 1)];
    }
    const Token& advance() {
        const Token& t = toks_[i_];
        if (i_ + 1 < toks_.size()) ++i_;
        return t;
    }

    static std::string describe(const Token& t) {
        if (t.type == TokType::end) return "end of input";
        return "'" + t.text + "'";
    }

    bool at_keyword(std::string_view kw) const {
        return peek().type == TokType::ident && lower(peek().text) == kw;
    }
    void expect_keyword(std::string_view kw) {
        if (!at_keyword(kw)) throw ParseError(peek().pos, "'" + std::string(kw) + "'",
                                              describe(peek()));
        advance();
    }
    const Token& expect(TokType type, const std::string& what) {
        if (peek().type != type) throw ParseError(peek().pos, what, describe(peek()));
        return advance();
    }
    void expect_marker(std::string_view marker) {
        // ENTITY / Relationship labels are case-sensitive, unlike keywords.
        if (peek().type != TokType::ident || peek().text != marker)
            throw ParseError(peek().pos, "label '" + std::string(marker) + "'",
                             describe(peek()));
        advance();
    }

    std::string parse_quoted_name(std::string_view marker) {
        expect(TokType::colon, "':'");
        expect_marker(marker);
        expect(TokType::lbrace, "'{'");
        expect_marker("name");
        expect(TokType::colon, "':'");
        std::string value = expect(TokType::str, "a quoted name").value;
        expect(TokType::rbrace, "'}'");
        return value;
    }

    void parse_pattern(CqlAst& ast) {
        expect(TokType::lparen, "'('");
        std::optional<std::string> anchor;
        if (peek().type == TokType::colon) anchor = parse_quoted_name("ENTITY");
        expect(TokType::rparen, "')'");

        while (peek().type == TokType::dash || peek().type == TokType::lt) {
            if (ast.hops.size() == 2)
                throw UnsupportedFeatureError(peek().pos, "patterns with more than 2 hops");
            Hop hop;
            if (peek().type == TokType::lt) {
                hop.direction = Direction::backward;
                advance();
                expect(TokType::dash, "'-'");
            } else {
                hop.direction = Direction::forward;
                advance();
            }
            expect(TokType::lbracket, "'['");
            hop.relation = parse_quoted_name("Relationship");
            expect(TokType::rbracket, "']'");
            if (hop.direction == Direction::forward) expect(TokType::arrow, "'->'");
            else expect(TokType::dash, "'-'");

            expect(TokType::lparen, "'('");
            if (peek().type == TokType::colon)
                throw UnsupportedFeatureError(peek().pos, "anchored target nodes");
            const Token& var = expect(TokType::ident, "a target variable");
            if (std::find(variables_.begin(), variables_.end(), var.text) != variables_.end())
                throw ParseError(var.pos, "a fresh variable name", describe(var));
            hop.target = var.text;
            variables_.push_back(var.text);
            expect(TokType::rparen, "')'");

            if (ast.hops.empty()) hop.anchor = std::move(anchor);
            ast.hops.push_back(std::move(hop));
        }
        if (ast.hops.empty())
            throw ParseError(peek().pos, "a relationship hop", describe(peek()));
    }

    void require_bound(const Token& var) const {
        if (std::find(variables_.begin(), variables_.end(), var.text) == variables_.end())
            throw ParseError(var.pos, "a bound pattern variable", describe(var));
    }

    std::pair<std::string, std::string> parse_var_property() {
        const Token& var = expect(TokType::ident, "a variable");
        require_bound(var);
        expect(TokType::dot, "'.'");
        const Token& prop = expect(TokType::ident, "a property name");
        return {var.text, prop.text};
    }

    void parse_where(CqlAst& ast) {
        advance(); // where
        while (true) {
            Condition cond;
            std::tie(cond.variable, cond.property) = parse_var_property();
            switch (peek().type) {
            case TokType::eq: cond.op = CmpOp::eq; advance(); break;
            case TokType::ne: cond.op = CmpOp::ne; advance(); break;
            case TokType::lt: cond.op = CmpOp::lt; advance(); break;
            case TokType::le: cond.op = CmpOp::le; advance(); break;
            case TokType::gt: cond.op = CmpOp::gt; advance(); break;
            case TokType::ge: cond.op = CmpOp::ge; advance(); break;
            default:
                if (at_keyword("contains")) {
                    cond.op = CmpOp::contains;
                    advance();
                } else {
                    throw ParseError(peek().pos, "a comparison operator", describe(peek()));
                }
            }
            if (peek().type == TokType::str) cond.literal = advance().value;
            else if (peek().type == TokType::num) cond.literal = advance().text;
            else throw ParseError(peek().pos, "a literal", describe(peek()));
            ast.where.push_back(std::move(cond));

            if (at_keyword("and")) {
                advance();
                continue;
            }
            if (at_keyword("or"))
                throw UnsupportedFeatureError(peek().pos, "'or' in where clauses");
            break;
        }
    }

    void parse_return(CqlAst& ast) {
        if (at_keyword("distinct")) {
            ast.ret.distinct = true;
            advance();
        }
        if (at_keyword("count")) {
            if (ast.ret.distinct)
                throw UnsupportedFeatureError(peek().pos, "distinct count(*)");
            advance();
            expect(TokType::lparen, "'('");
            if (peek().type != TokType::star)
                throw UnsupportedFeatureError(peek().pos,
                                              "count over expressions; only count(*)");
            advance();
            expect(TokType::rparen, "')'");
            ast.ret.count_star = true;
            return;
        }
        while (true) {
            Projection proj;
            std::tie(proj.variable, proj.property) = parse_var_property();
            ast.ret.projections.push_back(std::move(proj));
            if (peek().type != TokType::comma) break;
            advance();
        }
    }

    void parse_order(CqlAst& ast) {
        advance(); // order
        expect_keyword("by");
        if (ast.ret.count_star)
            throw UnsupportedFeatureError(peek().pos, "order by with count(*)");
        OrderBy order;
        std::tie(order.variable, order.property) = parse_var_property();
        if (at_keyword("asc")) advance();
        else if (at_keyword("desc")) {
            order.ascending = false;
            advance();
        }
        ast.order_by = std::move(order);
    }

    void parse_limit(CqlAst& ast) {
        advance(); // limit
        const Token& num = expect(TokType::num, "a positive integer");
        std::uint64_t value = 0;
        auto [p, ec] = std::from_chars(num.text.data(), num.text.data() + num.text.size(), value);
        if (ec != std::errc() || p != num.text.data() + num.text.size() || value == 0)
            throw ParseError(num.pos, "a positive integer", describe(num));
        ast.limit = value;
    }
};

std::string quote(std::string_view name) {
    std::string out = "\"";
    for (char c : name) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string_view op_text(CmpOp op) {
    switch (op) {
    case CmpOp::eq: return "=";
    case CmpOp::ne: return "<>";
    case CmpOp::lt: return "<";
    case CmpOp::le: return "<=";
    case CmpOp::gt: return ">";
    case CmpOp::ge: return ">=";
    case CmpOp::contains: return "contains";
    }
    return "=";
}

// A raw-text mention: value bytes live at [begin, end) inside the quotes.
struct RawMention {
    std::string value;
    std::size_t begin;
    std::size_t end;
    char quote;
};

// Finds every `:<marker>{name:"..."}` occurrence, tolerating text around it
// that does not parse. Broken occurrences are skipped, not errors.
std::vector<RawMention> scan_mentions(std::string_view text, std::string_view marker) {
    std::vector<RawMention> found;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto skip_ws = [&](std::size_t j) {
        while (j < n && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        return j;
    };
    while (i < n) {
        std::size_t hit = text.find(':', i);
        if (hit == std::string_view::npos) break;
        i = hit + 1;
        if (text.compare(hit + 1, marker.size(), marker) != 0) continue;
        std::size_t j = hit + 1 + marker.size();
        if (j < n && ident_char(text[j])) continue; // longer identifier, not the marker
        j = skip_ws(j);
        if (j >= n || text[j] != '{') continue;
        j = skip_ws(j + 1);
        if (text.compare(j, 4, "name") != 0) continue;
        j += 4;
        if (j < n && ident_char(text[j])) continue;
        j = skip_ws(j);
        if (j >= n || text[j] != ':') continue;
        j = skip_ws(j + 1);
        if (j >= n || (text[j] != '"' && text[j] != '\'')) continue;
        char q = text[j];
        std::size_t begin = ++j;
        std::string value;
        bool closed = false;
        while (j < n) {
            if (text[j] == '\\' && j + 1 < n) {
                char next = text[j + 1];
                if (next == q || next == '\\') {
                    value.push_back(next);
                } else {
                    value.push_back('\\');
                    value.push_back(next);
                }
                j += 2;
            } else if (text[j] == q) {
                closed = true;
                break;
            } else {
                value.push_back(text[j]);
                ++j;
            }
        }
        if (!closed) continue;
        found.push_back({std::move(value), begin, j, q});
        i = j + 1;
    }
    return found;
}

std::string_view marker_for(MentionKind kind) {
    return kind == MentionKind::entity ? "ENTITY" : "Relationship";
}

} // namespace

CqlAst parse_cql(std::string_view text) {
    return Parser(text).parse();
}

std::string render_cql(const CqlAst& ast) {
    if (ast.hops.empty() || ast.hops.size() > 2)
        throw std::invalid_argument("pattern must have 1 or 2 hops");
    std::string out = "match (";
    if (ast.hops.front().anchor)
        out += ":ENTITY{name:" + quote(*ast.hops.front().anchor) + "}";
    out += ")";
    for (const auto& hop : ast.hops) {
        std::string rel = "[:Relationship{name:" + quote(hop.relation) + "}]";
        if (hop.direction == Direction::forward) out += "-" + rel + "->";
        else out += "<-" + rel + "-";
        out += "(" + hop.target + ")";
    }
    if (!ast.where.empty()) {
        out += " where ";
        for (std::size_t i = 0; i < ast.where.size(); ++i) {
            const auto& c = ast.where[i];
            if (i > 0) out += " and ";
            out += c.variable + "." + c.property + " " + std::string(op_text(c.op)) + " " +
                   quote(c.literal);
        }
    }
    out += " return ";
    if (ast.ret.distinct) out += "distinct ";
    if (ast.ret.count_star) {
        out += "count(*)";
    } else {
        for (std::size_t i = 0; i < ast.ret.projections.size(); ++i) {
            if (i > 0) out += ", ";
            out += ast.ret.projections[i].variable + "." + ast.ret.projections[i].property;
        }
    }
    if (ast.order_by) {
        out += " order by " + ast.order_by->variable + "." + ast.order_by->property;
        if (!ast.order_by->ascending) out += " desc";
    }
    if (ast.limit) out += " limit " + std::to_string(*ast.limit);
    return out;
}

std::vector<std::string> extract_entities(std::string_view text) {
    std::vector<std::string> out;
    for (auto& m : scan_mentions(text, "ENTITY")) out.push_back(std::move(m.value));
    return out;
}

std::vector<std::string> extract_relations(std::string_view text) {
    std::vector<std::string> out;
    for (auto& m : scan_mentions(text, "Relationship")) out.push_back(std::move(m.value));
    return out;
}

std::string substitute(std::string_view text, std::string_view old_name,
                       std::string_view new_name, MentionKind kind, std::size_t occurrence) {
    auto mentions = scan_mentions(text, marker_for(kind));
    std::size_t seen = 0;
    for (const auto& m : mentions) {
        if (m.value != old_name) continue;
        if (seen++ < occurrence) continue;
        if (old_name == new_name) return std::string(text);
        std::string escaped;
        for (char c : new_name) {
            if (c == m.quote || c == '\\') escaped.push_back('\\');
            escaped.push_back(c);
        }
        std::string out(text.substr(0, m.begin));
        out += escaped;
        out += text.substr(m.end);
        return out;
    }
    throw SubstitutionError(kind == MentionKind::entity ? "entity" : "relation",
                            std::string(old_name), occurrence);
}

} // namespace kgqa::cql
