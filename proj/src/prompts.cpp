#include "kgqa/prompts.hpp"

#include <utility>

#include "kgqa/kg.hpp"
#include "kgqa/text.hpp"

namespace kgqa::prompts {
namespace {

// Splits on '\n'; a trailing newline does not produce an empty last line.
std::vector<std::string_view> lines_of(std::string_view content) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= content.size()) {
        std::size_t nl = content.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < content.size()) lines.push_back(content.substr(start));
            break;
        }
        lines.push_back(content.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

bool take_prefix(std::string_view line, std::string_view prefix, std::string_view& rest) {
    if (!line.starts_with(prefix)) return false;
    rest = line.substr(prefix.size());
    return true;
}

} // namespace

std::string translator_system() {
    return "You translate questions about a knowledge graph into CQL queries. "
           "Reply with one CQL query and nothing else.";
}

std::string translator_user(std::string_view question) {
    return std::string(question);
}

std::string selector_system() {
    return "You link entity mentions to knowledge graph entries. "
           "Reply with exactly one name copied verbatim from the candidate list.";
}

std::string selector_user(std::string_view question, std::string_view mention,
                          const std::vector<std::string>& candidates) {
    std::string out = "Question: ";
    out += question;
    out += "\nMention: ";
    out += mention;
    out += "\nCandidates:";
    for (const auto& candidate : candidates) {
        out += "\n- ";
        out += candidate;
    }
    return out;
}

std::optional<SelectorRequest> parse_selector_user(std::string_view content) {
    auto lines = lines_of(content);
    if (lines.size() < 3) return std::nullopt;
    SelectorRequest req;
    std::string_view rest;
    if (!take_prefix(lines[0], "Question: ", rest)) return std::nullopt;
    req.question = std::string(rest);
    if (!take_prefix(lines[1], "Mention: ", rest)) return std::nullopt;
    req.mention = std::string(rest);
    if (lines[2] != "Candidates:") return std::nullopt;
    for (std::size_t i = 3; i < lines.size(); ++i) {
        if (!take_prefix(lines[i], "- ", rest)) return std::nullopt;
        req.candidates.emplace_back(rest);
    }
    return req;
}

std::string reader_system() {
    return "Answer the question using only the knowledge provided. "
           "Write each answer on its own line as: ANSWER: <label>. "
           "If the knowledge is insufficient, write nothing.";
}

std::string verbalize_triple(const kg::Triple& triple) {
    return "The " + triple.relation + " of " + triple.head + " is " + triple.tail + ".";
}

std::string reader_user(std::string_view question, const std::vector<kg::Triple>& knowledge) {
    std::string out = "Question: ";
    out += question;
    out += "\nKnowledge:";
    for (const auto& triple : knowledge) {
        out += "\n";
        out += verbalize_triple(triple);
    }
    return out;
}

std::optional<ReaderRequest> parse_reader_user(std::string_view content) {
    auto lines = lines_of(content);
    if (lines.size() < 2) return std::nullopt;
    ReaderRequest req;
    std::string_view rest;
    if (!take_prefix(lines[0], "Question: ", rest)) return std::nullopt;
    req.question = std::string(rest);
    if (lines[1] != "Knowledge:") return std::nullopt;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        if (!line.starts_with("The ") || !line.ends_with(".")) continue;
        std::string_view body = line.substr(4, line.size() - 5);
        std::size_t of_pos = body.find(" of ");
        std::size_t is_pos = body.rfind(" is ");
        if (of_pos == std::string_view::npos || is_pos == std::string_view::npos) continue;
        if (is_pos <= of_pos) continue;
        req.facts.emplace_back(std::string(body.substr(0, of_pos)),
                               std::string(body.substr(is_pos + 4)));
    }
    return req;
}

std::vector<std::string> parse_answer_labels(std::string_view response_text) {
    std::vector<std::string> labels;
    for (std::string_view line : lines_of(response_text)) {
        std::string_view trimmed = text::trim(line);
        if (!trimmed.starts_with("ANSWER:")) continue;
        labels.emplace_back(text::trim(trimmed.substr(7)));
    }
    return labels;
}

} // namespace kgqa::prompts
