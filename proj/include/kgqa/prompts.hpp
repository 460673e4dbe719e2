#pragma once

// Prompt templates, versioned so they can be swapped wholesale without
// touching callers. The stub backends parse these exact layouts back out of
// ModelRequest::user_content, so builders and parsers must stay in sync.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgqa::kg {
struct Triple;
}

namespace kgqa::prompts {

inline constexpr std::string_view kVersion = "v1";

// translator: the user content is the question, verbatim.
std::string translator_system();
std::string translator_user(std::string_view question);

// selector: pick one candidate entity name for a mention.
//   Question: <question>
//   Mention: <mention>
//   Candidates:
//   - <candidate>           (one line each)
std::string selector_system();
std::string selector_user(std::string_view question, std::string_view mention,
                          const std::vector<std::string>& candidates);

struct SelectorRequest {
    std::string question;
    std::string mention;
    std::vector<std::string> candidates;
};
// Inverse of selector_user; nullopt if the content is not in that layout.
std::optional<SelectorRequest> parse_selector_user(std::string_view content);

// reader: answer from retrieved knowledge, one "ANSWER: <label>" line per
// answer.
//   Question: <question>
//   Knowledge:
//   The <relation> of <head> is <tail>.   (one line per triple)
std::string reader_system();
std::string reader_user(std::string_view question, const std::vector<kg::Triple>& knowledge);

struct ReaderRequest {
    std::string question;
    // per knowledge line: the sentence parsed back into (relation, tail);
    // relation is taken up to the first " of ", tail after the last " is ".
    std::vector<std::pair<std::string, std::string>> facts;
};
std::optional<ReaderRequest> parse_reader_user(std::string_view content);

// "ANSWER: <label>" lines of a reader response, trimmed, in order.
std::vector<std::string> parse_answer_labels(std::string_view response_text);

// One knowledge-base fact as a sentence.
std::string verbalize_triple(const kg::Triple& triple);

} // namespace kgqa::prompts
