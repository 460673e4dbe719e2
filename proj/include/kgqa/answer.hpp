#pragma once

#include <set>
#include <string>

namespace kgqa {

// Unordered answer collection; duplicates and order carry no meaning.
using AnswerSet = std::set<std::string>;

} // namespace kgqa
