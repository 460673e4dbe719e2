#pragma once

// Combines the query-execution answer s and the retrieval answer i into the
// final answer, either by F1-guided decision (dda) or by the empty-fallback
// baseline (bna). dda scores against gold, so it is an evaluation-time rule;
// bna needs no gold and is the deployable fallback.

#include "kgqa/answer.hpp"

namespace kgqa::fusion {

enum class Rule { dda, bna };

struct FusionConfig {
    double sigma = 1.0; // decision threshold in [0, 1]; 1 compares both paths always
    Rule rule = Rule::dda;
};

// Whichever of a, b scores higher F1 against gold. Ties keep a, except that
// an empty a never beats a non-empty b (so a tie between "nothing" and
// "something wrong" propagates the attempt, matching bna's fallback).
AnswerSet better(const AnswerSet& a, const AnswerSet& b, const AnswerSet& gold);

// s when s is non-empty and F1(s, gold) >= sigma, otherwise better(s, i).
// An empty s always falls through to better. Throws std::invalid_argument
// for sigma outside [0, 1].
AnswerSet dda(const AnswerSet& s, const AnswerSet& i, const AnswerSet& gold, double sigma);

// s unless empty, else i.
AnswerSet bna(const AnswerSet& s, const AnswerSet& i);

// Applies config.rule (gold is only consulted for dda).
AnswerSet fuse(const FusionConfig& config, const AnswerSet& s, const AnswerSet& i,
               const AnswerSet& gold);

} // namespace kgqa::fusion
