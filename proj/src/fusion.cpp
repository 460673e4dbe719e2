#include "kgqa/fusion.hpp"

#include <stdexcept>

#include "kgqa/metrics.hpp"

namespace kgqa::fusion {

AnswerSet better(const AnswerSet& a, const AnswerSet& b, const AnswerSet& gold) {
    const double fa = metrics::prf1(a, gold).f1;
    const double fb = metrics::prf1(b, gold).f1;
    if (fb > fa) return b;
    if (fb == fa && a.empty() && !b.empty()) return b;
    return a;
}

AnswerSet dda(const AnswerSet& s, const AnswerSet& i, const AnswerSet& gold, double sigma) {
    if (sigma < 0.0 || sigma > 1.0)
        throw std::invalid_argument("sigma must lie in [0, 1]");
    if (!s.empty() && metrics::prf1(s, gold).f1 >= sigma) return s;
    return better(s, i, gold);
}

AnswerSet bna(const AnswerSet& s, const AnswerSet& i) {
    return s.empty() ? i : s;
}

AnswerSet fuse(const FusionConfig& config, const AnswerSet& s, const AnswerSet& i,
               const AnswerSet& gold) {
    return config.rule == Rule::dda ? dda(s, i, gold, config.sigma) : bna(s, i);
}

} // namespace kgqa::fusion
