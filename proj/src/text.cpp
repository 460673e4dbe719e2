#include "kgqa/text.hpp"

#include <algorithm>
#include <cctype>

namespace kgqa::text {

std::vector<char32_t> to_codepoints(std::string_view utf8) {
    std::vector<char32_t> out;
    out.reserve(utf8.size());
    std::size_t i = 0;
    while (i < utf8.size()) {
        unsigned char b0 = static_cast<unsigned char>(utf8[i]);
        std::size_t len = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            len = 1;
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        } else {
            out.push_back(b0); // stray continuation byte
            ++i;
            continue;
        }
        if (i + len > utf8.size()) {
            out.push_back(b0);
            ++i;
            continue;
        }
        bool valid = true;
        for (std::size_t k = 1; k < len; ++k) {
            unsigned char bk = static_cast<unsigned char>(utf8[i + k]);
            if ((bk & 0xC0) != 0x80) {
                valid = false;
                break;
            }
            cp = (cp << 6) | (bk & 0x3F);
        }
        if (!valid) {
            out.push_back(b0);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::vector<std::uint64_t> bigram_multiset(std::string_view utf8) {
    const auto cps = to_codepoints(utf8);
    std::vector<std::uint64_t> grams;
    if (cps.size() < 2) return grams;
    grams.reserve(cps.size() - 1);
    for (std::size_t i = 0; i + 1 < cps.size(); ++i) {
        grams.push_back((static_cast<std::uint64_t>(cps[i]) << 32) |
                        static_cast<std::uint64_t>(cps[i + 1]));
    }
    std::sort(grams.begin(), grams.end());
    return grams;
}

double bigram_dice(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                   bool equal_strings) {
    if (equal_strings) return 1.0;
    if (a.empty() && b.empty()) return 0.0;
    std::size_t shared = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++shared;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return 2.0 * static_cast<double>(shared) / static_cast<double>(a.size() + b.size());
}

double bigram_dice(std::string_view a, std::string_view b) {
    return bigram_dice(bigram_multiset(a), bigram_multiset(b), a == b);
}

bool shares_bigram(std::string_view a, std::string_view b) {
    const auto ga = bigram_multiset(a);
    const auto gb = bigram_multiset(b);
    std::size_t i = 0, j = 0;
    while (i < ga.size() && j < gb.size()) {
        if (ga[i] == gb[j]) return true;
        if (ga[i] < gb[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return false;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    const auto ca = to_codepoints(a);
    const auto cb = to_codepoints(b);
    if (ca.empty()) return cb.size();
    if (cb.empty()) return ca.size();
    std::vector<std::size_t> prev(cb.size() + 1);
    std::vector<std::size_t> curr(cb.size() + 1);
    for (std::size_t j = 0; j <= cb.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= ca.size(); ++i) {
        curr[0] = i;
        for (std::size_t j = 1; j <= cb.size(); ++j) {
            const std::size_t subst = prev[j - 1] + (ca[i - 1] == cb[j - 1] ? 0 : 1);
            curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, subst});
        }
        std::swap(prev, curr);
    }
    return prev[cb.size()];
}

double edit_similarity(std::string_view a, std::string_view b) {
    const auto la = to_codepoints(a).size();
    const auto lb = to_codepoints(b).size();
    const auto longest = std::max(la, lb);
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

std::string_view trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

std::string_view strip_qualifier(std::string_view name) {
    if (name.empty() || name.back() != ']') return name;
    const auto open = name.rfind('[');
    if (open == std::string_view::npos || open == 0) return name;
    const auto base = trim(name.substr(0, open));
    return base.empty() ? name : base;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace kgqa::text
