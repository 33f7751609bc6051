#include "wrangle/textutil.hpp"

#include <algorithm>
#include <cctype>

namespace wrangle {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }
bool is_alnum(unsigned char c) { return std::isalnum(c) != 0; }

} // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && is_space(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && is_space(static_cast<unsigned char>(s[end - 1]))) --end;
    return std::string(s.substr(begin, end - begin));
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_run = false;
    for (char c : s) {
        if (is_space(static_cast<unsigned char>(c))) {
            in_run = true;
            continue;
        }
        if (in_run && !out.empty()) out.push_back(' ');
        in_run = false;
        out.push_back(c);
    }
    return out;
}

std::string normalize_value(std::string_view s) {
    return collapse_whitespace(to_lower(trim(s)));
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : s) {
        if (is_alnum(static_cast<unsigned char>(c))) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::set<std::string> token_set(std::string_view s) {
    auto tokens = tokenize(s);
    return std::set<std::string>(tokens.begin(), tokens.end());
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t intersection = 0;
    for (const auto& t : a) {
        if (b.count(t) != 0) ++intersection;
    }
    const std::size_t unionsize = a.size() + b.size() - intersection;
    return static_cast<double>(intersection) / static_cast<double>(unionsize);
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    const std::string la = to_lower(a);
    const std::string lb = to_lower(b);
    std::vector<std::size_t> row(lb.size() + 1);
    for (std::size_t j = 0; j <= lb.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= la.size(); ++i) {
        std::size_t diagonal = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= lb.size(); ++j) {
            const std::size_t previous = row[j];
            const std::size_t cost = la[i - 1] == lb[j - 1] ? 0 : 1;
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diagonal + cost});
            diagonal = previous;
        }
    }
    return row[lb.size()];
}

} // namespace wrangle
