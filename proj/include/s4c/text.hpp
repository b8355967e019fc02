#pragma once

// Small line-oriented helpers shared by the plain-text file readers.

#include <cctype>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace s4c::text {

inline std::string trim(const std::string& s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

// Drops a trailing '#' comment and surrounding whitespace.
inline std::string strip_comment(const std::string& line)
{
    auto hash = line.find('#');
    return trim(hash == std::string::npos ? line : line.substr(0, hash));
}

inline std::vector<std::string> words(const std::string& s)
{
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;)
        out.push_back(w);
    return out;
}

// First whitespace-delimited word and the trimmed remainder.
inline std::pair<std::string, std::string> split_head(const std::string& s)
{
    std::string t = trim(s);
    std::size_t k = 0;
    while (k < t.size() && !std::isspace(static_cast<unsigned char>(t[k])))
        ++k;
    return {t.substr(0, k), trim(t.substr(k))};
}

// Splits at the first occurrence of sep; both halves trimmed. The second
// half is empty when sep is absent.
inline std::pair<std::string, std::string> split_at(const std::string& s, char sep)
{
    auto k = s.find(sep);
    if (k == std::string::npos)
        return {trim(s), {}};
    return {trim(s.substr(0, k)), trim(s.substr(k + 1))};
}

inline std::vector<std::string> split_all(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto k = s.find(sep, start);
        out.push_back(trim(s.substr(start, k == std::string::npos ? std::string::npos : k - start)));
        if (k == std::string::npos)
            break;
        start = k + 1;
    }
    return out;
}

inline std::optional<std::size_t> to_number(const std::string& s)
{
    std::string t = trim(s);
    if (t.empty() || t.size() > 9)
        return std::nullopt;
    std::size_t n = 0;
    for (char ch : t) {
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            return std::nullopt;
        n = n * 10 + static_cast<std::size_t>(ch - '0');
    }
    return n;
}

} // namespace s4c::text
