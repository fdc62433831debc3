#pragma once

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace ocs::detail {

/// 17 significant digits: enough for binary64 values to survive a
/// write -> parse round trip bit-exactly.
inline std::string fmt_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Splits into lines on '\n' (a trailing newline adds no empty line).
inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

/// Whitespace-separated tokens of a line, stopping at a '#' comment.
inline std::vector<std::string_view> tokenize(std::string_view line) {
    std::vector<std::string_view> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size() || line[i] == '#') break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' &&
               line[j] != '#')
            ++j;
        toks.push_back(line.substr(i, j - i));
        i = j;
    }
    return toks;
}

/// Parses a whole token as a double; "inf"/"-inf" accepted.
inline bool parse_double(std::string_view tok, double& out) {
    if (tok == "inf") { out = std::numeric_limits<double>::infinity(); return true; }
    if (tok == "-inf") { out = -std::numeric_limits<double>::infinity(); return true; }
    std::string s(tok);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty() || errno == ERANGE) return false;
    out = v;
    return true;
}

/// Parses a whole token as a positive (1-based) index.
inline bool parse_index(std::string_view tok, std::size_t& out) {
    if (tok.empty()) return false;
    std::size_t v = 0;
    for (char ch : tok) {
        if (ch < '0' || ch > '9') return false;
        if (v > (std::numeric_limits<std::size_t>::max() - 9) / 10) return false;
        v = v * 10 + std::size_t(ch - '0');
    }
    out = v;
    return true;
}

}  // namespace ocs::detail
