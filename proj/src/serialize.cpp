#include "ofsulr/serialize.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <sstream>

#include "ofsulr/error.hpp"

namespace ofsulr::ser {

std::string fmtDouble(double v) {
    std::array<char, 48> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw NumericError("failed to format double");
    return {buf.data(), ptr};
}

double parseDouble(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw DataError("malformed number: '" + s + "'");
    return v;
}

namespace {

char hexDigit(int v) { return static_cast<char>(v < 10 ? '0' + v : 'a' + (v - 10)); }

int hexValue(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string escapeToken(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        if (c == '%' || c == ' ' || c == '\n' || c == '\r') {
            out += '%';
            out += hexDigit(c >> 4);
            out += hexDigit(c & 0xf);
        } else {
            out += static_cast<char>(c);
        }
    }
    if (out.empty()) out = "%";  // bare '%' marks the empty token
    return out;
}

std::string unescapeToken(const std::string& s) {
    if (s == "%") return "";
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            const int hi = hexValue(s[i + 1]);
            const int lo = hexValue(s[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out += static_cast<char>((hi << 4) | lo);
                i += 2;
                continue;
            }
        }
        out += s[i];
    }
    return out;
}

std::vector<std::string> splitTokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream iss(line);
    std::string token;
    while (iss >> token) out.push_back(token);
    return out;
}

std::vector<std::string> expectLine(std::istream& in, const std::string& tag) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> tokens = splitTokens(line);
        if (tokens.empty()) continue;
        if (tokens.front() != tag) {
            throw DataError("expected '" + tag + "', found '" + tokens.front() + "'");
        }
        tokens.erase(tokens.begin());
        return tokens;
    }
    throw DataError("unexpected end of file while looking for '" + tag + "'");
}

}  // namespace ofsulr::ser
