#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ofsulr::ser {

// Shortest round-trip decimal form; parsing it recovers the exact double.
std::string fmtDouble(double v);
double parseDouble(const std::string& s);

// Percent-encodes '%', space, CR and LF so a token survives the
// line-and-space bundle format.
std::string escapeToken(const std::string& s);
std::string unescapeToken(const std::string& s);

// Splits a line on single spaces.
std::vector<std::string> splitTokens(const std::string& line);

// Reads the next line and verifies its first token; returns the remaining
// tokens. Throws DataError at EOF or on tag mismatch.
std::vector<std::string> expectLine(std::istream& in, const std::string& tag);

}  // namespace ofsulr::ser
