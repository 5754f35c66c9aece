#include "ofsulr/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ofsulr/error.hpp"

namespace ofsulr {

namespace {

std::string toLower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// One RFC-4180 record; quoted fields may span lines. Returns false at EOF
// with no data consumed.
bool readRecord(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    int c = in.get();
    if (c == EOF) return false;

    std::string field;
    bool inQuotes = false;
    bool sawAny = false;
    while (true) {
        if (c == EOF) {
            fields.push_back(field);
            return true;
        }
        const char ch = static_cast<char>(c);
        if (inQuotes) {
            if (ch == '"') {
                const int next = in.peek();
                if (next == '"') {
                    field += '"';
                    in.get();
                } else {
                    inQuotes = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"' && field.empty() && !sawAny) {
            inQuotes = true;
        } else if (ch == ',') {
            fields.push_back(field);
            field.clear();
            sawAny = false;
            c = in.get();
            continue;
        } else if (ch == '\r') {
            if (in.peek() == '\n') in.get();
            fields.push_back(field);
            return true;
        } else if (ch == '\n') {
            fields.push_back(field);
            return true;
        } else {
            field += ch;
        }
        sawAny = true;
        c = in.get();
    }
}

bool parseInt64Strict(const std::string& s, std::int64_t& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool parseDoubleStrict(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

enum class TokenKind { Int, Real, Text };

TokenKind classify(const std::string& s) {
    std::int64_t i;
    if (parseInt64Strict(s, i)) return TokenKind::Int;
    double d;
    if (parseDoubleStrict(s, d)) return TokenKind::Real;
    return TokenKind::Text;
}

Cell makeCellAs(const std::string& raw, ColumnKind kind) {
    switch (kind) {
        case ColumnKind::Integer:
        case ColumnKind::Timestamp: {
            std::int64_t v;
            if (parseInt64Strict(raw, v)) return Cell{v};
            return Cell{};  // non-numeric under a numeric kind -> missing
        }
        case ColumnKind::Real: {
            double v;
            if (parseDoubleStrict(raw, v)) return Cell{v};
            return Cell{};
        }
        case ColumnKind::Text:
        case ColumnKind::Categorical:
            return Cell{raw};
        case ColumnKind::Mixed: {
            switch (classify(raw)) {
                case TokenKind::Int: {
                    std::int64_t v;
                    parseInt64Strict(raw, v);
                    return Cell{v};
                }
                case TokenKind::Real: {
                    double v;
                    parseDoubleStrict(raw, v);
                    return Cell{v};
                }
                case TokenKind::Text:
                    return Cell{raw};
            }
        }
    }
    return Cell{raw};
}

}  // namespace

Table parseCsv(std::istream& in, const std::string& tableName, const CsvOptions& options) {
    std::vector<std::string> header;
    if (!readRecord(in, header)) throw DataError("empty CSV: " + tableName);

    std::vector<std::string> sentinels;
    sentinels.reserve(options.missingSentinels.size());
    for (const auto& s : options.missingSentinels) sentinels.push_back(toLower(s));

    auto isSentinel = [&](const std::string& s) {
        return std::find(sentinels.begin(), sentinels.end(), toLower(s)) != sentinels.end();
    };

    const std::size_t width = header.size();
    std::vector<std::vector<std::string>> raw(width);
    std::vector<std::vector<bool>> present(width);

    std::vector<std::string> record;
    std::size_t rowIndex = 0;
    while (readRecord(in, record)) {
        ++rowIndex;
        if (record.size() != width) {
            throw DataError("ragged CSV row " + std::to_string(rowIndex) + " in " + tableName + ": got " +
                            std::to_string(record.size()) + " fields, expected " + std::to_string(width));
        }
        for (std::size_t c = 0; c < width; ++c) {
            const bool missing = isSentinel(record[c]);
            raw[c].push_back(missing ? std::string() : std::move(record[c]));
            present[c].push_back(!missing);
        }
    }

    std::vector<Column> columns;
    columns.reserve(width);
    for (std::size_t c = 0; c < width; ++c) {
        Column col;
        col.name = header[c];

        auto hint = options.kindHints.find(col.name);
        if (hint != options.kindHints.end()) {
            col.kind = hint->second;
        } else {
            bool sawInt = false, sawReal = false, sawText = false;
            for (std::size_t r = 0; r < raw[c].size(); ++r) {
                if (!present[c][r]) continue;
                switch (classify(raw[c][r])) {
                    case TokenKind::Int: sawInt = true; break;
                    case TokenKind::Real: sawReal = true; break;
                    case TokenKind::Text: sawText = true; break;
                }
            }
            if (sawText && (sawInt || sawReal)) {
                col.kind = ColumnKind::Mixed;
            } else if (sawReal) {
                col.kind = ColumnKind::Real;
            } else if (sawInt) {
                col.kind = ColumnKind::Integer;
            } else {
                col.kind = ColumnKind::Categorical;
            }
        }

        col.cells.reserve(raw[c].size());
        for (std::size_t r = 0; r < raw[c].size(); ++r) {
            if (!present[c][r]) {
                col.cells.emplace_back();
            } else {
                col.cells.push_back(makeCellAs(raw[c][r], col.kind));
            }
        }
        columns.push_back(std::move(col));
    }

    return Table(tableName, std::move(columns));
}

Table loadCsv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::string name = path;
    const std::size_t slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    return parseCsv(in, name, options);
}

namespace {

std::string escapeField(const std::string& s) {
    const bool needsQuotes =
        s.find_first_of(",\"\r\n") != std::string::npos || (!s.empty() && (s.front() == ' ' || s.back() == ' '));
    if (!needsQuotes) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace

void writeCsv(const Table& table, std::ostream& out) {
    for (std::size_t c = 0; c < table.columnCount(); ++c) {
        if (c) out << ',';
        out << escapeField(table.column(c).name);
    }
    out << '\n';
    for (std::size_t r = 0; r < table.rowCount(); ++r) {
        for (std::size_t c = 0; c < table.columnCount(); ++c) {
            if (c) out << ',';
            out << escapeField(cellToString(table.column(c).cells[r]));
        }
        out << '\n';
    }
}

void saveCsv(const Table& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    writeCsv(table, out);
    if (!out) throw DataError("write failed: " + path);
}

}  // namespace ofsulr
