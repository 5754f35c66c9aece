#include "ofsulr/table.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include "ofsulr/error.hpp"

namespace ofsulr {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

// Days since 1970-01-01 for a proleptic Gregorian date (era decomposition).
std::int64_t daysFromCivil(int year, int month, int day) {
    year -= month <= 2;
    const std::int64_t era = (year >= 0 ? year : year - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(year - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(month + (month > 2 ? -3 : 9)) + 2u) / 5u + static_cast<unsigned>(day) - 1u;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool isLeapYear(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int daysInMonth(int year, int month) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && isLeapYear(year)) return 29;
    return lengths[month - 1];
}

bool parseFixedInt(const std::string& s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < len; ++i) {
        const char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

std::string trimmed(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parseDoubleStrict(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

std::string columnKindName(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::Integer: return "integer";
        case ColumnKind::Real: return "real";
        case ColumnKind::Text: return "text";
        case ColumnKind::Categorical: return "categorical";
        case ColumnKind::Mixed: return "mixed";
        case ColumnKind::Timestamp: return "timestamp";
    }
    return "unknown";
}

ColumnKind columnKindFromName(const std::string& name) {
    if (name == "integer") return ColumnKind::Integer;
    if (name == "real") return ColumnKind::Real;
    if (name == "text") return ColumnKind::Text;
    if (name == "categorical") return ColumnKind::Categorical;
    if (name == "mixed") return ColumnKind::Mixed;
    if (name == "timestamp") return ColumnKind::Timestamp;
    throw ConfigError("unknown column kind: " + name);
}

bool cellIsNumeric(const Cell& c) {
    return std::holds_alternative<std::int64_t>(c) || std::holds_alternative<double>(c);
}

double cellAsDouble(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&c)) return *d;
    throw DataError("cell is not numeric");
}

std::string cellToString(const Cell& c) {
    if (isMissing(c)) return "";
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&c)) {
        std::array<char, 48> buf{};
        auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), *d);
        std::string s(buf.data(), ptr);
        // Keep a reloadable real form so kind inference round-trips.
        if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
            s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
            s += ".0";
        }
        return s;
    }
    return std::get<std::string>(c);
}

Table::Table(std::string name, std::vector<Column> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {
    rowCount_ = columns_.empty() ? 0 : columns_.front().cells.size();
    std::set<std::string> seen;
    for (const auto& col : columns_) {
        if (col.cells.size() != rowCount_) {
            throw DataError("column '" + col.name + "' has " + std::to_string(col.cells.size()) +
                            " cells, expected " + std::to_string(rowCount_));
        }
        if (!seen.insert(col.name).second) {
            throw DataError("duplicate column name: " + col.name);
        }
    }
}

int Table::findColumn(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

const Column& Table::columnByName(const std::string& name) const {
    const int idx = findColumn(name);
    if (idx < 0) throw DataError("unknown column: " + name);
    return columns_[static_cast<std::size_t>(idx)];
}

Table Table::slice(std::size_t begin, std::size_t end) const {
    end = std::min(end, rowCount_);
    begin = std::min(begin, end);
    std::vector<Column> cols;
    cols.reserve(columns_.size());
    for (const auto& col : columns_) {
        Column out{col.name, col.kind, {}};
        out.cells.assign(col.cells.begin() + static_cast<std::ptrdiff_t>(begin),
                         col.cells.begin() + static_cast<std::ptrdiff_t>(end));
        cols.push_back(std::move(out));
    }
    return Table(name_, std::move(cols));
}

bool operator==(const Table& a, const Table& b) {
    if (a.rowCount_ != b.rowCount_ || a.columns_.size() != b.columns_.size()) return false;
    for (std::size_t i = 0; i < a.columns_.size(); ++i) {
        const auto& ca = a.columns_[i];
        const auto& cb = b.columns_[i];
        if (ca.name != cb.name || ca.kind != cb.kind || ca.cells != cb.cells) return false;
    }
    return true;
}

std::vector<ColumnProfile> profile(const Table& table) {
    std::vector<ColumnProfile> out;
    out.reserve(table.columnCount());
    for (const auto& col : table.columns()) {
        ColumnProfile p;
        p.name = col.name;
        p.kind = col.kind;
        for (const auto& cell : col.cells) {
            if (isMissing(cell)) {
                ++p.nullCount;
            } else {
                ++p.notNullCount;
            }
        }
        p.validPct = table.rowCount() == 0
                         ? 100.0
                         : 100.0 * static_cast<double>(p.notNullCount) / static_cast<double>(table.rowCount());
        out.push_back(std::move(p));
    }
    return out;
}

Table dropColumns(const Table& table, const std::vector<std::string>& names) {
    std::set<std::string> toDrop;
    for (const auto& name : names) {
        if (table.findColumn(name) < 0) throw DataError("unknown column: " + name);
        toDrop.insert(name);
    }
    std::vector<Column> kept;
    for (const auto& col : table.columns()) {
        if (!toDrop.count(col.name)) kept.push_back(col);
    }
    return Table(table.name(), std::move(kept));
}

Table dropNullRows(const Table& table, const std::optional<std::vector<std::string>>& subset) {
    std::vector<std::size_t> checkCols;
    if (subset) {
        for (const auto& name : *subset) {
            const int idx = table.findColumn(name);
            if (idx < 0) throw DataError("unknown column: " + name);
            checkCols.push_back(static_cast<std::size_t>(idx));
        }
    } else {
        for (std::size_t i = 0; i < table.columnCount(); ++i) checkCols.push_back(i);
    }

    std::vector<std::size_t> keepRows;
    keepRows.reserve(table.rowCount());
    for (std::size_t r = 0; r < table.rowCount(); ++r) {
        bool anyMissing = false;
        for (std::size_t c : checkCols) {
            if (isMissing(table.column(c).cells[r])) {
                anyMissing = true;
                break;
            }
        }
        if (!anyMissing) keepRows.push_back(r);
    }

    std::vector<Column> cols;
    cols.reserve(table.columnCount());
    for (const auto& col : table.columns()) {
        Column out{col.name, col.kind, {}};
        out.cells.reserve(keepRows.size());
        for (std::size_t r : keepRows) out.cells.push_back(col.cells[r]);
        cols.push_back(std::move(out));
    }
    return Table(table.name(), std::move(cols));
}

Table dropHighNullColumns(const Table& table, double minValidPct) {
    std::vector<std::string> toDrop;
    for (const auto& p : profile(table)) {
        if (p.validPct < minValidPct) toDrop.push_back(p.name);
    }
    return dropColumns(table, toDrop);
}

namespace {

// Accepts "(lat, lon)" and WKT "POINT (lon lat)".
bool parseGeolocation(const std::string& raw, double& lat, double& lon) {
    const std::string s = trimmed(raw);
    if (s.empty()) return false;
    if (s.front() == '(' && s.back() == ')') {
        const std::string inner = s.substr(1, s.size() - 2);
        const std::size_t comma = inner.find(',');
        if (comma == std::string::npos) return false;
        return parseDoubleStrict(trimmed(inner.substr(0, comma)), lat) &&
               parseDoubleStrict(trimmed(inner.substr(comma + 1)), lon);
    }
    std::string upper = s;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper.rfind("POINT", 0) == 0) {
        const std::size_t open = s.find('(');
        const std::size_t close = s.rfind(')');
        if (open == std::string::npos || close == std::string::npos || close <= open) return false;
        std::istringstream iss(s.substr(open + 1, close - open - 1));
        std::string a, b;
        if (!(iss >> a >> b)) return false;
        std::string rest;
        if (iss >> rest) return false;
        return parseDoubleStrict(a, lon) && parseDoubleStrict(b, lat);
    }
    return false;
}

}  // namespace

Table decomposeGeolocation(const Table& table, const std::string& columnName) {
    const int idx = table.findColumn(columnName);
    if (idx < 0) throw DataError("unknown column: " + columnName);
    const Column& src = table.column(static_cast<std::size_t>(idx));

    Column latCol{"Geo_lat", ColumnKind::Real, {}};
    Column lonCol{"Geo_lon", ColumnKind::Real, {}};
    latCol.cells.reserve(table.rowCount());
    lonCol.cells.reserve(table.rowCount());
    for (const auto& cell : src.cells) {
        double lat = 0.0;
        double lon = 0.0;
        if (!isMissing(cell) && std::holds_alternative<std::string>(cell) &&
            parseGeolocation(std::get<std::string>(cell), lat, lon)) {
            latCol.cells.emplace_back(lat);
            lonCol.cells.emplace_back(lon);
        } else {
            latCol.cells.emplace_back();
            lonCol.cells.emplace_back();
        }
    }

    std::vector<Column> cols;
    cols.reserve(table.columnCount() + 1);
    for (std::size_t i = 0; i < table.columnCount(); ++i) {
        if (static_cast<int>(i) == idx) {
            cols.push_back(std::move(latCol));
            cols.push_back(std::move(lonCol));
        } else {
            cols.push_back(table.column(i));
        }
    }
    return Table(table.name(), std::move(cols));
}

namespace {

// MM-DD-YYYY; month/day validated against the calendar.
bool parseDate(const std::string& raw, int& year, int& month, int& day) {
    const std::string s = trimmed(raw);
    if (s.size() != 10 || s[2] != '-' || s[5] != '-') return false;
    if (!parseFixedInt(s, 0, 2, month) || !parseFixedInt(s, 3, 2, day) || !parseFixedInt(s, 6, 4, year)) return false;
    if (month < 1 || month > 12) return false;
    if (day < 1 || day > daysInMonth(year, month)) return false;
    return true;
}

// XX:YY, hours 0-23 and minutes 0-59. A single space after the colon is
// tolerated ("XX: YY" appears in the wild).
bool parseTime(const std::string& raw, int& hour, int& minute) {
    std::string s = trimmed(raw);
    const std::size_t colon = s.find(':');
    if (colon == std::string::npos) return false;
    const std::string hs = trimmed(s.substr(0, colon));
    const std::string ms = trimmed(s.substr(colon + 1));
    if (hs.empty() || hs.size() > 2 || ms.empty() || ms.size() > 2) return false;
    if (!parseFixedInt(hs, 0, hs.size(), hour) || !parseFixedInt(ms, 0, ms.size(), minute)) return false;
    return hour >= 0 && hour <= 23 && minute >= 0 && minute <= 59;
}

std::optional<std::string> cellText(const Cell& cell) {
    if (isMissing(cell)) return std::nullopt;
    return cellToString(cell);
}

}  // namespace

Table combineDatetime(const Table& table, const std::string& dateColumn, const std::string& timeColumn) {
    const int dateIdx = table.findColumn(dateColumn);
    const int timeIdx = table.findColumn(timeColumn);
    if (dateIdx < 0) throw DataError("unknown column: " + dateColumn);
    if (timeIdx < 0) throw DataError("unknown column: " + timeColumn);

    const Column& dates = table.column(static_cast<std::size_t>(dateIdx));
    const Column& times = table.column(static_cast<std::size_t>(timeIdx));

    Column ts{"timestamp", ColumnKind::Timestamp, {}};
    ts.cells.reserve(table.rowCount());
    for (std::size_t r = 0; r < table.rowCount(); ++r) {
        const auto d = cellText(dates.cells[r]);
        const auto t = cellText(times.cells[r]);
        int year = 0, month = 0, day = 0, hour = 0, minute = 0;
        if (d && t && parseDate(*d, year, month, day) && parseTime(*t, hour, minute)) {
            const std::int64_t seconds =
                daysFromCivil(year, month, day) * kSecondsPerDay + hour * 3600LL + minute * 60LL;
            ts.cells.emplace_back(seconds);
        } else {
            ts.cells.emplace_back();
        }
    }

    std::vector<Column> cols;
    cols.reserve(table.columnCount() - 1);
    for (std::size_t i = 0; i < table.columnCount(); ++i) {
        if (static_cast<int>(i) == dateIdx) {
            cols.push_back(std::move(ts));
        } else if (static_cast<int>(i) != timeIdx) {
            cols.push_back(table.column(i));
        }
    }
    return Table(table.name(), std::move(cols));
}

}  // namespace ofsulr
