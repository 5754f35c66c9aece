#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ofsulr {

enum class ColumnKind {
    Integer,
    Real,
    Text,
    Categorical,
    Mixed,       // at least two of {integer, real, text} among non-missing cells
    Timestamp,   // integer posix seconds
};

std::string columnKindName(ColumnKind kind);
ColumnKind columnKindFromName(const std::string& name);

// A cell is missing (monostate) or holds one parsed value. Mixed columns
// carry per-cell types; homogeneous columns use a single alternative.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

inline bool isMissing(const Cell& c) { return std::holds_alternative<std::monostate>(c); }
bool cellIsNumeric(const Cell& c);
double cellAsDouble(const Cell& c);  // throws DataError on missing/text
std::string cellToString(const Cell& c);

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Text;
    std::vector<Cell> cells;
};

struct ColumnProfile {
    std::string name;
    std::size_t nullCount = 0;
    std::size_t notNullCount = 0;
    ColumnKind kind = ColumnKind::Text;
    double validPct = 100.0;  // 100 * notNull / rows; 100 by convention on empty tables
};

// Immutable typed columnar dataset; the unit of cleaning and profiling.
// Operations return new tables. Invariants: every column has exactly
// rowCount() cells and column names are unique.
class Table {
public:
    Table() = default;
    Table(std::string name, std::vector<Column> columns);

    const std::string& name() const { return name_; }
    std::size_t rowCount() const { return rowCount_; }
    std::size_t columnCount() const { return columns_.size(); }
    const std::vector<Column>& columns() const { return columns_; }
    const Column& column(std::size_t i) const { return columns_[i]; }

    // -1 when absent.
    int findColumn(const std::string& name) const;
    const Column& columnByName(const std::string& name) const;  // throws DataError

    Table slice(std::size_t begin, std::size_t end) const;  // rows [begin, end)

    friend bool operator==(const Table& a, const Table& b);

private:
    std::string name_;
    std::vector<Column> columns_;
    std::size_t rowCount_ = 0;
};

std::vector<ColumnProfile> profile(const Table& table);

Table dropColumns(const Table& table, const std::vector<std::string>& names);

// Removes rows with a missing cell in any subset column (anywhere when the
// subset is absent). Survivor order is preserved.
Table dropNullRows(const Table& table, const std::optional<std::vector<std::string>>& subset = std::nullopt);

// Drops columns whose valid percentage is below the threshold.
Table dropHighNullColumns(const Table& table, double minValidPct);

// Replaces a "(lat, lon)" / "POINT (lon lat)" text column with two real
// columns Geo_lat and Geo_lon at the same position. Unparseable cells become
// missing in both.
Table decomposeGeolocation(const Table& table, const std::string& columnName);

// Fuses MM-DD-YYYY and XX:YY columns into a posix-seconds column named
// "timestamp" (UTC) at the date column's position; both inputs are dropped.
// Unparseable cells become missing.
Table combineDatetime(const Table& table, const std::string& dateColumn, const std::string& timeColumn);

}  // namespace ofsulr
