#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ofsulr/table.hpp"

namespace ofsulr {

struct CsvOptions {
    // Tokens treated as missing, compared case-insensitively. Empty string
    // is always missing.
    std::vector<std::string> missingSentinels = {"", "na", "nan"};
    // Forces a kind per column; cells that fail to parse under a forced
    // numeric kind become missing.
    std::map<std::string, ColumnKind> kindHints;
};

// RFC-4180 CSV with a header row. Ragged rows are an error naming the
// 1-based data row index.
Table loadCsv(const std::string& path, const CsvOptions& options = {});
Table parseCsv(std::istream& in, const std::string& tableName, const CsvOptions& options = {});

void saveCsv(const Table& table, const std::string& path);
void writeCsv(const Table& table, std::ostream& out);

}  // namespace ofsulr
