#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "clusrank/sample.hpp"

namespace clusrank {

/// Comma-separated text with a header row. Fields may be double-quoted;
/// a doubled quote inside a quoted field is a literal quote.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of `name` in the header; throws clusrank::Error if absent.
    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

struct ColumnMap {
    std::string value;
    std::string cluster;
    std::optional<std::string> group;
    std::optional<std::string> stratum;
};

/// Builds records from the named columns. Values must parse completely as
/// numbers; empty or non-numeric cells are rejected with their line number.
std::vector<Record> records_from_csv(const CsvTable& table, const ColumnMap& columns);

/// Writes `x,grp,cid` (unpaired) or `x,cid` (paired), plus `sid` when strata
/// are present, with values printed to round-trip exactly.
void write_sample_csv(std::ostream& out, const ClusteredSample& sample);

} // namespace clusrank
