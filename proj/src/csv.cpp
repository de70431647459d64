#include "clusrank/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "clusrank/types.hpp"

namespace clusrank {

namespace {

bool needs_quotes(const std::string& s) {
    return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quoted(const std::string& s) {
    if (!needs_quotes(s)) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

// Reads one logical record; returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field += c;
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            ++line;
            fields.push_back(std::move(field));
            return true;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (in_quotes) {
        throw Error("unterminated quoted field near line " + std::to_string(line));
    }
    if (!any) {
        return false;
    }
    fields.push_back(std::move(field));
    return true;
}

} // namespace

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw Error("unknown column '" + name + "'");
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::size_t line = 1;
    std::vector<std::string> fields;
    if (!read_record(in, fields, line)) {
        throw Error("missing header row");
    }
    if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) {
        fields[0].erase(0, 3);
    }
    table.header = fields;
    while (read_record(in, fields, line)) {
        if (fields.size() == 1 && fields[0].empty()) {
            continue; // blank line
        }
        if (fields.size() != table.header.size()) {
            throw Error("line " + std::to_string(line - 1) + ": expected " + std::to_string(table.header.size()) +
                        " fields, found " + std::to_string(fields.size()));
        }
        table.rows.push_back(fields);
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    return read_csv(in);
}

std::vector<Record> records_from_csv(const CsvTable& table, const ColumnMap& columns) {
    const auto value_col = table.column(columns.value);
    const auto cluster_col = table.column(columns.cluster);
    const std::optional<std::size_t> group_col =
        columns.group ? std::optional<std::size_t>(table.column(*columns.group)) : std::nullopt;
    const std::optional<std::size_t> stratum_col =
        columns.stratum ? std::optional<std::size_t>(table.column(*columns.stratum)) : std::nullopt;

    std::vector<Record> out;
    out.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string& cell = row[value_col];
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(cell.c_str(), &end);
        if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE) {
            throw Error("row " + std::to_string(r + 2) + ": cannot parse value '" + cell + "'");
        }
        Record rec;
        rec.value = v;
        rec.cluster = row[cluster_col];
        if (group_col) {
            rec.group = row[*group_col];
        }
        if (stratum_col) {
            rec.stratum = row[*stratum_col];
        }
        out.push_back(std::move(rec));
    }
    return out;
}

void write_sample_csv(std::ostream& out, const ClusteredSample& sample) {
    out << "x";
    if (!sample.paired()) {
        out << ",grp";
    }
    out << ",cid";
    if (sample.has_strata()) {
        out << ",sid";
    }
    out << '\n';
    char buf[32];
    for (const auto& r : sample.records()) {
        std::snprintf(buf, sizeof buf, "%.17g", r.value);
        out << buf;
        if (r.group) {
            out << ',' << quoted(*r.group);
        }
        out << ',' << quoted(r.cluster);
        if (r.stratum) {
            out << ',' << quoted(*r.stratum);
        }
        out << '\n';
    }
}

} // namespace clusrank
