#include "spatsign/io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "spatsign/errors.hpp"

namespace spatsign {
namespace {

std::string_view trimmed(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

bool parse_cell(std::string_view field, double& value) {
    const std::string_view body = trimmed(field);
    if (body.empty()) return false;
    const char* end = body.data() + body.size();
    const auto [ptr, ec] = std::from_chars(body.data(), end, value);
    return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

DataMatrix ingest_csv(std::istream& in) {
    std::vector<double> values;
    int columns = 0;
    int rows = 0;
    std::int64_t line_number = 0;
    bool saw_first_row = false;
    std::string line;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trimmed(line).empty()) continue;

        const auto fields = split_fields(line);
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t k = 0; k < fields.size(); ++k) {
            if (!parse_cell(fields[k], row[k])) {
                numeric = false;
                break;
            }
        }
        if (!saw_first_row) {
            saw_first_row = true;
            if (!numeric) continue;  // header row
        }
        if (!numeric) {
            throw ParseError("non-numeric or missing cell", line_number);
        }
        if (rows == 0) {
            columns = static_cast<int>(fields.size());
            if (columns < 2) {
                throw ParseError("need at least two columns", line_number);
            }
        } else if (static_cast<int>(fields.size()) != columns) {
            throw ParseError("ragged row: expected " + std::to_string(columns) + " cells, got " +
                                 std::to_string(fields.size()),
                             line_number);
        }
        values.insert(values.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows == 0) throw ParseError("no data rows", line_number);
    return DataMatrix(rows, columns, std::move(values));
}

DataMatrix ingest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path, 0);
    return ingest_csv(in);
}

void write_csv(const DataMatrix& data, std::ostream& out) {
    out << std::setprecision(17);
    for (int i = 0; i < data.n(); ++i) {
        const auto row = data.row(i);
        for (int j = 0; j < data.p(); ++j) {
            if (j > 0) out << ',';
            out << row[static_cast<std::size_t>(j)];
        }
        out << '\n';
    }
}

}  // namespace spatsign
