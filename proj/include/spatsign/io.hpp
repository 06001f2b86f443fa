#pragma once

#include <iosfwd>
#include <string>

#include "spatsign/data.hpp"

namespace spatsign {

// CSV reader for numeric tables: comma-separated, optional single header row
// (detected by any non-numeric cell in the first row), at least two columns,
// no missing cells. Fully blank lines are ignored. Malformed input throws
// ParseError carrying the 1-based line number.
DataMatrix ingest_csv(std::istream& in);
DataMatrix ingest_csv(const std::string& path);

// Headerless rows with 17 significant digits, so ingest_csv(write_csv(d))
// reproduces d exactly.
void write_csv(const DataMatrix& data, std::ostream& out);

}  // namespace spatsign
