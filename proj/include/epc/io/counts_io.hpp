#pragma once

#include <iosfwd>
#include <string>

#include "epc/counts.hpp"

namespace epc {

/// CSV rows `axis_a,axis_b,counts,duration_s` with a header line; `#` starts a comment.
/// Shared by metric count tables and tomography counts.
void write_counts_csv(std::ostream& os, const BasisCounts& counts);
void write_counts_csv_file(const std::string& path, const BasisCounts& counts);

/// Parse errors carry the 1-based line number.
BasisCounts read_counts_csv(std::istream& is);
BasisCounts read_counts_csv_file(const std::string& path);

} // namespace epc
