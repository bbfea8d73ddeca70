#pragma once

// CSV and JSON serialization of sweep records. Column order and names are
// fixed; reals use the shortest decimal that reads back to the same double.

#include "qmtbdd/analysis.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qmtbdd {

inline constexpr std::string_view kCsvHeader =
    "family,n,delta,bits,seed,max_error,worst_index,final_nodes,peak_nodes,wall_ms,status";

class RecordError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal ("nan", "inf" for non-finite values).
std::string format_real(double x);

/// Status with commas and line breaks replaced so it fits one CSV field.
std::string sanitize_status(std::string_view status);

std::string to_csv_row(const SweepRecord& r);
void write_csv(std::ostream& out, const std::vector<SweepRecord>& records);
/// Inverse of write_csv. Throws RecordError on a wrong header or bad row.
std::vector<SweepRecord> read_csv(std::istream& in);

/// JSON array of objects keyed by the CSV column names.
std::string to_json(const std::vector<SweepRecord>& records);
std::vector<SweepRecord> from_json(std::string_view text);

} // namespace qmtbdd
