#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "kumpul/core/json.hpp"
#include "kumpul/core/record.hpp"

namespace kumpul {

/// Common-schema JSON: snake_case field names in schema order, RFC 3339
/// timestamps, absent optionals omitted.
Json to_json(const Record& r);
/// Throws Error(validation) naming the offending field.
Record record_from_json(const Json& j);

Json to_json(const Dataset& d);
Dataset dataset_from_json(const Json& j);

/// One compact JSON object per line.
void write_jsonl(std::ostream& out, const std::vector<Record>& records);

/// Header row in schema order; location split into location.lat and
/// location.lon; extras flattened to one extras.<key> column per key seen
/// in the batch (sorted).
std::vector<std::string> csv_header(const std::vector<Record>& records);
void write_csv(std::ostream& out, const std::vector<Record>& records);

} // namespace kumpul
