#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace kumpul::csv {

/// RFC 4180 field quoting: quotes fields containing comma, quote, CR or LF.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Reads one logical row (quoted fields may span lines). Returns nullopt at
/// end of input. Throws kumpul::Error(validation) on an unterminated quote.
std::optional<std::vector<std::string>> read_row(std::istream& in);

} // namespace kumpul::csv
