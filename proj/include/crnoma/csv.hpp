#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crnoma::csv {

/// Quotes a field per RFC 4180 when it contains a comma, quote or line break.
std::string escape(const std::string& field);

/// Writes one CRLF-terminated record.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Six significant digits, decimal dot, independent of the global locale.
std::string format_sig6(double value);

/// Full round-trip precision (17 significant digits).
std::string format_exact(double value);

/// Splits one record; handles quoted fields. Line terminators must already be stripped.
std::vector<std::string> parse_row(const std::string& line);

}  // namespace crnoma::csv
