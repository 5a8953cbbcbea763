#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mrct::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields, doubled quotes, LF or CRLF endings. Blank
/// lines are skipped. Throws mrct::Error on an unterminated quote.
std::vector<Row> parse(std::string_view text);

/// Quotes the field only when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

std::string join(const Row& row);

}  // namespace mrct::csv
