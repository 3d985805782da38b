#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace chaos {

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

/// "YYYY.MM.DD HH:MM", the statement time layout.
std::string format_statement_time(Timestamp t);

/// Inverse of format_statement_time. Throws std::invalid_argument.
Timestamp parse_statement_time(std::string_view text);

/// Whole days since the epoch (floor), used for swap accrual.
std::int64_t day_index(Timestamp t);

}  // namespace chaos
