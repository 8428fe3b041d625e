#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace qpf {

/// Shortest decimal text that round-trips to the same double ("nan"/"inf" for
/// non-finite values). Locale independent.
std::string format_double(double value);

/// Parses a full token as a double (leading '+' allowed). Empty on any junk.
std::optional<double> parse_double(std::string_view token);

std::string_view trim(std::string_view s);

} // namespace qpf
