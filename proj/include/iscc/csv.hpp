// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iscc::csv {

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

/// Splits on commas and trims surrounding whitespace from each field.
std::vector<std::string> split_line(std::string_view line);

/// Full-string numeric parse; std::nullopt on any trailing garbage.
std::optional<double> to_double(std::string_view s);
std::optional<long long> to_integer(std::string_view s);

}  // namespace iscc::csv
