#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ensplace/matrix.hpp"

namespace ensplace {

using Json = nlohmann::ordered_json;

/// %.17g; NaN and infinities are not representable and print as "null".
std::string format_double(double v);

/// Pretty printer with two-space indent and %.17g floats. Output ends with
/// a newline and is byte-stable for a given tree.
void write_json(const Json& j, std::ostream& os);
std::string dump_json(const Json& j);
void write_json_file(const Json& j, const std::filesystem::path& path);

/// {"re": ..., "im": ...}; non-finite parts become null.
Json complex_json(cplx z);

/// A double, or null when not finite.
Json number_or_null(double v);

}  // namespace ensplace
