#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "twistab/types.hpp"

namespace twistab::io {

using Json = nlohmann::ordered_json;

/// %.17g; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

/// Serializer with 17-significant-digit floats, two-space indent, `\n` line
/// endings and a trailing newline. Non-finite floats become null.
std::string dump(const Json& j);

Json to_json(const Vec2& v);
Json to_json(const Vec3& v);
Json to_json(const Mat2& m);  // row-major nested arrays
Json to_json(const Mat3& m);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

/// Hex SHA-256 digest.
std::string sha256_hex(const std::string& data);

}  // namespace twistab::io
