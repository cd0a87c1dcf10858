#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "equisplit/matrix.hpp"
#include "equisplit/subspace.hpp"

namespace equisplit {

/// {"field": "Q"|"F7", "rows": r, "cols": c, "entries": ["1/2", ...]}
/// Entries are row-major decimal strings; rationals as "p/q" in lowest terms.
nlohmann::json to_json(const Matrix& m);
/// Throws ParseError on malformed input, including non-canonical rationals.
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Subspace& s);

/// 64-bit FNV-1a over a string, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

}  // namespace equisplit
