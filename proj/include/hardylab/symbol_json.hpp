#pragma once

#include <string>

#include "json.hpp"
#include "hardylab/symbol.hpp"

namespace hardylab {

using json = nlohmann::json;

/// [re, im]; a bare number is accepted on input.
json complex_to_json(cplx c);
cplx complex_from_json(const json& j);

json symbol_to_json(const SymbolSpec& spec);
/// Throws std::invalid_argument on schema violations, naming the offending
/// field.
SymbolSpec symbol_from_json(const json& j);

/// Named shorthands: z, z2z (alias z^2+z), unit_singular, z+1, z+2, 2+z^2,
/// z/2, 2z, z/4, z^2. Returns false when `name` is not a shorthand.
bool symbol_from_shorthand(const std::string& name, SymbolSpec& out);

/// Accepts a shorthand, inline JSON, or a path to a JSON file.
SymbolSpec parse_symbol_argument(const std::string& arg);

inline constexpr const char* kSymbolSchemaHint =
    R"({"tag": "polynomial"|"moebius"|"unit_singular"|"scale"|"shift"|"compose"|"raw", ...}; )"
    R"(complex numbers as [re, im]; shorthands: z, z2z, unit_singular, z+1, z+2, 2+z^2, z/2, 2z, z/4, z^2)";

}  // namespace hardylab
