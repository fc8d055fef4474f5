#pragma once

#include <string>

#include "json.hpp"

#include "axon/scheme.hpp"

namespace axon {

inline constexpr int kFormatVersion = 1;

nlohmann::json scheme_to_json(const Scheme& scheme);
// Throws ParseError, VersionMismatch.
Scheme scheme_from_json(const nlohmann::json& doc);

// Stable text form: objects are listed in id order.
std::string save_string(const Scheme& scheme);
Scheme load_string(const std::string& text);

// Throws IoError.
void save(const Scheme& scheme, const std::string& path);
Scheme load(const std::string& path);

nlohmann::json symbol_to_json(const SymbolDef& def);
SymbolDef symbol_from_json(const nlohmann::json& j);

// {"name": ..., "symbols": {name: definition}}. Every symbol must validate.
nlohmann::json library_to_json(const Library& lib);
Library library_from_json(const nlohmann::json& j, const std::string& fallback_name);
Library load_library(const std::string& path);

nlohmann::json projection_to_json(const Projection& p);
Projection projection_from_json(const nlohmann::json& j);

}  // namespace axon
