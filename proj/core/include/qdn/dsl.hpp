#pragma once

// The `.qdn` network description format.
//
//   # comment to end of line
//   source S
//   module beamsplitter BS1 alpha=(0.7071067811865476,0) beta=(0,0.7071067811865476) ...
//   detector D7
//   wire S.out -> BS1.a
//
// Literals: reals are decimals with an optional exponent; complex numbers are
// `(re,im)` or `polar(r,phi)`; `$name` defers a value to a binding map.

#include <filesystem>
#include <string>
#include <string_view>

#include "qdn/errors.hpp"
#include "qdn/network.hpp"

namespace qdn::dsl {

/// Parses a document. Every error carries a 1-based line and column.
NetworkGraph parse(std::string_view text, const std::string& file_name = "<input>");

/// Reads and parses a file; unreadable files raise IoError.
NetworkGraph parse_file(const std::filesystem::path& path);

/// Canonical document: sources, modules, detectors (each by name), then wires.
std::string serialize(const NetworkGraph& g);

/// Parses one literal (`$name` included).
ParamValue parse_literal(std::string_view token, const SourceLocation& where = {});

/// Canonical spelling of a literal; doubles use the shortest round-trip form.
std::string format_literal(const ParamValue& v);

/// Parses `name=literal`, as used by command-line bindings.
std::pair<std::string, ParamValue> parse_binding(std::string_view text);

}  // namespace qdn::dsl
