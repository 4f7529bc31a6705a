#pragma once

#include <string_view>

#include "causalog/ast.hpp"

namespace causalog {

/// Parses a `.foc` file: `vocab { ... }` followed by an optional `theory { ... }`.
/// Throws ParseError (syntax, with line/column) or ValidationError.
Theory parse_theory(std::string_view source);

/// Parses a single closed FO sentence over `voc`, e.g. for command-line queries and tests.
Formula parse_formula(std::string_view source, const Vocabulary& voc);

/// Parses a single closed CEE over `voc`.
Cee parse_cee(std::string_view source, const Vocabulary& voc);

}  // namespace causalog
