#pragma once

#include <string>

#include "causalog/ast.hpp"

namespace causalog {

std::string print_term(const Term& t);
std::string print_formula(const Formula& f);
std::string print_cee(const Cee& c);
std::string print_vocabulary(const Vocabulary& v);

/// Canonical concrete syntax; parse_theory(print_theory(t)) == t.
std::string print_theory(const Theory& t);

}  // namespace causalog
