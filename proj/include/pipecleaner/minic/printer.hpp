#pragma once

#include <string>

#include "pipecleaner/minic/ast.hpp"

namespace pipecleaner::minic {

// Renders MiniC source that parses back to a structurally equal AST.
// Every compound expression is fully parenthesized.
std::string print(const Program& program);
std::string print(const Expr& expr);

std::string escape_literal(std::string_view bytes, char quote);

} // namespace pipecleaner::minic
