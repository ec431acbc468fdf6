#pragma once

#include <stdexcept>
#include <string>

#include "pipecleaner/minic/ast.hpp"

namespace pipecleaner::minic {

enum class ResolveErrorKind { Unbound, Duplicate, BadArity, BadFormat, TypeError, NoMain };

class ResolveError : public std::runtime_error {
public:
    ResolveError(ResolveErrorKind kind, SourcePos pos, const std::string& what)
        : std::runtime_error(to_string(pos) + ": " + what), kind_(kind), pos_(std::move(pos)) {}
    ResolveErrorKind kind() const { return kind_; }
    const SourcePos& pos() const { return pos_; }

private:
    ResolveErrorKind kind_;
    SourcePos pos_;
};

// Binds identifiers, assigns storage, types every expression and checks builtin
// calls. Resolving an already checked program recomputes identical annotations.
Program& resolve(Program& program);

// tokenize + parse + resolve.
Program load_program(std::string_view source, const std::string& filename);
Program load_program_file(const std::string& path);

} // namespace pipecleaner::minic
