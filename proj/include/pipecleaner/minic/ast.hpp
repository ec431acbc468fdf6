#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pipecleaner/source_pos.hpp"

namespace pipecleaner::minic {

enum class BaseType : std::uint8_t { Int, Char };

// Scalar type: `int`, `char`, or a pointer chain over one of them.
struct Type {
    BaseType base = BaseType::Int;
    int pointer_depth = 0;

    bool is_pointer() const { return pointer_depth > 0; }
    // Width in bytes of a value of this type held in memory.
    std::uint32_t size() const { return is_pointer() || base == BaseType::Int ? 8 : 1; }
    Type pointee() const { return {base, pointer_depth - 1}; }
    Type pointer_to() const { return {base, pointer_depth + 1}; }

    bool operator==(const Type&) const = default;
};

std::string to_string(const Type& type);

enum class UnaryOp : std::uint8_t { Neg, Not, BitNot };

enum class BinaryOp : std::uint8_t {
    Add, Sub, Mul, Div, Mod,
    Eq, Ne, Lt, Le, Gt, Ge,
    LogicalAnd, LogicalOr,
    BitAnd, BitOr, BitXor, Shl, Shr,
};

std::string_view spelling(UnaryOp op);
std::string_view spelling(BinaryOp op);
bool is_comparison(BinaryOp op);

enum class Builtin : std::uint8_t { Malloc, Free, Getchar, Printf };

std::string_view spelling(Builtin builtin);

enum class ExprKind : std::uint8_t {
    IntLit,
    CharLit,
    StrLit,
    Ident,
    Unary,
    Binary,
    Cast,
    Call,
    Index,
    Deref,
    AddrOf,
    Assign,
};

enum class StorageScope : std::uint8_t { Global, Local };

// Where a resolved identifier lives. Filled in by resolve().
struct VarBinding {
    StorageScope scope = StorageScope::Local;
    std::uint32_t offset = 0;  // from the globals base or the frame base
    Type type;
    std::optional<std::uint32_t> array_length;
};

struct Expr {
    ExprKind kind = ExprKind::IntLit;
    SourcePos pos;

    std::int64_t int_value = 0;  // IntLit, CharLit
    std::string text;            // Ident name, Call callee, StrLit contents
    UnaryOp unary_op = UnaryOp::Neg;
    BinaryOp binary_op = BinaryOp::Add;
    Type cast_type;              // Cast target
    std::vector<std::unique_ptr<Expr>> operands;

    // Annotations written by resolve().
    Type type;
    std::optional<VarBinding> binding;       // Ident
    std::optional<Builtin> builtin;          // Call to a builtin
    std::optional<std::uint32_t> function;   // Call to a user function (index)
    std::optional<std::uint32_t> literal;    // StrLit id in the read-only table
};

using ExprPtr = std::unique_ptr<Expr>;

enum class StmtKind : std::uint8_t { Decl, ExprStmt, If, While, Return, Block };

struct Stmt {
    StmtKind kind = StmtKind::Block;
    SourcePos pos;

    // Decl
    Type decl_type;
    std::string name;
    std::optional<std::uint32_t> array_length;
    ExprPtr init;

    // ExprStmt / If / While condition / Return value (optional)
    ExprPtr expr;
    std::vector<std::unique_ptr<Stmt>> body;  // Block children, or then/else branches for If, loop body for While

    // Annotation: frame slot of a local declaration.
    std::optional<VarBinding> binding;
};

using StmtPtr = std::unique_ptr<Stmt>;

struct Param {
    Type type;
    std::string name;
    SourcePos pos;
};

struct FunctionDef {
    Type return_type;
    std::string name;
    std::vector<Param> params;
    StmtPtr body;
    SourcePos pos;

    // Annotations written by resolve().
    std::vector<VarBinding> param_bindings;
    std::uint32_t frame_size = 0;
};

struct GlobalDef {
    Type type;
    std::string name;
    std::optional<std::uint32_t> array_length;
    ExprPtr init;
    SourcePos pos;

    std::optional<VarBinding> binding;
};

struct Program {
    std::string file;
    std::vector<GlobalDef> globals;
    std::vector<FunctionDef> functions;

    // Annotations written by resolve().
    std::vector<std::string> string_literals;
    std::uint32_t globals_size = 0;
    std::optional<std::uint32_t> main_index;
    bool checked = false;
};

// Structural equality that ignores source positions and resolver annotations.
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const Stmt& a, const Stmt& b);
bool structurally_equal(const Program& a, const Program& b);

} // namespace pipecleaner::minic
