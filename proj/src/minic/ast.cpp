#include "pipecleaner/minic/ast.hpp"

namespace pipecleaner::minic {

std::string to_string(const Type& type)
{
    std::string out = type.base == BaseType::Int ? "int" : "char";
    out.append(static_cast<std::size_t>(type.pointer_depth), '*');
    return out;
}

std::string_view spelling(UnaryOp op)
{
    switch (op) {
    case UnaryOp::Neg: return "-";
    case UnaryOp::Not: return "!";
    case UnaryOp::BitNot: return "~";
    }
    return "?";
}

std::string_view spelling(BinaryOp op)
{
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::LogicalAnd: return "&&";
    case BinaryOp::LogicalOr: return "||";
    case BinaryOp::BitAnd: return "&";
    case BinaryOp::BitOr: return "|";
    case BinaryOp::BitXor: return "^";
    case BinaryOp::Shl: return "<<";
    case BinaryOp::Shr: return ">>";
    }
    return "?";
}

bool is_comparison(BinaryOp op)
{
    switch (op) {
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge:
        return true;
    default:
        return false;
    }
}

std::string_view spelling(Builtin builtin)
{
    switch (builtin) {
    case Builtin::Malloc: return "malloc";
    case Builtin::Free: return "free";
    case Builtin::Getchar: return "getchar";
    case Builtin::Printf: return "printf";
    }
    return "?";
}

namespace {

template <typename T>
bool all_equal(const std::vector<std::unique_ptr<T>>& a, const std::vector<std::unique_ptr<T>>& b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i] || !b[i]) {
            if (a[i] != b[i])
                return false;
            continue;
        }
        if (!structurally_equal(*a[i], *b[i]))
            return false;
    }
    return true;
}

bool optional_equal(const ExprPtr& a, const ExprPtr& b)
{
    if (!a || !b)
        return !a && !b;
    return structurally_equal(*a, *b);
}

} // namespace

bool structurally_equal(const Expr& a, const Expr& b)
{
    if (a.kind != b.kind)
        return false;
    switch (a.kind) {
    case ExprKind::IntLit:
    case ExprKind::CharLit:
        return a.int_value == b.int_value;
    case ExprKind::StrLit:
    case ExprKind::Ident:
        return a.text == b.text;
    case ExprKind::Unary:
        if (a.unary_op != b.unary_op)
            return false;
        break;
    case ExprKind::Binary:
        if (a.binary_op != b.binary_op)
            return false;
        break;
    case ExprKind::Cast:
        if (a.cast_type != b.cast_type)
            return false;
        break;
    case ExprKind::Call:
        if (a.text != b.text)
            return false;
        break;
    default:
        break;
    }
    return all_equal(a.operands, b.operands);
}

bool structurally_equal(const Stmt& a, const Stmt& b)
{
    if (a.kind != b.kind)
        return false;
    if (a.kind == StmtKind::Decl) {
        if (a.decl_type != b.decl_type || a.name != b.name || a.array_length != b.array_length)
            return false;
        if (!optional_equal(a.init, b.init))
            return false;
    }
    return optional_equal(a.expr, b.expr) && all_equal(a.body, b.body);
}

bool structurally_equal(const Program& a, const Program& b)
{
    if (a.globals.size() != b.globals.size() || a.functions.size() != b.functions.size())
        return false;
    for (std::size_t i = 0; i < a.globals.size(); ++i) {
        const auto& ga = a.globals[i];
        const auto& gb = b.globals[i];
        if (ga.type != gb.type || ga.name != gb.name || ga.array_length != gb.array_length
            || !optional_equal(ga.init, gb.init))
            return false;
    }
    for (std::size_t i = 0; i < a.functions.size(); ++i) {
        const auto& fa = a.functions[i];
        const auto& fb = b.functions[i];
        if (fa.return_type != fb.return_type || fa.name != fb.name
            || fa.params.size() != fb.params.size())
            return false;
        for (std::size_t p = 0; p < fa.params.size(); ++p) {
            if (fa.params[p].type != fb.params[p].type || fa.params[p].name != fb.params[p].name)
                return false;
        }
        if (!structurally_equal(*fa.body, *fb.body))
            return false;
    }
    return true;
}

} // namespace pipecleaner::minic
