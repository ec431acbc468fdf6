#include "pipecleaner/minic/printer.hpp"

#include <cstdio>

namespace pipecleaner::minic {

std::string escape_literal(std::string_view bytes, char quote)
{
    std::string out;
    for (unsigned char c : bytes) {
        switch (c) {
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        case '\\': out += "\\\\"; break;
        default:
            if (c == static_cast<unsigned char>(quote)) {
                out += '\\';
                out += static_cast<char>(c);
            } else if (c < 0x20 || c >= 0x7f) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\x%02x", c);
                out += buf;
            } else {
                out += static_cast<char>(c);
            }
        }
    }
    return out;
}

namespace {

class Printer {
public:
    std::string out;

    void expr(const Expr& e)
    {
        switch (e.kind) {
        case ExprKind::IntLit:
            out += std::to_string(e.int_value);
            break;
        case ExprKind::CharLit:
            out += '\'' + escape_literal(std::string(1, static_cast<char>(e.int_value)), '\'') + '\'';
            break;
        case ExprKind::StrLit:
            out += '"' + escape_literal(e.text, '"') + '"';
            break;
        case ExprKind::Ident:
            out += e.text;
            break;
        case ExprKind::Unary:
            out += '(';
            out += spelling(e.unary_op);
            expr(*e.operands[0]);
            out += ')';
            break;
        case ExprKind::Binary:
            out += '(';
            expr(*e.operands[0]);
            out += ' ';
            out += spelling(e.binary_op);
            out += ' ';
            expr(*e.operands[1]);
            out += ')';
            break;
        case ExprKind::Cast:
            out += "((" + to_string(e.cast_type) + ")";
            expr(*e.operands[0]);
            out += ')';
            break;
        case ExprKind::Call:
            out += e.text + "(";
            for (std::size_t i = 0; i < e.operands.size(); ++i) {
                if (i)
                    out += ", ";
                expr(*e.operands[i]);
            }
            out += ')';
            break;
        case ExprKind::Index:
            out += '(';
            expr(*e.operands[0]);
            out += '[';
            expr(*e.operands[1]);
            out += "])";
            break;
        case ExprKind::Deref:
            out += "(*";
            expr(*e.operands[0]);
            out += ')';
            break;
        case ExprKind::AddrOf:
            out += "(&";
            expr(*e.operands[0]);
            out += ')';
            break;
        case ExprKind::Assign:
            out += '(';
            expr(*e.operands[0]);
            out += " = ";
            expr(*e.operands[1]);
            out += ')';
            break;
        }
    }

    void indent(int depth) { out.append(static_cast<std::size_t>(depth) * 4, ' '); }

    void declaration(const Type& type, const std::string& name,
                     const std::optional<std::uint32_t>& len, const ExprPtr& init)
    {
        out += to_string(type) + " " + name;
        if (len)
            out += "[" + std::to_string(*len) + "]";
        if (init) {
            out += " = ";
            expr(*init);
        }
        out += ";\n";
    }

    void stmt(const Stmt& s, int depth)
    {
        switch (s.kind) {
        case StmtKind::Block:
            indent(depth);
            out += "{\n";
            for (const auto& child : s.body)
                stmt(*child, depth + 1);
            indent(depth);
            out += "}\n";
            break;
        case StmtKind::Decl:
            indent(depth);
            declaration(s.decl_type, s.name, s.array_length, s.init);
            break;
        case StmtKind::ExprStmt:
            indent(depth);
            expr(*s.expr);
            out += ";\n";
            break;
        case StmtKind::If:
            indent(depth);
            out += "if (";
            expr(*s.expr);
            out += ")\n";
            stmt(*s.body[0], depth + 1);
            if (s.body.size() > 1) {
                indent(depth);
                out += "else\n";
                stmt(*s.body[1], depth + 1);
            }
            break;
        case StmtKind::While:
            indent(depth);
            out += "while (";
            expr(*s.expr);
            out += ")\n";
            stmt(*s.body[0], depth + 1);
            break;
        case StmtKind::Return:
            indent(depth);
            out += "return";
            if (s.expr) {
                out += ' ';
                expr(*s.expr);
            }
            out += ";\n";
            break;
        }
    }
};

} // namespace

std::string print(const Expr& expr)
{
    Printer p;
    p.expr(expr);
    return p.out;
}

std::string print(const Program& program)
{
    Printer p;
    for (const auto& g : program.globals)
        p.declaration(g.type, g.name, g.array_length, g.init);
    for (const auto& fn : program.functions) {
        p.out += to_string(fn.return_type) + " " + fn.name + "(";
        for (std::size_t i = 0; i < fn.params.size(); ++i) {
            if (i)
                p.out += ", ";
            p.out += to_string(fn.params[i].type) + " " + fn.params[i].name;
        }
        p.out += ")\n";
        p.stmt(*fn.body, 0);
    }
    return p.out;
}

} // namespace pipecleaner::minic
