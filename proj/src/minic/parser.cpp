#include "pipecleaner/minic/parser.hpp"

#include <initializer_list>

namespace pipecleaner::minic {

namespace {

std::string join_expected(const std::vector<std::string>& expected)
{
    std::string out;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i > 0)
            out += i + 1 == expected.size() ? " or " : ", ";
        out += expected[i];
    }
    return out;
}

} // namespace

ParseError::ParseError(SourcePos pos, std::vector<std::string> expected, const std::string& found)
    : std::runtime_error(to_string(pos) + ": expected " + join_expected(expected) + ", found " + found)
    , pos_(std::move(pos))
    , expected_(std::move(expected))
{
}

namespace {

// Binary operator precedence; higher binds tighter. Assignment is handled separately.
int precedence(TokenKind kind)
{
    switch (kind) {
    case TokenKind::PipePipe: return 1;
    case TokenKind::AmpAmp: return 2;
    case TokenKind::Pipe: return 3;
    case TokenKind::Caret: return 4;
    case TokenKind::Amp: return 5;
    case TokenKind::Eq:
    case TokenKind::Ne: return 6;
    case TokenKind::Lt:
    case TokenKind::Le:
    case TokenKind::Gt:
    case TokenKind::Ge: return 7;
    case TokenKind::Shl:
    case TokenKind::Shr: return 8;
    case TokenKind::Plus:
    case TokenKind::Minus: return 9;
    case TokenKind::Star:
    case TokenKind::Slash:
    case TokenKind::Percent: return 10;
    default: return 0;
    }
}

BinaryOp binary_op(TokenKind kind)
{
    switch (kind) {
    case TokenKind::PipePipe: return BinaryOp::LogicalOr;
    case TokenKind::AmpAmp: return BinaryOp::LogicalAnd;
    case TokenKind::Pipe: return BinaryOp::BitOr;
    case TokenKind::Caret: return BinaryOp::BitXor;
    case TokenKind::Amp: return BinaryOp::BitAnd;
    case TokenKind::Eq: return BinaryOp::Eq;
    case TokenKind::Ne: return BinaryOp::Ne;
    case TokenKind::Lt: return BinaryOp::Lt;
    case TokenKind::Le: return BinaryOp::Le;
    case TokenKind::Gt: return BinaryOp::Gt;
    case TokenKind::Ge: return BinaryOp::Ge;
    case TokenKind::Shl: return BinaryOp::Shl;
    case TokenKind::Shr: return BinaryOp::Shr;
    case TokenKind::Plus: return BinaryOp::Add;
    case TokenKind::Minus: return BinaryOp::Sub;
    case TokenKind::Star: return BinaryOp::Mul;
    case TokenKind::Slash: return BinaryOp::Div;
    default: return BinaryOp::Mod;
    }
}

class Parser {
public:
    explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

    Program program()
    {
        Program prog;
        prog.file = peek().pos.file;
        while (!at(TokenKind::End)) {
            SourcePos pos = peek().pos;
            Type type = parse_type();
            std::string name = expect(TokenKind::Ident).text;
            if (at(TokenKind::LParen)) {
                prog.functions.push_back(function_rest(type, std::move(name), pos));
            } else {
                GlobalDef global;
                global.type = type;
                global.name = std::move(name);
                global.pos = pos;
                global.array_length = array_suffix();
                if (accept(TokenKind::Assign))
                    global.init = expression();
                expect(TokenKind::Semi);
                prog.globals.push_back(std::move(global));
            }
        }
        return prog;
    }

private:
    const Token& peek(std::size_t ahead = 0) const
    {
        std::size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    bool at(TokenKind kind) const { return peek().kind == kind; }
    const Token& advance()
    {
        const Token& t = peek();
        if (pos_ < toks_.size() - 1)
            ++pos_;
        return t;
    }
    bool accept(TokenKind kind)
    {
        if (!at(kind))
            return false;
        advance();
        return true;
    }

    [[noreturn]] void fail(std::initializer_list<std::string_view> expected) const
    {
        std::vector<std::string> names;
        for (auto e : expected)
            names.emplace_back(e);
        const Token& t = peek();
        std::string found(describe(t.kind));
        if (t.kind == TokenKind::Ident)
            found += " '" + t.text + "'";
        throw ParseError(t.pos, std::move(names), found);
    }

    const Token& expect(TokenKind kind)
    {
        if (!at(kind))
            fail({describe(kind)});
        return advance();
    }

    bool at_type() const { return at(TokenKind::KwInt) || at(TokenKind::KwChar); }

    Type parse_type()
    {
        Type type;
        if (accept(TokenKind::KwInt))
            type.base = BaseType::Int;
        else if (accept(TokenKind::KwChar))
            type.base = BaseType::Char;
        else
            fail({describe(TokenKind::KwInt), describe(TokenKind::KwChar)});
        while (accept(TokenKind::Star))
            ++type.pointer_depth;
        return type;
    }

    std::optional<std::uint32_t> array_suffix()
    {
        if (!accept(TokenKind::LBracket))
            return std::nullopt;
        const Token& len = expect(TokenKind::IntLit);
        if (len.value <= 0 || len.value > (1 << 20))
            throw ParseError(len.pos, {"array length in [1, 1048576]"}, std::to_string(len.value));
        expect(TokenKind::RBracket);
        return static_cast<std::uint32_t>(len.value);
    }

    FunctionDef function_rest(Type type, std::string name, SourcePos pos)
    {
        FunctionDef fn;
        fn.return_type = type;
        fn.name = std::move(name);
        fn.pos = std::move(pos);
        expect(TokenKind::LParen);
        if (!at(TokenKind::RParen)) {
            do {
                Param p;
                p.pos = peek().pos;
                p.type = parse_type();
                p.name = expect(TokenKind::Ident).text;
                fn.params.push_back(std::move(p));
            } while (accept(TokenKind::Comma));
        }
        expect(TokenKind::RParen);
        fn.body = block();
        return fn;
    }

    StmtPtr block()
    {
        auto s = std::make_unique<Stmt>();
        s->kind = StmtKind::Block;
        s->pos = expect(TokenKind::LBrace).pos;
        while (!at(TokenKind::RBrace)) {
            if (at(TokenKind::End))
                fail({describe(TokenKind::RBrace)});
            s->body.push_back(statement());
        }
        advance();
        return s;
    }

    StmtPtr statement()
    {
        auto s = std::make_unique<Stmt>();
        s->pos = peek().pos;
        if (at_type()) {
            s->kind = StmtKind::Decl;
            s->decl_type = parse_type();
            s->name = expect(TokenKind::Ident).text;
            s->array_length = array_suffix();
            if (accept(TokenKind::Assign))
                s->init = expression();
            expect(TokenKind::Semi);
        } else if (accept(TokenKind::KwIf)) {
            s->kind = StmtKind::If;
            expect(TokenKind::LParen);
            s->expr = expression();
            expect(TokenKind::RParen);
            s->body.push_back(statement());
            if (accept(TokenKind::KwElse))
                s->body.push_back(statement());
        } else if (accept(TokenKind::KwWhile)) {
            s->kind = StmtKind::While;
            expect(TokenKind::LParen);
            s->expr = expression();
            expect(TokenKind::RParen);
            s->body.push_back(statement());
        } else if (accept(TokenKind::KwReturn)) {
            s->kind = StmtKind::Return;
            if (!at(TokenKind::Semi))
                s->expr = expression();
            expect(TokenKind::Semi);
        } else if (at(TokenKind::LBrace)) {
            return block();
        } else {
            s->kind = StmtKind::ExprStmt;
            s->expr = expression();
            expect(TokenKind::Semi);
        }
        return s;
    }

    static ExprPtr node(ExprKind kind, SourcePos pos)
    {
        auto e = std::make_unique<Expr>();
        e->kind = kind;
        e->pos = std::move(pos);
        return e;
    }

    ExprPtr expression()
    {
        ExprPtr lhs = binary(1);
        if (at(TokenKind::Assign)) {
            SourcePos pos = advance().pos;
            auto e = node(ExprKind::Assign, pos);
            e->operands.push_back(std::move(lhs));
            e->operands.push_back(expression());
            return e;
        }
        return lhs;
    }

    ExprPtr binary(int min_prec)
    {
        ExprPtr lhs = unary();
        for (;;) {
            int prec = precedence(peek().kind);
            if (prec == 0 || prec < min_prec)
                return lhs;
            const Token& op = advance();
            ExprPtr rhs = binary(prec + 1);
            auto e = node(ExprKind::Binary, op.pos);
            e->binary_op = binary_op(op.kind);
            e->operands.push_back(std::move(lhs));
            e->operands.push_back(std::move(rhs));
            lhs = std::move(e);
        }
    }

    ExprPtr unary()
    {
        SourcePos pos = peek().pos;
        auto prefix = [&](ExprKind kind, UnaryOp op = UnaryOp::Neg) {
            advance();
            auto e = node(kind, pos);
            e->unary_op = op;
            e->operands.push_back(unary());
            return e;
        };
        switch (peek().kind) {
        case TokenKind::Minus: return prefix(ExprKind::Unary, UnaryOp::Neg);
        case TokenKind::Bang: return prefix(ExprKind::Unary, UnaryOp::Not);
        case TokenKind::Tilde: return prefix(ExprKind::Unary, UnaryOp::BitNot);
        case TokenKind::Star: return prefix(ExprKind::Deref);
        case TokenKind::Amp: return prefix(ExprKind::AddrOf);
        case TokenKind::LParen:
            if (peek(1).kind == TokenKind::KwInt || peek(1).kind == TokenKind::KwChar) {
                advance();
                auto e = node(ExprKind::Cast, pos);
                e->cast_type = parse_type();
                expect(TokenKind::RParen);
                e->operands.push_back(unary());
                return e;
            }
            break;
        default:
            break;
        }
        return postfix();
    }

    ExprPtr postfix()
    {
        ExprPtr e = primary();
        while (at(TokenKind::LBracket)) {
            SourcePos pos = advance().pos;
            auto idx = node(ExprKind::Index, pos);
            idx->operands.push_back(std::move(e));
            idx->operands.push_back(expression());
            expect(TokenKind::RBracket);
            e = std::move(idx);
        }
        return e;
    }

    ExprPtr primary()
    {
        const Token& t = peek();
        switch (t.kind) {
        case TokenKind::IntLit: {
            auto e = node(ExprKind::IntLit, t.pos);
            e->int_value = advance().value;
            return e;
        }
        case TokenKind::CharLit: {
            auto e = node(ExprKind::CharLit, t.pos);
            e->int_value = advance().value;
            return e;
        }
        case TokenKind::StringLit: {
            auto e = node(ExprKind::StrLit, t.pos);
            e->text = advance().text;
            return e;
        }
        case TokenKind::Ident: {
            const Token& id = advance();
            if (accept(TokenKind::LParen)) {
                auto call = node(ExprKind::Call, id.pos);
                call->text = id.text;
                if (!at(TokenKind::RParen)) {
                    do {
                        call->operands.push_back(expression());
                    } while (accept(TokenKind::Comma));
                }
                expect(TokenKind::RParen);
                return call;
            }
            auto e = node(ExprKind::Ident, id.pos);
            e->text = id.text;
            return e;
        }
        case TokenKind::LParen: {
            advance();
            ExprPtr inner = expression();
            expect(TokenKind::RParen);
            return inner;
        }
        default:
            fail({"expression"});
        }
    }

    const std::vector<Token>& toks_;
    std::size_t pos_ = 0;
};

} // namespace

Program parse(const std::vector<Token>& tokens)
{
    if (tokens.empty() || tokens.back().kind != TokenKind::End)
        throw ParseError(SourcePos{}, {"token stream terminated by end of input"}, "unterminated stream");
    return Parser(tokens).program();
}

} // namespace pipecleaner::minic
