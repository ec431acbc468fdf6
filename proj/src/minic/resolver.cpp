#include "pipecleaner/minic/resolver.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "pipecleaner/minic/lexer.hpp"
#include "pipecleaner/minic/parser.hpp"

namespace pipecleaner::minic {

namespace {

constexpr std::uint32_t align8(std::uint32_t n) { return (n + 7u) & ~7u; }

std::optional<Builtin> builtin_named(std::string_view name)
{
    if (name == "malloc")
        return Builtin::Malloc;
    if (name == "free")
        return Builtin::Free;
    if (name == "getchar")
        return Builtin::Getchar;
    if (name == "printf")
        return Builtin::Printf;
    return std::nullopt;
}

const Type kInt{BaseType::Int, 0};
const Type kCharPtr{BaseType::Char, 1};

std::uint32_t storage_size(const Type& type, const std::optional<std::uint32_t>& array_length)
{
    return align8(type.size() * array_length.value_or(1));
}

class Resolver {
public:
    explicit Resolver(Program& prog) : prog_(prog) {}

    void run()
    {
        prog_.string_literals.clear();
        prog_.globals_size = 0;
        prog_.main_index.reset();
        prog_.checked = false;

        std::unordered_map<std::string, SourcePos> top_level;
        auto claim = [&](const std::string& name, const SourcePos& pos) {
            if (builtin_named(name))
                throw ResolveError(ResolveErrorKind::Duplicate, pos,
                                   "'" + name + "' redefines a builtin");
            if (auto [it, fresh] = top_level.emplace(name, pos); !fresh)
                throw ResolveError(ResolveErrorKind::Duplicate, pos,
                                   "duplicate definition of '" + name + "' (first at "
                                       + to_string(it->second) + ")");
        };

        for (std::uint32_t i = 0; i < prog_.functions.size(); ++i) {
            const auto& fn = prog_.functions[i];
            claim(fn.name, fn.pos);
            functions_.emplace(fn.name, i);
        }

        for (auto& global : prog_.globals) {
            claim(global.name, global.pos);
            if (global.init)
                check_global_init(global);
            VarBinding b{StorageScope::Global, prog_.globals_size, global.type, global.array_length};
            prog_.globals_size += storage_size(global.type, global.array_length);
            global.binding = b;
            globals_.emplace(global.name, b);
        }

        for (std::uint32_t i = 0; i < prog_.functions.size(); ++i)
            function(prog_.functions[i]);

        auto main_it = functions_.find("main");
        if (main_it == functions_.end())
            throw ResolveError(ResolveErrorKind::NoMain, SourcePos{prog_.file, 1, 1},
                               "program has no 'main' function");
        const auto& main_fn = prog_.functions[main_it->second];
        if (!main_fn.params.empty())
            throw ResolveError(ResolveErrorKind::NoMain, main_fn.pos,
                               "'main' must take no parameters");
        prog_.main_index = main_it->second;
        prog_.checked = true;
    }

private:
    [[noreturn]] static void type_error(const SourcePos& pos, const std::string& what)
    {
        throw ResolveError(ResolveErrorKind::TypeError, pos, what);
    }

    void check_global_init(GlobalDef& global)
    {
        Expr& init = *global.init;
        const Expr* lit = &init;
        if (init.kind == ExprKind::Unary && init.unary_op == UnaryOp::Neg)
            lit = init.operands[0].get();
        bool scalar_lit = lit->kind == ExprKind::IntLit || lit->kind == ExprKind::CharLit;
        bool string_lit = &init == lit && init.kind == ExprKind::StrLit;
        if (global.array_length || !(scalar_lit || string_lit))
            type_error(init.pos, "global initializer for '" + global.name
                                     + "' must be a scalar or string literal");
        expr(init);
    }

    void function(FunctionDef& fn)
    {
        scopes_.clear();
        scopes_.emplace_back();
        frame_ = 0;
        fn.param_bindings.clear();
        for (const auto& p : fn.params) {
            VarBinding b{StorageScope::Local, frame_, p.type, std::nullopt};
            frame_ += 8;
            declare(p.name, b, p.pos);
            fn.param_bindings.push_back(b);
        }
        stmt(*fn.body, /*new_scope=*/false);
        fn.frame_size = frame_;
    }

    void declare(const std::string& name, const VarBinding& b, const SourcePos& pos)
    {
        auto [it, fresh] = scopes_.back().emplace(name, b);
        if (!fresh)
            throw ResolveError(ResolveErrorKind::Duplicate, pos,
                               "duplicate definition of '" + name + "' in the same scope");
    }

    const VarBinding* lookup(const std::string& name) const
    {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            if (auto found = it->find(name); found != it->end())
                return &found->second;
        }
        if (auto found = globals_.find(name); found != globals_.end())
            return &found->second;
        return nullptr;
    }

    void stmt(Stmt& s, bool new_scope = true)
    {
        switch (s.kind) {
        case StmtKind::Block:
            if (new_scope)
                scopes_.emplace_back();
            for (auto& child : s.body)
                stmt(*child);
            if (new_scope)
                scopes_.pop_back();
            break;
        case StmtKind::Decl: {
            if (s.init) {
                if (s.array_length)
                    type_error(s.pos, "array '" + s.name + "' cannot have an initializer");
                expr(*s.init);
            }
            VarBinding b{StorageScope::Local, frame_, s.decl_type, s.array_length};
            frame_ += storage_size(s.decl_type, s.array_length);
            declare(s.name, b, s.pos);
            s.binding = b;
            break;
        }
        case StmtKind::ExprStmt:
            expr(*s.expr);
            break;
        case StmtKind::If:
        case StmtKind::While:
            expr(*s.expr);
            for (auto& child : s.body) {
                scopes_.emplace_back();
                stmt(*child);
                scopes_.pop_back();
            }
            break;
        case StmtKind::Return:
            if (s.expr)
                expr(*s.expr);
            break;
        }
    }

    static bool is_lvalue(const Expr& e)
    {
        switch (e.kind) {
        case ExprKind::Ident: return e.binding && !e.binding->array_length;
        case ExprKind::Deref:
        case ExprKind::Index: return true;
        default: return false;
        }
    }

    void expr(Expr& e)
    {
        e.binding.reset();
        e.builtin.reset();
        e.function.reset();
        e.literal.reset();
        for (auto& child : e.operands)
            expr(*child);

        switch (e.kind) {
        case ExprKind::IntLit:
        case ExprKind::CharLit:
            e.type = kInt;
            break;
        case ExprKind::StrLit:
            e.literal = static_cast<std::uint32_t>(prog_.string_literals.size());
            prog_.string_literals.push_back(e.text);
            e.type = kCharPtr;
            break;
        case ExprKind::Ident: {
            const VarBinding* b = lookup(e.text);
            if (!b) {
                if (functions_.count(e.text) || builtin_named(e.text))
                    type_error(e.pos, "function '" + e.text + "' used as a value");
                throw ResolveError(ResolveErrorKind::Unbound, e.pos,
                                   "use of undeclared identifier '" + e.text + "'");
            }
            e.binding = *b;
            e.type = b->array_length ? b->type.pointer_to() : b->type;
            break;
        }
        case ExprKind::Unary:
            e.type = kInt;
            break;
        case ExprKind::Binary:
            e.type = binary_type(e);
            break;
        case ExprKind::Cast:
            e.type = e.cast_type;
            break;
        case ExprKind::Deref:
            if (!e.operands[0]->type.is_pointer())
                type_error(e.pos, "dereference of non-pointer type "
                                      + to_string(e.operands[0]->type));
            e.type = e.operands[0]->type.pointee();
            break;
        case ExprKind::Index:
            if (!e.operands[0]->type.is_pointer())
                type_error(e.pos, "subscript of non-pointer type "
                                      + to_string(e.operands[0]->type));
            if (e.operands[1]->type.is_pointer())
                type_error(e.pos, "array subscript is a pointer");
            e.type = e.operands[0]->type.pointee();
            break;
        case ExprKind::AddrOf: {
            const Expr& target = *e.operands[0];
            bool array_name = target.kind == ExprKind::Ident && target.binding
                && target.binding->array_length;
            if (array_name)
                e.type = target.type;
            else if (is_lvalue(target))
                e.type = target.type.pointer_to();
            else
                type_error(e.pos, "cannot take the address of an rvalue");
            break;
        }
        case ExprKind::Assign:
            if (!is_lvalue(*e.operands[0]))
                type_error(e.pos, "left side of assignment is not assignable");
            e.type = e.operands[0]->type;
            break;
        case ExprKind::Call:
            call(e);
            break;
        }
    }

    static Type binary_type(const Expr& e)
    {
        const Type& l = e.operands[0]->type;
        const Type& r = e.operands[1]->type;
        switch (e.binary_op) {
        case BinaryOp::Add:
            if (l.is_pointer() && r.is_pointer())
                type_error(e.pos, "cannot add two pointers");
            if (l.is_pointer())
                return l;
            if (r.is_pointer())
                return r;
            return kInt;
        case BinaryOp::Sub:
            if (l.is_pointer() && r.is_pointer()) {
                if (l != r)
                    type_error(e.pos, "subtraction of incompatible pointer types");
                return kInt;
            }
            if (r.is_pointer())
                type_error(e.pos, "cannot subtract a pointer from an integer");
            return l.is_pointer() ? l : kInt;
        default:
            return kInt;
        }
    }

    void call(Expr& e)
    {
        if (auto b = builtin_named(e.text)) {
            e.builtin = b;
            std::size_t argc = e.operands.size();
            auto arity = [&](std::size_t want) {
                if (argc != want)
                    throw ResolveError(ResolveErrorKind::BadArity, e.pos,
                                       "'" + e.text + "' expects " + std::to_string(want)
                                           + " argument(s), got " + std::to_string(argc));
            };
            switch (*b) {
            case Builtin::Malloc:
                arity(1);
                e.type = kCharPtr;
                break;
            case Builtin::Free:
                arity(1);
                e.type = kInt;
                break;
            case Builtin::Getchar:
                arity(0);
                e.type = kInt;
                break;
            case Builtin::Printf:
                check_printf(e);
                e.type = kInt;
                break;
            }
            return;
        }
        auto it = functions_.find(e.text);
        if (it == functions_.end())
            throw ResolveError(ResolveErrorKind::Unbound, e.pos,
                               "call to undeclared function '" + e.text + "'");
        const FunctionDef& callee = prog_.functions[it->second];
        if (callee.params.size() != e.operands.size())
            throw ResolveError(ResolveErrorKind::BadArity, e.pos,
                               "'" + e.text + "' expects " + std::to_string(callee.params.size())
                                   + " argument(s), got " + std::to_string(e.operands.size()));
        e.function = it->second;
        e.type = callee.return_type;
    }

    void check_printf(const Expr& e)
    {
        if (e.operands.empty())
            throw ResolveError(ResolveErrorKind::BadArity, e.pos,
                               "'printf' expects a format string");
        const Expr& fmt = *e.operands[0];
        if (fmt.kind != ExprKind::StrLit)
            throw ResolveError(ResolveErrorKind::BadFormat, fmt.pos,
                               "'printf' format must be a string literal");
        std::size_t arg = 1;
        const std::string& text = fmt.text;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] != '%')
                continue;
            if (i + 1 >= text.size())
                throw ResolveError(ResolveErrorKind::BadFormat, fmt.pos,
                                   "format ends with a lone '%'");
            char conv = text[++i];
            if (conv == '%')
                continue;
            if (conv != 'd' && conv != 'c' && conv != 's' && conv != 'p' && conv != 'x')
                throw ResolveError(ResolveErrorKind::BadFormat, fmt.pos,
                                   std::string("unsupported conversion '%") + conv + "'");
            if (arg >= e.operands.size())
                throw ResolveError(ResolveErrorKind::BadArity, e.pos,
                                   "'printf' has more conversions than arguments");
            if (conv == 's' && !e.operands[arg]->type.is_pointer())
                throw ResolveError(ResolveErrorKind::BadFormat, e.operands[arg]->pos,
                                   "'%s' argument is not a pointer");
            ++arg;
        }
        if (arg != e.operands.size())
            throw ResolveError(ResolveErrorKind::BadArity, e.pos,
                               "'printf' has more arguments than conversions");
    }

    Program& prog_;
    std::unordered_map<std::string, std::uint32_t> functions_;
    std::unordered_map<std::string, VarBinding> globals_;
    std::vector<std::unordered_map<std::string, VarBinding>> scopes_;
    std::uint32_t frame_ = 0;
};

} // namespace

Program& resolve(Program& program)
{
    Resolver(program).run();
    return program;
}

Program load_program(std::string_view source, const std::string& filename)
{
    Program prog = parse(tokenize(source, filename));
    prog.file = filename;
    resolve(prog);
    return prog;
}

Program load_program_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open MiniC source '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_program(buf.str(), path);
}

} // namespace pipecleaner::minic
