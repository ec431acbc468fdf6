#include "pipecleaner/interp/interpreter.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "memory.hpp"
#include "pipecleaner/interp/heap.hpp"
#include "pipecleaner/interp/layout.hpp"

namespace pipecleaner::interp {

std::string_view to_string(CrashKind kind)
{
    switch (kind) {
    case CrashKind::OutOfBoundsAccess: return "OutOfBoundsAccess";
    case CrashKind::DivByZero: return "DivByZero";
    case CrashKind::StackOverflow: return "StackOverflow";
    }
    return "Unknown";
}

bool parse_crash_kind(std::string_view text, CrashKind& out)
{
    for (auto k : {CrashKind::OutOfBoundsAccess, CrashKind::DivByZero, CrashKind::StackOverflow}) {
        if (to_string(k) == text) {
            out = k;
            return true;
        }
    }
    return false;
}

namespace {

using minic::BinaryOp;
using minic::Builtin;
using minic::Expr;
using minic::ExprKind;
using minic::Stmt;
using minic::StmtKind;
using policy::HookResult;
using policy::Tag;

struct Value {
    std::int64_t v = 0;
    Tag tag;
    std::uint32_t provenance = 0;
};

// Thrown once the outcome is recorded; unwinds the evaluator.
struct Halt {};

struct ShadowBlock {
    std::uint64_t payload = 0;
    std::uint64_t size = 0;
    bool live = false;
};

constexpr std::uint32_t kMinFrame = 16;

class Machine {
public:
    Machine(const minic::Program& prog, const policy::Policy& policy, std::string_view input,
            const Limits& limits)
        : prog_(prog)
        , policy_(policy)
        , input_(input)
        , limits_(limits)
        , init_(policy.init())
        , rodata_offsets_(layout_rodata(prog))
        , mem_(init_, prog.globals_size, rodata_bytes_, limits.heap_bytes)
        , heap_(Address{kHeapBase}, limits.heap_bytes)
        , ctag_(init_.control)
        , sp_(kStackBase)
        , shadow_(limits.shadow_bounds_check && policy.contains("HeapSafety"))
    {
    }

    RunResult run()
    {
        try {
            init_static();
            const auto& main_fn = prog_.functions.at(*prog_.main_index);
            Value code = call(*prog_.main_index, {}, main_fn.pos);
            result_.outcome = Exit{code.v};
        } catch (const Halt&) {
        }
        result_.stats.allocations = heap_.allocations();
        return std::move(result_);
    }

private:
    // --- bookkeeping ---------------------------------------------------------

    std::vector<std::uint64_t> layout_rodata(const minic::Program& prog)
    {
        std::vector<std::uint64_t> offsets;
        std::uint64_t at = kGlobalBase + prog.globals_size;
        for (const auto& s : prog.string_literals) {
            offsets.push_back(at);
            at += s.size() + 1;
        }
        rodata_bytes_ = at - (kGlobalBase + prog.globals_size);
        return offsets;
    }

    [[noreturn]] void halt(Outcome outcome)
    {
        result_.outcome = std::move(outcome);
        throw Halt{};
    }

    [[noreturn]] void crash(CrashKind kind, const SourcePos& pos) { halt(Crash{kind, pos}); }

    void tick()
    {
        if (++result_.stats.steps > limits_.max_steps) {
            result_.stats.steps = limits_.max_steps;
            halt(StepLimit{});
        }
    }

    template <typename T>
    T hook(HookResult<T>&& r)
    {
        ++result_.stats.control_points;
        if (r.failure)
            halt(std::move(*r.failure));
        return std::move(r.out);
    }

    Value constant(std::int64_t v, const SourcePos& pos) { return {v, hook(policy_.on_const(pos)), 0}; }

    // --- memory --------------------------------------------------------------

    void write_raw(std::uint64_t addr, std::int64_t v, std::uint32_t width, const Tag& vtag,
                   std::uint32_t provenance)
    {
        auto u = static_cast<std::uint64_t>(v);
        for (std::uint32_t i = 0; i < width; ++i) {
            Cell& c = mem_.cell(addr + i);
            c.byte = static_cast<std::uint8_t>(u >> (8 * i));
            c.vtag = vtag;
            c.provenance = provenance;
        }
    }

    bool shadow_violation(std::uint32_t provenance, std::uint64_t addr, std::uint64_t width) const
    {
        if (provenance != 0) {
            const ShadowBlock& b = shadow_blocks_[provenance - 1];
            return !b.live || addr < b.payload || addr + width > b.payload + b.size;
        }
        std::uint64_t heap_end = kHeapBase + limits_.heap_bytes;
        return addr < heap_end && addr + width > kHeapBase;
    }

    void shadow_check(const Value& ptr, std::uint64_t width, const std::optional<policy::FailStop>& failure)
    {
        if (!shadow_)
            return;
        bool flagged = false;
        if (failure) {
            if (failure->policy != "HeapSafety")
                return;
            const auto& c = failure->bug_class;
            flagged = c == "overread" || c == "overwrite" || c == "tampering";
        }
        ++result_.stats.shadow_checks;
        auto addr = static_cast<std::uint64_t>(ptr.v);
        if (flagged != shadow_violation(ptr.provenance, addr, width))
            ++result_.stats.shadow_disagreements;
    }

    Value load(const Value& ptr, std::uint32_t width, const SourcePos& pos)
    {
        auto addr = static_cast<std::uint64_t>(ptr.v);
        if (!mem_.mapped(addr, width))
            crash(CrashKind::OutOfBoundsAccess, pos);
        std::array<Tag, 8> lts;
        std::array<Tag, 8> vts;
        std::uint64_t u = 0;
        std::uint32_t provenance = 0;
        for (std::uint32_t i = 0; i < width; ++i) {
            const Cell& c = mem_.cell(addr + i);
            lts[i] = c.ltag;
            vts[i] = c.vtag;
            u |= static_cast<std::uint64_t>(c.byte) << (8 * i);
            if (provenance == 0)
                provenance = c.provenance;
        }
        auto r = policy_.on_load(pos, ptr.tag, Address{addr}, std::span<const Tag>(lts.data(), width),
                                 std::span<const Tag>(vts.data(), width));
        shadow_check(ptr, width, r.failure);
        bool dirty = r.log_and_recover;
        Tag tag = hook(std::move(r));
        if (dirty)
            log_dirty_read(pos, addr, u, width);
        return {static_cast<std::int64_t>(u), tag, provenance};
    }

    void log_dirty_read(const SourcePos& pos, std::uint64_t addr, std::uint64_t u, std::uint32_t width)
    {
        std::string bytes;
        for (std::uint32_t i = 0; i < width; ++i)
            bytes.push_back(static_cast<char>(u >> (8 * i)));
        auto& events = result_.deferred_events;
        // Byte-at-a-time scans of one buffer become a single event.
        if (!events.empty()) {
            DirtyReadEvent& last = events.back();
            if (last.srcpos == pos && last.addr.value + last.bytes_read.size() == addr) {
                last.bytes_read += bytes;
                return;
            }
        }
        events.push_back(DirtyReadEvent{pos, Address{addr}, std::move(bytes)});
    }

    void store(const Value& ptr, const Value& value, std::uint32_t width, const SourcePos& pos)
    {
        auto addr = static_cast<std::uint64_t>(ptr.v);
        if (!mem_.writable(addr, width))
            crash(CrashKind::OutOfBoundsAccess, pos);
        std::array<Tag, 8> lts;
        for (std::uint32_t i = 0; i < width; ++i)
            lts[i] = mem_.cell(addr + i).ltag;
        auto r = policy_.on_store(pos, ptr.tag, value.tag, Address{addr}, std::span<Tag>(lts.data(), width));
        shadow_check(ptr, width, r.failure);
        hook(std::move(r));
        write_raw(addr, value.v, width, value.tag, value.provenance);
        for (std::uint32_t i = 0; i < width; ++i)
            mem_.cell(addr + i).ltag = lts[i];
    }

    // --- program state -------------------------------------------------------

    void init_static()
    {
        for (std::size_t i = 0; i < prog_.string_literals.size(); ++i) {
            const std::string& s = prog_.string_literals[i];
            for (std::size_t k = 0; k <= s.size(); ++k)
                mem_.cell(rodata_offsets_[i] + k).byte = k < s.size() ? static_cast<std::uint8_t>(s[k]) : 0;
        }
        for (const auto& g : prog_.globals) {
            if (!g.init)
                continue;
            Value v = eval(*g.init);
            write_raw(kGlobalBase + g.binding->offset, v.v, g.type.size(), v.tag, v.provenance);
        }
    }

    std::uint64_t variable_address(const minic::VarBinding& b) const
    {
        return (b.scope == minic::StorageScope::Global ? kGlobalBase : frame_) + b.offset;
    }

    Value call(std::uint32_t index, std::vector<Value> args, const SourcePos& pos)
    {
        const minic::FunctionDef& fn = prog_.functions[index];
        std::uint64_t size = std::max<std::uint64_t>(kMinFrame, align_up(fn.frame_size));
        if (depth_ >= kMaxCallDepth || sp_ + size > kStackBase + kStackBytes)
            crash(CrashKind::StackOverflow, pos);

        std::uint64_t saved_frame = frame_;
        std::uint64_t saved_sp = sp_;
        frame_ = sp_;
        sp_ += size;
        ++depth_;
        for (std::uint64_t a = frame_; a < sp_; ++a) {
            Cell& c = mem_.cell(a);
            c.byte = 0;
            c.provenance = 0;
            c.ltag = init_.other_location;
            c.vtag = init_.value;
        }
        for (std::size_t i = 0; i < args.size(); ++i) {
            const auto& b = fn.param_bindings[i];
            write_raw(frame_ + b.offset, args[i].v, b.type.size(), args[i].tag, args[i].provenance);
        }

        returned_.reset();
        exec(*fn.body);
        Value out = returned_ ? *returned_ : Value{0, init_.value, 0};
        returned_.reset();

        --depth_;
        frame_ = saved_frame;
        sp_ = saved_sp;
        return out;
    }

    // --- statements ----------------------------------------------------------

    // Returns true when a return statement was executed.
    bool exec(const Stmt& s)
    {
        tick();
        switch (s.kind) {
        case StmtKind::Block:
            for (const auto& child : s.body) {
                if (exec(*child))
                    return true;
            }
            return false;
        case StmtKind::Decl:
            if (s.init) {
                Value v = eval(*s.init);
                Value where = constant(static_cast<std::int64_t>(variable_address(*s.binding)), s.pos);
                store(where, narrow(v, s.decl_type), s.decl_type.size(), s.pos);
            }
            return false;
        case StmtKind::ExprStmt:
            eval(*s.expr);
            return false;
        case StmtKind::If:
            if (eval(*s.expr).v != 0)
                return exec(*s.body[0]);
            if (s.body.size() > 1)
                return exec(*s.body[1]);
            return false;
        case StmtKind::While:
            while (eval(*s.expr).v != 0) {
                if (exec(*s.body[0]))
                    return true;
                tick();
            }
            return false;
        case StmtKind::Return:
            returned_ = s.expr ? eval(*s.expr) : Value{0, init_.value, 0};
            return true;
        }
        return false;
    }

    // --- expressions ---------------------------------------------------------

    static Value narrow(Value v, const minic::Type& type)
    {
        if (!type.is_pointer() && type.base == minic::BaseType::Char)
            v.v = static_cast<std::uint8_t>(v.v);
        return v;
    }

    static bool is_array_name(const Expr& e) { return e.kind == ExprKind::Ident && e.binding->array_length; }

    static std::int64_t element_size(const minic::Type& pointer) { return pointer.pointee().size(); }

    // Address of an lvalue (or of an array, for array names).
    Value address_of(const Expr& e)
    {
        switch (e.kind) {
        case ExprKind::Ident:
            return constant(static_cast<std::int64_t>(variable_address(*e.binding)), e.pos);
        case ExprKind::Deref:
            return eval(*e.operands[0]);
        case ExprKind::Index: {
            Value base = eval(*e.operands[0]);
            Value idx = eval(*e.operands[1]);
            Tag tag = hook(policy_.on_binop(e.pos, BinaryOp::Add, base.tag, idx.tag));
            auto v = static_cast<std::int64_t>(static_cast<std::uint64_t>(base.v)
                                               + static_cast<std::uint64_t>(idx.v)
                                                   * static_cast<std::uint64_t>(element_size(e.operands[0]->type)));
            return {v, tag, base.provenance ? base.provenance : idx.provenance};
        }
        default:
            return eval(e);
        }
    }

    Value eval(const Expr& e)
    {
        tick();
        switch (e.kind) {
        case ExprKind::IntLit:
        case ExprKind::CharLit:
            return constant(e.int_value, e.pos);
        case ExprKind::StrLit:
            return constant(static_cast<std::int64_t>(rodata_offsets_[*e.literal]), e.pos);
        case ExprKind::Ident:
            if (is_array_name(e))
                return address_of(e);
            return load(address_of(e), e.type.size(), e.pos);
        case ExprKind::Deref:
        case ExprKind::Index:
            return load(address_of(e), e.type.size(), e.pos);
        case ExprKind::AddrOf:
            return address_of(*e.operands[0]);
        case ExprKind::Unary:
            return unary(e);
        case ExprKind::Binary:
            return binary(e);
        case ExprKind::Cast: {
            Value v = eval(*e.operands[0]);
            v.tag = hook(policy_.on_cast(e.pos, v.tag));
            return narrow(v, e.cast_type);
        }
        case ExprKind::Assign: {
            const Expr& lhs = *e.operands[0];
            Value where = address_of(lhs);
            Value v = narrow(eval(*e.operands[1]), lhs.type);
            store(where, v, lhs.type.size(), e.pos);
            return v;
        }
        case ExprKind::Call:
            if (e.builtin)
                return builtin(e);
            {
                std::vector<Value> args;
                args.reserve(e.operands.size());
                for (const auto& a : e.operands)
                    args.push_back(eval(*a));
                const auto& params = prog_.functions[*e.function].params;
                for (std::size_t i = 0; i < args.size(); ++i)
                    args[i] = narrow(args[i], params[i].type);
                return call(*e.function, std::move(args), e.pos);
            }
        }
        return {};
    }

    Value unary(const Expr& e)
    {
        Value v = eval(*e.operands[0]);
        auto u = static_cast<std::uint64_t>(v.v);
        switch (e.unary_op) {
        case minic::UnaryOp::Neg: u = 0 - u; break;
        case minic::UnaryOp::Not: u = u == 0 ? 1 : 0; break;
        case minic::UnaryOp::BitNot: u = ~u; break;
        }
        return {static_cast<std::int64_t>(u), hook(policy_.on_unop(e.pos, e.unary_op, v.tag)), v.provenance};
    }

    Value binary(const Expr& e)
    {
        const Expr& le = *e.operands[0];
        const Expr& re = *e.operands[1];
        BinaryOp op = e.binary_op;
        Value l = eval(le);

        if (op == BinaryOp::LogicalAnd || op == BinaryOp::LogicalOr) {
            bool decided = op == BinaryOp::LogicalAnd ? l.v == 0 : l.v != 0;
            if (decided)
                return {op == BinaryOp::LogicalOr ? 1 : 0, hook(policy_.on_cast(e.pos, l.tag)), 0};
            Value r = eval(re);
            return {r.v != 0 ? 1 : 0, hook(policy_.on_binop(e.pos, op, l.tag, r.tag)), 0};
        }

        Value r = eval(re);
        auto a = static_cast<std::uint64_t>(l.v);
        auto b = static_cast<std::uint64_t>(r.v);
        std::uint64_t out = 0;
        bool lp = le.type.is_pointer();
        bool rp = re.type.is_pointer();
        bool boolean = false;
        switch (op) {
        case BinaryOp::Add:
            if (lp)
                b *= static_cast<std::uint64_t>(element_size(le.type));
            else if (rp)
                a *= static_cast<std::uint64_t>(element_size(re.type));
            out = a + b;
            break;
        case BinaryOp::Sub:
            if (lp && rp) {
                out = static_cast<std::uint64_t>(static_cast<std::int64_t>(a - b) / element_size(le.type));
                break;
            }
            if (lp)
                b *= static_cast<std::uint64_t>(element_size(le.type));
            out = a - b;
            break;
        case BinaryOp::Mul: out = a * b; break;
        case BinaryOp::Div:
        case BinaryOp::Mod:
            if (r.v == 0)
                crash(CrashKind::DivByZero, e.pos);
            if (l.v == INT64_MIN && r.v == -1)
                out = op == BinaryOp::Div ? a : 0;
            else
                out = static_cast<std::uint64_t>(op == BinaryOp::Div ? l.v / r.v : l.v % r.v);
            break;
        case BinaryOp::Eq: out = l.v == r.v; boolean = true; break;
        case BinaryOp::Ne: out = l.v != r.v; boolean = true; break;
        case BinaryOp::Lt: out = l.v < r.v; boolean = true; break;
        case BinaryOp::Le: out = l.v <= r.v; boolean = true; break;
        case BinaryOp::Gt: out = l.v > r.v; boolean = true; break;
        case BinaryOp::Ge: out = l.v >= r.v; boolean = true; break;
        case BinaryOp::BitAnd: out = a & b; break;
        case BinaryOp::BitOr: out = a | b; break;
        case BinaryOp::BitXor: out = a ^ b; break;
        case BinaryOp::Shl: out = a << (b & 63); break;
        case BinaryOp::Shr: out = static_cast<std::uint64_t>(l.v >> (b & 63)); break;
        case BinaryOp::LogicalAnd:
        case BinaryOp::LogicalOr: break;
        }
        Tag tag = hook(policy_.on_binop(e.pos, op, l.tag, r.tag));
        std::uint32_t provenance = boolean ? 0 : (l.provenance ? l.provenance : r.provenance);
        return {static_cast<std::int64_t>(out), tag, provenance};
    }

    // --- builtins ------------------------------------------------------------

    Value builtin(const Expr& e)
    {
        switch (*e.builtin) {
        case Builtin::Malloc: return builtin_malloc(e);
        case Builtin::Free: return builtin_free(e);
        case Builtin::Getchar: {
            std::int64_t c = cursor_ < input_.size() ? static_cast<std::uint8_t>(input_[cursor_++]) : -1;
            return constant(c, e.pos);
        }
        case Builtin::Printf: return builtin_printf(e);
        }
        return {};
    }

    Value builtin_malloc(const Expr& e)
    {
        Value size = eval(*e.operands[0]);
        auto placement = heap_.plan(static_cast<std::uint64_t>(size.v));
        if (!placement)
            halt(OutOfMemory{});
        policy::MallocTagSet tags = hook(policy_.on_malloc(e.pos, ctag_));
        const HeapBlock& block = heap_.commit(*placement);
        ctag_ = tags.control;

        std::uint64_t h = block.header_addr.value;
        write_raw(h, static_cast<std::int64_t>(block.payload_size), kHeaderSize, init_.value, 0);
        mem_.cell(h).ltag = tags.header;
        for (std::uint64_t i = 1; i < kHeaderSize; ++i)
            mem_.cell(h + i).ltag = tags.padding;

        std::uint64_t p = block.payload_addr.value;
        for (std::uint64_t i = 0; i < block.capacity; ++i) {
            Cell& c = mem_.cell(p + i);
            c.ltag = i < block.payload_size ? tags.data : tags.padding;
            for (std::size_t k = 0; k < policy::kMaxComponents; ++k) {
                if (tags.replace_data_value[k])
                    c.vtag.parts[k] = tags.data_value.parts[k];
            }
        }
        shadow_blocks_.push_back(ShadowBlock{p, block.payload_size, true});
        return {static_cast<std::int64_t>(p), tags.pointer, block.serial};
    }

    Value builtin_free(const Expr& e)
    {
        Value ptr = eval(*e.operands[0]);
        Value done{0, init_.value, 0};
        if (ptr.v == 0)
            return done;
        std::uint64_t header = static_cast<std::uint64_t>(ptr.v) - kHeaderSize;
        if (!mem_.mapped(header))
            crash(CrashKind::OutOfBoundsAccess, e.pos);

        Tag new_header = hook(policy_.on_free(e.pos, ptr.tag, mem_.cell(header).ltag));
        const HeapBlock* block = heap_.block_at(Address{header});
        std::vector<Tag> cleared;
        if (block && block->ever_allocated) {
            std::uint64_t end = block->payload_addr.value + block->capacity;
            cleared.reserve(end - header - 1);
            for (std::uint64_t a = header + 1; a < end; ++a)
                cleared.push_back(hook(policy_.on_clear(e.pos, ptr.tag, mem_.cell(a).ltag)));
        }

        mem_.cell(header).ltag = new_header;
        for (std::size_t i = 0; i < cleared.size(); ++i)
            mem_.cell(header + 1 + i).ltag = cleared[i];
        std::uint32_t serial = block ? block->serial : 0;
        if (heap_.release(Address{static_cast<std::uint64_t>(ptr.v)}) == Release::Freed && serial)
            shadow_blocks_[serial - 1].live = false;
        return done;
    }

    Value builtin_printf(const Expr& e)
    {
        const std::string& fmt = prog_.string_literals[*e.operands[0]->literal];
        std::vector<Value> args;
        for (std::size_t i = 1; i < e.operands.size(); ++i)
            args.push_back(eval(*e.operands[i]));

        // %s arguments contribute the tags of the bytes printed, not the pointer's.
        std::vector<Tag> tags;
        std::vector<std::string> strings;
        std::size_t next = 0;
        for (std::size_t i = 0; i + 1 < fmt.size(); ++i) {
            if (fmt[i] != '%')
                continue;
            char conv = fmt[++i];
            if (conv == '%')
                continue;
            const Value& arg = args[next++];
            if (conv != 's') {
                tags.push_back(arg.tag);
                continue;
            }
            std::string s;
            Value at = arg;
            for (;;) {
                tick();
                Value c = load(at, 1, e.pos);
                if (c.v == 0)
                    break;
                s.push_back(static_cast<char>(c.v));
                tags.push_back(c.tag);
                ++at.v;
            }
            strings.push_back(std::move(s));
        }
        hook(policy_.on_printf(e.pos, tags));

        std::string out;
        next = 0;
        std::size_t next_string = 0;
        char buf[32];
        for (std::size_t i = 0; i < fmt.size(); ++i) {
            if (fmt[i] != '%' || i + 1 >= fmt.size()) {
                out.push_back(fmt[i]);
                continue;
            }
            char conv = fmt[++i];
            if (conv == '%') {
                out.push_back('%');
                continue;
            }
            const Value& arg = args[next++];
            switch (conv) {
            case 'd': std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(arg.v)); out += buf; break;
            case 'c': out.push_back(static_cast<char>(arg.v)); break;
            case 'x':
                std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(arg.v));
                out += buf;
                break;
            case 'p':
                std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(arg.v));
                out += buf;
                break;
            case 's': out += strings[next_string++]; break;
            default: break;
            }
        }
        result_.stdout_bytes += out;
        return constant(static_cast<std::int64_t>(out.size()), e.pos);
    }

    const minic::Program& prog_;
    const policy::Policy& policy_;
    std::string_view input_;
    Limits limits_;
    policy::InitialTagSet init_;
    std::uint64_t rodata_bytes_ = 0;
    std::vector<std::uint64_t> rodata_offsets_;
    Memory mem_;
    HeapAllocator heap_;
    Tag ctag_;
    std::uint64_t sp_;
    std::uint64_t frame_ = kStackBase;
    std::uint32_t depth_ = 0;
    std::size_t cursor_ = 0;
    std::optional<Value> returned_;
    bool shadow_;
    std::vector<ShadowBlock> shadow_blocks_;
    RunResult result_;
};

} // namespace

RunResult exec_program(const minic::Program& program, const policy::Policy& policy, std::string_view input,
                       const Limits& limits)
{
    if (!program.checked || !program.main_index)
        throw std::invalid_argument("exec_program needs a resolved program");
    if (limits.max_steps == 0 || limits.heap_bytes == 0)
        throw std::invalid_argument("limits must be positive");
    return Machine(program, policy, input, limits).run();
}

} // namespace pipecleaner::interp
