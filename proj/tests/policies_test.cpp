#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "pipecleaner/policy/policies.hpp"

using namespace pipecleaner;
using namespace pipecleaner::policy;
using minic::BinaryOp;

namespace {

SourcePos at(std::uint32_t line) { return {"file.c", line, 1}; }

constexpr BinaryOp kArith[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::BitAnd,
                               BinaryOp::BitOr, BinaryOp::BitXor, BinaryOp::Shl, BinaryOp::Shr};

} // namespace

// DoubleFree -------------------------------------------------------------------

TEST(DoubleFree, SecondFreeNamesBothSites)
{
    DoubleFreeRules df;
    auto freed = df.on_free(at(81), {}, TagAtom::of(double_free::AllocatedHeader));
    ASSERT_FALSE(freed.failed());
    EXPECT_EQ(freed.out.kind, double_free::FreedHeader);

    auto again = df.on_free(at(83), {}, freed.out);
    ASSERT_TRUE(again.failed());
    const auto& f = *again.failure;
    EXPECT_EQ(f.policy, "DoubleFree");
    EXPECT_EQ(f.rule, "FreeT detects two frees");
    EXPECT_EQ(f.bug_class, "double-free");
    EXPECT_EQ(f.locations, (std::vector{at(81), at(83)}));
    EXPECT_EQ(f.message, "Double free: 1st free file.c:81, 2nd free file.c:83");
    EXPECT_EQ(f.detail, (std::vector<std::string>{"Memory first freed at location file.c:81",
                                                  "was freed again at location file.c:83"}));
}

TEST(DoubleFree, NonsenseFree)
{
    DoubleFreeRules df;
    auto v = df.on_free(at(9), {}, TagAtom::of(double_free::NotHeader));
    ASSERT_TRUE(v.failed());
    EXPECT_EQ(v.failure->bug_class, "nonsense-free");
    EXPECT_EQ(v.failure->message, "Nonsense free or corrupted pointer at file.c:9");
}

TEST(DoubleFree, MallocReinstallsAllocatedHeader)
{
    DoubleFreeRules df;
    auto m = df.on_malloc(at(1), {});
    EXPECT_EQ(m.out.header.kind, double_free::AllocatedHeader);
    EXPECT_EQ(m.out.data.kind, double_free::NotHeader);
    EXPECT_EQ(df.init().heap_location.kind, double_free::NotHeader);
}

// Random free/malloc traces against a hand-rolled header state machine.
TEST(DoubleFreeProperty, FreeOfFreedHeaderAlwaysFailstopsWithOrderedSites)
{
    DoubleFreeRules df;
    std::mt19937_64 rng(11);
    for (int trace = 0; trace < 200; ++trace) {
        std::vector<TagAtom> headers(4, TagAtom::of(double_free::NotHeader));
        std::vector<std::optional<std::uint32_t>> freed_at(4);  // oracle
        std::vector<bool> allocated(4, false);
        for (std::uint32_t step = 1; step < 40; ++step) {
            auto slot = rng() % 4;
            if (rng() % 3 == 0) {
                headers[slot] = df.on_malloc(at(step), {}).out.header;
                allocated[slot] = true;
                freed_at[slot].reset();
                continue;
            }
            auto v = df.on_free(at(step), {}, headers[slot]);
            if (freed_at[slot]) {
                ASSERT_TRUE(v.failed());
                EXPECT_EQ(v.failure->locations, (std::vector{at(*freed_at[slot]), at(step)}));
                break;
            }
            if (!allocated[slot]) {
                ASSERT_TRUE(v.failed());
                EXPECT_EQ(v.failure->bug_class, "nonsense-free");
                break;
            }
            ASSERT_FALSE(v.failed());
            headers[slot] = v.out;
            freed_at[slot] = step;
        }
    }
}

// HeapSafety allocation rules ----------------------------------------------------

TEST(HeapSafety, ConsecutiveMallocsGetConsecutiveColors)
{
    HeapSafetyRules hs;
    auto ctl = hs.init().control;
    auto a = hs.on_malloc(at(5), ctl);
    auto b = hs.on_malloc(at(6), a.out.control);
    std::uint64_t c = ctl.color;
    EXPECT_EQ(a.out.pointer.color, c);
    EXPECT_EQ(b.out.pointer.color, c + 1);
    EXPECT_EQ(b.out.control.color, c + 2);
    EXPECT_EQ(a.out.pointer.kind, heap_safety::HeapPtr);
    EXPECT_EQ(a.out.header.kind, heap_safety::AllocatedHeader);
    EXPECT_EQ(a.out.data.kind, heap_safety::AllocatedDirty);
    EXPECT_EQ(a.out.padding.kind, heap_safety::AllocatedPadding);
    EXPECT_EQ(a.out.data.line, 5u);
}

TEST(HeapSafety, FreeOwnershipMismatch)
{
    HeapSafetyRules hs;
    auto v = hs.on_free(at(30), TagAtom::of(heap_safety::HeapPtr, 3), TagAtom::of(heap_safety::AllocatedHeader, 5));
    ASSERT_TRUE(v.failed());
    EXPECT_EQ(v.failure->bug_class, "ownership-mismatch");
    EXPECT_EQ(v.failure->message, "Corrupted:Free ownership mismatch @file.c:30");
}

TEST(HeapSafety, FreeBranches)
{
    HeapSafetyRules hs;
    auto ok = hs.on_free(at(1), TagAtom::of(heap_safety::HeapPtr, 4), TagAtom::of(heap_safety::AllocatedHeader, 4));
    ASSERT_FALSE(ok.failed());
    EXPECT_EQ(ok.out.kind, heap_safety::UnallocatedHeap);

    auto non_ptr = hs.on_free(at(1), TagAtom::of(heap_safety::NotHeapPointer),
                              TagAtom::of(heap_safety::AllocatedHeader, 4));
    EXPECT_EQ(non_ptr.failure->bug_class, "free-non-pointer");

    auto nonsense = hs.on_free(at(1), TagAtom::of(heap_safety::HeapPtr, 4), TagAtom::of(heap_safety::UnallocatedHeap));
    EXPECT_EQ(nonsense.failure->bug_class, "nonsense-free");
}

TEST(HeapSafety, ClearRules)
{
    HeapSafetyRules hs;
    auto ptr = TagAtom::of(heap_safety::HeapPtr, 7);
    for (auto kind : {heap_safety::Allocated, heap_safety::AllocatedDirty, heap_safety::AllocatedPadding}) {
        auto v = hs.on_clear(at(1), ptr, TagAtom::of(kind, 7));
        ASSERT_FALSE(v.failed());
        EXPECT_EQ(v.out.kind, heap_safety::UnallocatedHeap);
    }
    EXPECT_EQ(hs.on_clear(at(1), ptr, TagAtom::of(heap_safety::Allocated, 8)).failure->bug_class, "clear-corruption");
    EXPECT_EQ(hs.on_clear(at(1), ptr, TagAtom::of(heap_safety::NotHeap)).failure->bug_class, "clear-corruption");
}

// HeapSafety access rules ----------------------------------------------------------

TEST(HeapSafety, DirtyLoadLogsAndRecovers)
{
    HeapSafetyRules hs;
    std::vector<TagAtom> lts(8, TagAtom::at(heap_safety::AllocatedDirty, at(4), 2));
    std::vector<TagAtom> vts(8);
    auto v = hs.on_load(at(9), TagAtom::of(heap_safety::HeapPtr, 2), Address{0x1000008}, lts, vts);
    EXPECT_FALSE(v.failed());
    EXPECT_TRUE(v.log_and_recover);
}

TEST(HeapSafety, ForeignColorLoadNamesOwner)
{
    HeapSafetyRules hs;
    std::vector<TagAtom> lts(1, TagAtom::at(heap_safety::Allocated, at(6), 3));
    std::vector<TagAtom> vts(1);
    auto v = hs.on_load(at(25), TagAtom::of(heap_safety::HeapPtr, 2), Address{0x1000010}, lts, vts);
    ASSERT_TRUE(v.failed());
    EXPECT_EQ(v.failure->bug_class, "overread");
    EXPECT_EQ(v.failure->message, "Overread @file.c:25: belongs to @file.c:6");
    EXPECT_EQ(v.failure->locations, (std::vector{at(25), at(6)}));
}

TEST(HeapSafety, UnallocatedLoadIsOverread)
{
    HeapSafetyRules hs;
    std::vector<TagAtom> lts(1, TagAtom::of(heap_safety::UnallocatedHeap));
    std::vector<TagAtom> vts(1);
    auto v = hs.on_load(at(3), TagAtom::of(heap_safety::HeapPtr, 1), Address{0x1000100}, lts, vts);
    ASSERT_TRUE(v.failed());
    EXPECT_EQ(v.failure->message, "Overread @file.c:3");
}

TEST(HeapSafety, StoreFlipsDirtyToAllocated)
{
    HeapSafetyRules hs;
    std::vector<TagAtom> lts(8, TagAtom::at(heap_safety::AllocatedDirty, at(4), 2));
    auto v = hs.on_store(at(9), TagAtom::of(heap_safety::HeapPtr, 2), {}, Address{0x1000008}, lts);
    ASSERT_FALSE(v.failed());
    for (const auto& t : lts) {
        EXPECT_EQ(t.kind, heap_safety::Allocated);
        EXPECT_EQ(t.color, 2u);
        EXPECT_EQ(t.line, 4u);
    }
}

TEST(HeapSafety, IntegerStoreIntoHeapIsTampering)
{
    HeapSafetyRules hs;
    std::vector<TagAtom> lts(8, TagAtom::at(heap_safety::Allocated, at(4), 2));
    auto v = hs.on_store(at(12), TagAtom::of(heap_safety::NotHeapPointer), {}, Address{0x1000008}, lts);
    ASSERT_TRUE(v.failed());
    EXPECT_EQ(v.failure->bug_class, "tampering");
    EXPECT_EQ(v.failure->message.rfind("Tampering @file.c:12", 0), 0u);
}

TEST(HeapSafety, StackStoreThroughIntegerIsFine)
{
    HeapSafetyRules hs;
    std::vector<TagAtom> lts(8, TagAtom::of(heap_safety::NotHeap));
    EXPECT_FALSE(hs.on_store(at(1), TagAtom::of(heap_safety::NotHeapPointer), {}, Address{0x100000}, lts).failed());
    EXPECT_EQ(lts[0].kind, heap_safety::NotHeap);
}

TEST(HeapSafety, PointerArithmeticKeepsColor)
{
    HeapSafetyRules hs;
    auto p = TagAtom::at(heap_safety::HeapPtr, at(2), 9);
    auto as_int = hs.on_cast(at(3), p).out;
    auto plus = hs.on_binop(at(3), BinaryOp::Add, as_int, hs.on_const(at(3)).out).out;
    EXPECT_EQ(plus, p);
    EXPECT_EQ(hs.on_binop(at(3), BinaryOp::Add, hs.on_const(at(3)).out, p).out, p);
    EXPECT_EQ(hs.on_const(at(3)).out.kind, heap_safety::NotHeapPointer);
}

TEST(HeapSafetyProperty, ColorsNeverRepeat)
{
    HeapSafetyRules hs;
    auto ctl = hs.init().control;
    std::uint64_t last = 0;
    for (std::uint32_t i = 0; i < 5000; ++i) {
        auto m = hs.on_malloc(at(i + 1), ctl);
        ASSERT_GT(m.out.pointer.color, last);
        ASSERT_EQ(m.out.control.color, m.out.pointer.color + 1);
        last = m.out.pointer.color;
        ctl = m.out.control;
    }
}

// Per-byte transitions over random same-color load/store/clear sequences stay
// on the path AllocatedDirty -> Allocated -> UnallocatedHeap.
TEST(HeapSafetyProperty, DirtyMonotonicity)
{
    HeapSafetyRules hs;
    std::mt19937_64 rng(3);
    auto rank = [](std::uint8_t kind) {
        switch (kind) {
        case heap_safety::AllocatedDirty: return 0;
        case heap_safety::Allocated: return 1;
        case heap_safety::UnallocatedHeap: return 2;
        default: return -1;
        }
    };
    for (int trial = 0; trial < 200; ++trial) {
        auto m = hs.on_malloc(at(1), hs.init().control).out;
        std::vector<TagAtom> bytes(16, m.data);
        for (int step = 0; step < 30; ++step) {
            auto off = rng() % 16;
            auto width = rng() % 2 ? 1u : std::min<std::size_t>(8, 16 - off);
            std::span<TagAtom> window(bytes.data() + off, width);
            std::vector<int> before;
            for (auto& t : window)
                before.push_back(rank(t.kind));
            if (rng() % 2) {
                ASSERT_FALSE(hs.on_store(at(2), m.pointer, {}, Address{}, window).failed());
            } else {
                std::vector<TagAtom> vts(width);
                ASSERT_FALSE(hs.on_load(at(2), m.pointer, Address{}, window, vts).failed());
            }
            for (std::size_t i = 0; i < width; ++i)
                ASSERT_GE(rank(window[i].kind), before[i]);
        }
        for (auto& t : bytes) {
            auto v = hs.on_clear(at(3), m.pointer, t);
            ASSERT_FALSE(v.failed());
            ASSERT_EQ(rank(v.out.kind), 2);
        }
    }
}

// HeapAddressSIF ---------------------------------------------------------------------

TEST(HeapAddressSif, BinopTaint)
{
    HeapAddressSifRules sif;
    auto p = TagAtom::of(heap_address_sif::ProtectedPtr);
    auto u = TagAtom::of(heap_address_sif::UnProtected);
    EXPECT_EQ(sif.on_binop(at(1), BinaryOp::Add, p, u).out, p);
    EXPECT_EQ(sif.on_binop(at(1), BinaryOp::Add, u, p).out, p);
    EXPECT_EQ(sif.on_binop(at(1), BinaryOp::Add, u, u).out, u);
}

TEST(HeapAddressSif, PointerComparisonIsUnprotected)
{
    HeapAddressSifRules sif;
    auto p = TagAtom::of(heap_address_sif::ProtectedPtr);
    for (auto op : {BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge})
        EXPECT_EQ(sif.on_binop(at(1), op, p, p).out.kind, heap_address_sif::UnProtected);
    EXPECT_EQ(sif.on_binop(at(1), BinaryOp::Sub, p, p).out.kind, heap_address_sif::ProtectedPtr);
}

TEST(HeapAddressSif, PrintfLeak)
{
    HeapAddressSifRules sif;
    std::vector<TagAtom> args{TagAtom::of(heap_address_sif::UnProtected), TagAtom::of(heap_address_sif::ProtectedPtr)};
    auto v = sif.on_printf(at(44), args);
    ASSERT_TRUE(v.failed());
    EXPECT_EQ(v.failure->bug_class, "address-leak");
    EXPECT_EQ(v.failure->message, "Address leak @file.c:44");
    EXPECT_EQ(v.failure->locations, std::vector{at(44)});
    args.pop_back();
    EXPECT_FALSE(sif.on_printf(at(44), args).failed());
}

TEST(HeapAddressSif, MallocAndConstants)
{
    HeapAddressSifRules sif;
    EXPECT_EQ(sif.on_malloc(at(1), {}).out.pointer.kind, heap_address_sif::ProtectedPtr);
    EXPECT_EQ(sif.on_const(at(1)).out.kind, heap_address_sif::UnProtected);
}

// Result of a random arithmetic/cast/unop tree is ProtectedPtr iff some leaf is.
TEST(HeapAddressSifProperty, TaintIsExactlyLeafUnion)
{
    HeapAddressSifRules sif;
    std::mt19937_64 rng(17);
    std::function<std::pair<TagAtom, bool>(int)> tree = [&](int depth) -> std::pair<TagAtom, bool> {
        if (depth == 0 || rng() % 4 == 0) {
            bool prot = rng() % 5 == 0;
            return {prot ? sif.on_malloc(at(1), {}).out.pointer : sif.on_const(at(1)).out, prot};
        }
        switch (rng() % 3) {
        case 0: {
            auto [t, p] = tree(depth - 1);
            return {sif.on_cast(at(1), t).out, p};
        }
        case 1: {
            auto [t, p] = tree(depth - 1);
            return {sif.on_unop(at(1), minic::UnaryOp::BitNot, t).out, p};
        }
        default: {
            auto [l, lp] = tree(depth - 1);
            auto [r, rp] = tree(depth - 1);
            return {sif.on_binop(at(1), kArith[rng() % std::size(kArith)], l, r).out, lp || rp};
        }
        }
    };
    for (int i = 0; i < 2000; ++i) {
        auto [tag, any_leaf] = tree(6);
        ASSERT_EQ(tag.kind == heap_address_sif::ProtectedPtr, any_leaf);
    }
}

// Purity: same inputs, same verdicts, for every policy and a spread of hooks.
TEST(PolicyProperty, HooksArePure)
{
    std::vector<std::unique_ptr<Rules>> all;
    all.push_back(std::make_unique<NullRules>());
    all.push_back(std::make_unique<DoubleFreeRules>());
    all.push_back(std::make_unique<HeapSafetyRules>());
    all.push_back(std::make_unique<HeapAddressSifRules>());
    std::mt19937_64 rng(23);
    auto random_atom = [&] {
        return TagAtom{rng() % 4, static_cast<std::uint32_t>(rng() % 50), 1, static_cast<std::uint8_t>(rng() % 6)};
    };
    for (const auto& r : all) {
        for (int i = 0; i < 500; ++i) {
            auto a = random_atom();
            auto b = random_atom();
            auto pos = at(1 + rng() % 90);
            auto free1 = r->on_free(pos, a, b);
            auto free2 = r->on_free(pos, a, b);
            EXPECT_EQ(free1.out, free2.out);
            EXPECT_EQ(free1.failure, free2.failure);
            EXPECT_EQ(r->on_binop(pos, BinaryOp::Add, a, b).out, r->on_binop(pos, BinaryOp::Add, a, b).out);
            std::vector<TagAtom> l1{a, b}, l2{a, b}, v{b, a};
            auto s1 = r->on_store(pos, a, b, Address{}, l1);
            auto s2 = r->on_store(pos, a, b, Address{}, l2);
            EXPECT_EQ(l1, l2);
            EXPECT_EQ(s1.failure, s2.failure);
            auto ld1 = r->on_load(pos, a, Address{}, l1, v);
            auto ld2 = r->on_load(pos, a, Address{}, l1, v);
            EXPECT_EQ(ld1.out, ld2.out);
            EXPECT_EQ(ld1.log_and_recover, ld2.log_and_recover);
        }
    }
}

TEST(NullPolicy, NeverFails)
{
    NullRules n;
    std::vector<TagAtom> l(4), v(4);
    EXPECT_FALSE(n.on_free(at(1), {}, {}).failed());
    auto ld = n.on_load(at(1), {}, Address{}, l, v);
    EXPECT_FALSE(ld.failed());
    EXPECT_FALSE(ld.log_and_recover);
    EXPECT_FALSE(n.on_store(at(1), {}, {}, Address{}, l).failed());
    EXPECT_FALSE(n.on_printf(at(1), v).failed());
}
