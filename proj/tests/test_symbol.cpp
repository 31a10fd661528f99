#include <gtest/gtest.h>

#include <cstdint>
#include <vector>

#include "hilbert2/random.hpp"
#include "hilbert2/symbol.hpp"
#include "printers.hpp"

using namespace hilbert2;
using W = std::uint64_t;

namespace {

// Inputs live at 2n + 4G bits, enough for every retry and recheck.
struct Inputs {
    Params p;
    std::shared_ptr<const CoeffRing<WideWord>> ring;
    std::shared_ptr<const KnContext<WideWord>> K;
    explicit Inputs(int d, int n, int guard = 16) : p{d, n, guard} {
        ring = CoeffRing<WideWord>::create(d, 2 * n + 4 * guard);
        K = KnContext<WideWord>::create(ring, n);
    }
    KnElem<WideWord> elem(const std::vector<long long>& c) const { return K->from_ints(c); }
    KnElem<WideWord> zeta() const { return K->zeta(); }
};

struct Vector {
    int n;
    std::vector<long long> x, y;
    std::uint64_t xy, yx, xz;
};

// Coordinates in the basis 1, t, t^2, ... (d = 1). Values were produced by
// an independent prototype of the same formula and are frozen here.
const std::vector<Vector> kPrototype = {
    {2, {9, 1}, {15, 7}, 0, 0, 0},
    {2, {7, 6}, {1, 7}, 3, 1, 3},
    {2, {1, 6}, {7, 4}, 2, 2, 1},
    {2, {1, 5}, {1, 0}, 0, 0, 2},
    {2, {13, 3}, {15, 3}, 1, 3, 1},
    {2, {11, 3}, {15, 3}, 0, 0, 2},
    {2, {13, 0}, {9, 2}, 0, 0, 2},
    {2, {13, 5}, {9, 4}, 2, 2, 2},
    {3, {5, 1, 1, 5}, {5, 4, 3, 0}, 6, 2, 1},
    {3, {9, 6, 5, 7}, {11, 0, 5, 7}, 3, 5, 4},
    {3, {7, 6, 2, 2}, {5, 0, 2, 5}, 1, 7, 2},
};

}  // namespace

TEST(Symbol, PrototypeVectorsOnEngine) {
    for (const auto& v : kPrototype) {
        SymbolEngine<W> eng(1, v.n, 16);
        const auto x = eng.field().from_ints(v.x), y = eng.field().from_ints(v.y);
        const auto ux = eng.prepare(x), uy = eng.prepare(y), uz = eng.prepare(eng.field().zeta());
        EXPECT_EQ(eng.evaluate(ux, uy).value, v.xy);
        EXPECT_EQ(eng.evaluate(uy, ux).value, v.yx);
        EXPECT_EQ(eng.evaluate(ux, uz).value, v.xz);
        EXPECT_EQ(eng.evaluate_cup(ux, uy).value, v.xy);
        EXPECT_EQ((v.xy + v.yx) % (1u << v.n), 0u);
    }
}

TEST(Symbol, PrototypeVectorsThroughCertifiedEntryPoints) {
    for (const auto& v : kPrototype) {
        Inputs in(1, v.n);
        const auto x = in.elem(v.x), y = in.elem(v.y);
        const auto s = hilbert_symbol(x, y, in.p);
        EXPECT_EQ(s.value, v.xy);
        EXPECT_EQ(s.modulus, 1u << v.n);
        EXPECT_GE(s.certificate.guard_consumed, 0);
        EXPECT_LT(s.certificate.guard_consumed, in.p.guard);
        EXPECT_EQ(s.certificate.recheck_precision, v.n + 2 * in.p.guard);
        EXPECT_FALSE(s.certificate.paths_agreed.has_value());
        EXPECT_EQ(artin_hasse(x, in.p).value, v.xz);
        const auto c = symbol_via_cup(x, y, in.p);
        EXPECT_EQ(c.value, v.xy);
        EXPECT_EQ(c.certificate.paths_agreed, std::optional<bool>(true));
    }
}

TEST(Symbol, LevelTwoExamples) {
    Inputs in(1, 2);
    const auto five = in.elem({5});
    EXPECT_EQ(hilbert_symbol(five, in.zeta(), in.p).value, 2u);
    EXPECT_EQ(artin_hasse(five, in.p).value, 2u);
}

TEST(Symbol, TrivialArguments) {
    for (int d : {1, 2}) {
        for (int n : {2, 3}) {
            Inputs in(d, n);
            Rng rng(static_cast<std::uint64_t>(10 * d + n));
            const auto y = random_principal_unit(rng, *in.K);
            const auto one = in.elem({1});
            EXPECT_EQ(hilbert_symbol(one, y, in.p).value, 0u);
            EXPECT_EQ(hilbert_symbol(y, one, in.p).value, 0u);
            EXPECT_EQ(hilbert_symbol(in.zeta(), in.zeta(), in.p).value, 0u);
            EXPECT_EQ(symbol_via_cup(one, y, in.p).value, 0u);
            EXPECT_EQ(symbol_via_cup(in.zeta(), in.zeta(), in.p).value, 0u);
            EXPECT_EQ(artin_hasse(one, in.p).value, 0u);
            EXPECT_EQ(artin_hasse(in.zeta(), in.p).value, 0u);
        }
    }
}

TEST(Symbol, RejectsNonPrincipalInputs) {
    Inputs in(1, 2);
    const auto t = in.K->uniformizer();
    EXPECT_THROW(hilbert_symbol(t, in.zeta(), in.p), DomainError);
    EXPECT_THROW(artin_hasse(t, in.p), DomainError);
}

TEST(Symbol, WordSizesAgree) {
    Rng rng(77);
    SymbolEngine<W> narrow(2, 3, 16);
    SymbolEngine<WideWord> wide(2, 3, 16);
    for (int i = 0; i < 5; ++i) {
        const auto x = random_principal_unit(rng, narrow.field()), y = random_principal_unit(rng, narrow.field());
        EXPECT_EQ(narrow.evaluate(x, y).value, wide.evaluate(wide.import(x), wide.import(y)).value);
    }
}

TEST(ChiUnitFactor, Values) {
    const std::vector<std::uint64_t> expected = {3, 5, 9, 17};
    for (int n = 2; n <= 5; ++n) {
        Params p{1, n};
        EXPECT_EQ(chi_unit_factor(p), expected[n - 2]) << "n = " << n;
    }
}

TEST(TrMap, PowerSeriesMapToZero) {
    Rng rng(5);
    SymbolEngine<W> eng(2, 2, 16);
    const auto& S = eng.series();
    for (int i = 0; i < 10; ++i) {
        const auto a = random_laurent(rng, S, 0, 12);
        EXPECT_TRUE(eng.tr_map({a}).is_zero());
    }
}

TEST(TrMap, CoboundariesMapToZero) {
    Rng rng(6);
    SymbolEngine<W> eng(1, 3, 16);
    const auto& S = eng.series();
    const auto chi = S.ring().from_word(word_from_big<W>(S.chi(), S.precision()));
    for (int i = 0; i < 10; ++i) {
        const auto b = random_laurent(rng, S, rng.range(-12, -1), rng.range(0, 8));
        const auto g = eng.tr_map({cyclotomic_action(b).mul_coeff(chi) - b});
        const auto f = eng.tr_map({b - frobenius(b)});
        EXPECT_TRUE(g.is_zero() && g.abs_precision() > 3);
        EXPECT_TRUE(f.is_zero() && f.abs_precision() > 3);
    }
}

TEST(CupProduct, ZeroCochainAndBilinearity) {
    Rng rng(8);
    SymbolEngine<W> eng(1, 2, 16);
    const auto& S = eng.series();
    auto cochain = [&] { return Cochain<W>{random_laurent(rng, S, -4, 6), random_laurent(rng, S, -4, 6)}; };
    const Cochain<W> zero{Series<W>::zero(S), Series<W>::zero(S)};
    for (int i = 0; i < 5; ++i) {
        const auto a = cochain(), a2 = cochain(), b = cochain();
        EXPECT_TRUE(eng.cup_product(zero, b).rep.is_zero());
        const Cochain<W> sum{a.m + a2.m, a.n + a2.n};
        const auto lhs = eng.cup_product(sum, b).rep;
        const auto rhs = eng.cup_product(a, b).rep + eng.cup_product(a2, b).rep;
        EXPECT_TRUE((lhs - rhs).is_zero());
    }
}

TEST(Params, Validation) {
    EXPECT_THROW((Params{0, 2}).validate(), ConfigError);
    EXPECT_THROW((Params{9, 2}).validate(), ConfigError);
    EXPECT_THROW((Params{1, 1}).validate(), ConfigError);
    EXPECT_THROW((Params{1, 9}).validate(), ConfigError);
    EXPECT_THROW((Params{1, 2, 4}).validate(), ConfigError);
    EXPECT_THROW((Params{1, 2, 200}).validate(), ConfigError);
    EXPECT_NO_THROW((Params{2, 3, 16}).validate());
}

TEST(Symbol, GuardTooSmallFailsHonestly) {
    // The engine refuses to report a class it cannot certify.
    SymbolEngine<W> eng(1, 3, 1);
    const auto x = eng.field().from_ints({9, 6, 5, 7}), y = eng.field().from_ints({11, 0, 5, 7});
    EXPECT_THROW(eng.evaluate(x, y), PrecisionError);
}

TEST(Symbol, PowersOfTheLevelAreKilled) {
    for (int d : {1, 2}) {
        for (int n : {2, 3}) {
            SymbolEngine<W> eng(d, n, 16);
            Rng rng(static_cast<std::uint64_t>(100 + 10 * d + n));
            for (int i = 0; i < 5; ++i) {
                const auto x = random_principal_unit(rng, eng.field()), y = random_principal_unit(rng, eng.field());
                const auto xq = pow(x, std::uint64_t(1) << n);
                EXPECT_EQ(eng.evaluate(xq, y).value, 0u);
                EXPECT_EQ(eng.evaluate(y, xq).value, 0u);
            }
        }
    }
}
