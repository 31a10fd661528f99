#include <gtest/gtest.h>

#include <cstdint>
#include <vector>

#include "hilbert2/knfield.hpp"
#include "hilbert2/random.hpp"
#include "printers.hpp"

using namespace hilbert2;
using W = std::uint64_t;
using Elem = KnElem<W>;
using Ser = Series<W>;

namespace {

struct Field {
    std::shared_ptr<const CoeffRing<W>> ring;
    std::shared_ptr<const KnContext<W>> K;
    std::shared_ptr<const SeriesContext<W>> S;
    Field(int d, int n, int M)
        : ring(CoeffRing<W>::create(d, M)), K(KnContext<W>::create(ring, n)), S(SeriesContext<W>::create(ring, n)) {}
    Elem t() const { return K->uniformizer(); }
    Elem c(long long v) const { return K->from_int(v); }
};

}  // namespace

TEST(KnArith, UniformizerSquaredAtLevelTwo) {
    Field F(1, 2, 24);
    EXPECT_EQ(F.t() * F.t(), F.c(-2) * F.t() - F.c(2));
}

TEST(KnArith, RootOfUnityOrders) {
    for (int n = 2; n <= 5; ++n) {
        Field F(2, n, 32);
        const Elem z = F.K->zeta();
        EXPECT_EQ(pow(z, std::uint64_t(1) << (n - 1)), F.c(-1)) << "n = " << n;
        EXPECT_EQ(pow(z, std::uint64_t(1) << n), F.K->one()) << "n = " << n;
    }
}

TEST(KnArith, UniformizerIsARootOfTheMinimalPolynomial) {
    for (int n = 2; n <= 5; ++n) {
        Field F(1, n, 32);
        const auto& phi = F.K->min_poly();
        ASSERT_EQ(static_cast<int>(phi.size()), F.K->ramification());
        Elem acc = F.K->one();
        for (std::size_t i = phi.size(); i-- > 0;) acc = acc * F.t() + F.K->embed(F.ring->from_word(phi[i]));
        EXPECT_TRUE(acc.is_zero()) << "n = " << n;
    }
}

TEST(KnArith, InverseOfRandomUnits) {
    Rng rng(31);
    for (int d : {1, 2}) {
        for (int n : {2, 3}) {
            Field F(d, n, 30);
            for (int i = 0; i < 20; ++i) {
                Elem x = random_principal_unit(rng, *F.K);
                EXPECT_EQ(x * inv(x), F.K->one());
            }
        }
    }
}

TEST(KnValuation, Examples) {
    for (int n = 2; n <= 4; ++n) {
        Field F(1, n, 30);
        EXPECT_EQ(valuation(F.t()), 1);
        EXPECT_EQ(valuation(F.c(2)), 1L << (n - 1));
        EXPECT_EQ(valuation(F.c(1) + F.t()), 0);
        EXPECT_EQ(valuation(F.c(4) * F.t() * F.t()), (1L << n) + 2);
        EXPECT_FALSE(valuation(F.K->zero()).has_value());
    }
}

TEST(KnPrincipalUnit, Examples) {
    Field F(2, 3, 30);
    EXPECT_TRUE(is_principal_unit(F.c(1) + F.t()));
    EXPECT_TRUE(is_principal_unit(F.c(5)));
    EXPECT_FALSE(is_principal_unit(F.t()));
    EXPECT_FALSE(is_principal_unit(F.K->embed(F.ring->generator())));
}

TEST(LiftUnit, Examples) {
    Field F(1, 2, 24);
    EXPECT_EQ(lift_unit(F.c(1) + F.t(), *F.S), Ser::from_ints(*F.S, 0, {1, 1}));
    EXPECT_EQ(lift_unit(F.c(1), *F.S), Ser::from_int(1, *F.S));
    EXPECT_EQ(lift_unit(F.c(5), *F.S), Ser::from_ints(*F.S, 0, {1, -4, -2}));
    // 1 - X^4 is another lift of 5 since (i - 1)^4 = -4.
    EXPECT_EQ(eval_at_root(Ser::from_ints(*F.S, 0, {1, 0, 0, 0, -1}), 1, *F.K).numerator(), F.c(5));
}

TEST(LiftUnit, EvaluatesBackToTheUnit) {
    Rng rng(32);
    for (int d : {1, 2}) {
        for (int n : {2, 3, 4}) {
            Field F(d, n, 30);
            for (int i = 0; i < 10; ++i) {
                const Elem x = random_principal_unit(rng, *F.K);
                const Ser f = lift_unit(x, *F.S);
                EXPECT_EQ(f.coefficient(0), F.ring->one());
                EXPECT_GE(f.lo(), 0);
                const auto v = eval_at_root(f, 1, *F.K);
                EXPECT_EQ(v.scale(), 0);
                EXPECT_EQ(v.numerator(), x);
                // Any f + Phi r is a lift too.
                Ser r = random_laurent(rng, *F.S, 0, 5);
                Ser phi = Ser::monomial(F.ring->one(), F.K->ramification(), *F.S);
                const auto& mp = F.K->min_poly();
                for (std::size_t k = 0; k < mp.size(); ++k)
                    phi += Ser::monomial(F.ring->from_word(mp[k]), static_cast<long>(k), *F.S);
                EXPECT_EQ(eval_at_root(f + phi * r, 1, *F.K).numerator(), x);
            }
        }
    }
}

TEST(EvalAtRoot, Variable) {
    Field F(1, 3, 24);
    EXPECT_EQ(eval_at_root(Ser::variable(*F.S), 1, *F.K).numerator(), F.t());
    EXPECT_EQ(eval_at_root(Ser::variable(*F.S), 0, *F.K).numerator(), F.K->zero());
}

TEST(EvalAtRoot, SumOverRootsIsResidue) {
    Rng rng(33);
    for (int d : {1, 2}) {
        for (int n : {2, 3}) {
            Field F(d, n, 40);
            for (int i = 0; i < 10; ++i) {
                const Ser P = random_laurent(rng, *F.S, 0, 20);
                Scaled<Elem> sum = Scaled<Elem>::exact(F.K->zero());
                for (long long u = 0; u < (1LL << n); ++u) sum = sum + eval_at_root(P, u, *F.K);
                const auto res = residue_of_product(P, F.S->residue_kernel());
                const Scaled<Elem> expect =
                    Scaled<Elem>(F.K->embed(res.numerator()), res.scale(), res.abs_precision()).times_pow2(n);
                EXPECT_TRUE(equal_within(sum, expect));
                EXPECT_GE(std::min(sum.abs_precision(), expect.abs_precision()), 10);
            }
        }
    }
}

TEST(KnLog, Examples) {
    Field F(1, 2, 20);
    EXPECT_TRUE(kn_log(F.c(1)).is_zero());
    const auto lz = kn_log(F.K->zeta());
    EXPECT_TRUE(lz.is_zero());
    EXPECT_GT(lz.abs_precision(), 2);
    // sum_k (-1)^(k+1) 4^k / k = 9852 mod 2^17, from exact rational partial sums.
    const auto l5 = kn_log(F.c(5));
    EXPECT_EQ(l5.scale(), 0);
    ASSERT_GE(l5.abs_precision(), 17);
    EXPECT_EQ(l5.numerator().coefficient(0).truncated(17), F.ring->from_int(9852));
    EXPECT_TRUE(l5.numerator().coefficient(1).truncated(17).is_zero());
    EXPECT_EQ(l5.numerator().coefficient(0).truncated(5), F.ring->from_int(-4).truncated(5));
}

TEST(KnLog, ThrowsOnNonPrincipal) {
    Field F(1, 2, 20);
    EXPECT_THROW(kn_log(F.t()), DomainError);
}

TEST(KnTrace, Examples) {
    for (int d : {1, 2, 3}) {
        for (int n : {2, 3, 4}) {
            Field F(d, n, 24);
            EXPECT_EQ(kn_trace(F.K->one()), ZMod2k<W>::from_int(d << (n - 1), 24));
        }
    }
    Field F(1, 2, 24);
    EXPECT_EQ(kn_trace(F.t()), ZMod2k<W>::from_int(-2, 24));
}

TEST(KnTrace, PowerSumsMatchConjugateSums) {
    // sum over primitive 2^n-th roots of (zeta - 1)^i, from complex roots.
    const std::vector<std::vector<long long>> expected = {
        {2, -2}, {4, -4, 4, -4}, {8, -8, 8, -8, 8, -8, 8, -8}};
    for (int n = 2; n <= 4; ++n) {
        Field F(1, n, 24);
        const auto& p = F.K->power_sums();
        ASSERT_EQ(p.size(), expected[n - 2].size());
        for (std::size_t i = 0; i < p.size(); ++i)
            EXPECT_EQ(ZMod2k<W>({p[i], 24}), ZMod2k<W>::from_int(expected[n - 2][i], 24)) << "n = " << n << " i = " << i;
    }
}

TEST(KnGalois, ActsOnRootsAndFixesBase) {
    Field F(2, 3, 24);
    const Elem z = F.K->zeta();
    for (std::uint64_t c : {1u, 3u, 5u, 7u}) EXPECT_EQ(galois(z, c), pow(z, c));
    const Elem w = F.K->embed(F.ring->generator());
    EXPECT_EQ(galois(w, 3), w);
}

TEST(KnImport, RejectsLowerPrecision) {
    Field lo(1, 2, 20), hi(1, 2, 30);
    EXPECT_NO_THROW(import_element<W>(hi.c(5), *lo.K));
    EXPECT_THROW(import_element<W>(lo.c(5), *hi.K), PrecisionError);
    Field other(1, 3, 20);
    EXPECT_THROW(import_element<W>(hi.c(5), *other.K), ContextMismatch);
}

TEST(KnArith, MinimalPolynomialIsEisenstein) {
    for (int n = 2; n <= 6; ++n) {
        Field F(1, n, 40);
        const auto& phi = F.K->min_poly();
        EXPECT_EQ(phi[0], W(2));
        for (std::size_t k = 1; k < phi.size(); ++k) EXPECT_EQ(phi[k] % 2, W(0)) << "n = " << n << " k = " << k;
        EXPECT_EQ(valuation(F.c(2)), F.K->ramification());
    }
}
