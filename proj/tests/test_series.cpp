#include <gtest/gtest.h>

#include <cstdint>

#include "hilbert2/random.hpp"
#include "printers.hpp"
#include "hilbert2/series.hpp"

using namespace hilbert2;
using W = std::uint64_t;
using Ser = Series<W>;

namespace {

struct Fixture {
    std::shared_ptr<const CoeffRing<W>> ring;
    std::shared_ptr<const SeriesContext<W>> ctx;
    Fixture(int d, int n, int M) : ring(CoeffRing<W>::create(d, M)), ctx(SeriesContext<W>::create(ring, n)) {}
    const SeriesContext<W>& S() const { return *ctx; }
    Ser X() const { return Ser::variable(*ctx); }
    Ser ints(long lo, std::vector<long long> c) const { return Ser::from_ints(*ctx, lo, c); }
};

// Zero modulo 2^bits with a nonnegative pi_n-adic precision.
::testing::AssertionResult vanishes(const Ser& s, int bits) {
    if (!s.is_zero()) return ::testing::AssertionFailure() << "nonzero: " << s.str();
    if (s.abs_precision() <= bits) return ::testing::AssertionFailure() << "abs precision " << s.abs_precision();
    if (s.prec() < 0) return ::testing::AssertionFailure() << "known only below X^" << s.prec();
    return ::testing::AssertionSuccess();
}

}  // namespace

TEST(SeriesArith, Products) {
    Fixture F(1, 2, 20);
    const Ser X = F.X(), one = Ser::from_int(1, F.S());
    EXPECT_EQ(X * X, Ser::monomial(F.ring->one(), 2, F.S()));
    EXPECT_EQ(X * one, X);
    EXPECT_EQ((one + X) * (one - X), F.ints(0, {1, 0, -1}));
}

TEST(SeriesInvert, Variable) {
    Fixture F(1, 2, 20);
    EXPECT_EQ(invert(F.X()), Ser::monomial(F.ring->one(), -1, F.S()));
}

TEST(SeriesInvert, TwoPlusVariable) {
    Fixture F(1, 2, 20);
    const Ser a = F.ints(0, {2, 1});
    const Ser b = invert(a);
    // X^-1 - 2X^-2 + 4X^-3 - ...
    EXPECT_EQ(b.coefficient(-1), F.ring->from_int(1));
    EXPECT_EQ(b.coefficient(-2), F.ring->from_int(-2));
    EXPECT_EQ(b.coefficient(-3), F.ring->from_int(4));
    EXPECT_EQ(b.coefficient(-20), F.ring->from_int(-(1 << 19)));
    EXPECT_EQ(b.hi(), -1);
    EXPECT_TRUE(vanishes(a * b - Ser::from_int(1, F.S()), 19));
}

TEST(SeriesInvert, TwoIsNotAUnit) {
    Fixture F(1, 2, 20);
    EXPECT_THROW(invert(Ser::from_int(2, F.S())), NotInvertible);
}

TEST(SeriesInvert, RandomUnits) {
    Rng rng(21);
    for (int d : {1, 2}) {
        Fixture F(d, 3, 24);
        for (int i = 0; i < 20; ++i) {
            const long v = rng.range(-3, 3);
            const Ser u = Ser::monomial(random_coeff_unit(rng, *F.ring), v, F.S()) +
                          random_laurent(rng, F.S(), v + 1, v + 8) + random_laurent(rng, F.S(), v - 2, v + 4).mul_int(2);
            EXPECT_TRUE(vanishes(u * invert(u) - Ser::from_int(1, F.S()), 3));
        }
    }
}

TEST(LevelVariable, Examples) {
    Fixture F(1, 2, 20);
    EXPECT_EQ(level_variable(F.S(), 2), F.X());
    EXPECT_EQ(level_variable(F.S(), 1), F.ints(1, {2, 1}));
    EXPECT_EQ(level_variable(F.S(), 0), F.ints(1, {4, 6, 4, 1}));
    EXPECT_EQ(F.S().pi(), level_variable(F.S(), 0));
}

TEST(SeriesFrobenius, Examples) {
    Fixture F(2, 2, 20);
    EXPECT_EQ(frobenius(F.X()), F.ints(1, {2, 1}));
    const auto w = F.ring->generator();
    EXPECT_EQ(frobenius(Ser::constant(w, F.S())), Ser::constant(frobenius(w), F.S()));
    const Ser L = log_series(F.ints(0, {1, 1}));
    EXPECT_TRUE(vanishes(frobenius(L) - L.mul_int(2), 2));
}

TEST(SeriesGamma, Examples) {
    Fixture F(2, 2, 20);
    EXPECT_EQ(F.S().chi(), BigInt(5));
    EXPECT_EQ(cyclotomic_action(F.X()), F.ints(1, {5, 10, 10, 5, 1}));
    const auto w = F.ring->generator();
    EXPECT_EQ(cyclotomic_action(Ser::constant(w, F.S())), Ser::constant(w, F.S()));
}

TEST(SeriesGamma, CommutesWithFrobenius) {
    Rng rng(4);
    for (int n : {2, 3}) {
        Fixture F(2, n, 24);
        for (int i = 0; i < 20; ++i) {
            const Ser a = random_laurent(rng, F.S(), rng.range(-6, 0), rng.range(0, 10));
            EXPECT_TRUE(vanishes(frobenius(cyclotomic_action(a)) - cyclotomic_action(frobenius(a)), n));
        }
    }
}

TEST(SeriesDerivation, Examples) {
    Fixture F(1, 2, 20);
    EXPECT_EQ(invariant_derivation(F.X()), F.ints(0, {1, 1}));
    const Ser DL = invariant_derivation(log_series(F.ints(0, {1, 1})));
    EXPECT_TRUE(vanishes(DL - Ser::from_int(1, F.S()), 2));
}

TEST(SeriesDerivation, Leibniz) {
    Rng rng(8);
    Fixture F(2, 3, 24);
    for (int i = 0; i < 20; ++i) {
        const Ser a = random_laurent(rng, F.S(), -4, 8), b = random_laurent(rng, F.S(), 0, 8);
        EXPECT_TRUE(vanishes(invariant_derivation(a * b) - invariant_derivation(a) * b - a * invariant_derivation(b), 3));
    }
}

TEST(SeriesLog, Examples) {
    Fixture F(1, 2, 20);
    EXPECT_TRUE(log_series(Ser::from_int(1, F.S())).is_zero());
    // log(1 + X) = X - X^2/2 + X^3/3 - ...
    const Ser L = log_series(F.ints(0, {1, 1}));
    // Numerators are known modulo 2^(abs + scale).
    auto known = [](const Scaled<CoeffElem<W>>& c, const CoeffElem<W>& v) {
        return v.truncated(c.abs_precision() + c.scale());
    };
    const auto c1 = L.scaled_coefficient(1), c2 = L.scaled_coefficient(2), c3 = L.scaled_coefficient(3);
    EXPECT_EQ(c1.scale(), 0);
    EXPECT_EQ(known(c1, c1.numerator()), known(c1, F.ring->one()));
    EXPECT_EQ(c2.scale(), 1);
    EXPECT_EQ(known(c2, c2.numerator()), known(c2, F.ring->from_int(-1)));
    EXPECT_EQ(c3.scale(), 0);
    EXPECT_GE(c3.abs_precision(), 10);
    EXPECT_EQ(known(c3, c3.numerator() * F.ring->from_int(3)), known(c3, F.ring->one()));
}

TEST(SeriesLog, Homomorphism) {
    Rng rng(9);
    Fixture F(1, 3, 24);
    for (int i = 0; i < 20; ++i) {
        const Ser f = random_principal_series(rng, F.S(), rng.range(1, 10));
        const Ser g = random_principal_series(rng, F.S(), rng.range(1, 10));
        EXPECT_TRUE(vanishes(log_series(f * g) - log_series(f) - log_series(g), 3));
    }
}

TEST(FrobeniusLog, VanishesOnOneAndOnePlusVariable) {
    Fixture F(1, 2, 20);
    EXPECT_TRUE(frobenius_log(Ser::from_int(1, F.S())).is_zero());
    EXPECT_TRUE(vanishes(frobenius_log(F.ints(0, {1, 1})), 2));
    EXPECT_TRUE(coboundary_series(Ser::from_int(1, F.S())).is_zero());
    EXPECT_TRUE(vanishes(coboundary_series(F.ints(0, {1, 1})), 2));
}

TEST(FrobeniusLog, SlideIdentity) {
    Rng rng(10);
    for (int d : {1, 2}) {
        Fixture F(d, 2, 24);
        for (int i = 0; i < 10; ++i) {
            const Ser f = random_principal_series(rng, F.S(), rng.range(1, 8));
            const Ser L = frobenius_log(f);
            const Ser Y = coboundary_from_log(L);
            EXPECT_TRUE(vanishes(frobenius(Y) - Y - L.half(), 2));
        }
    }
}

TEST(Residue, Examples) {
    Fixture F(1, 2, 20);
    const auto r = residue(Ser::monomial(F.ring->one(), -1, F.S()));
    EXPECT_EQ(r.numerator(), F.ring->one());
    EXPECT_EQ(r.scale(), 0);
    EXPECT_TRUE(residue(F.ints(0, {3, 1, 4, 1, 5})).is_zero());
}

TEST(Residue, ExactDifferentialsHaveNone) {
    Rng rng(12);
    Fixture F(2, 3, 24);
    for (int i = 0; i < 20; ++i) {
        const Ser a = random_laurent(rng, F.S(), rng.range(-8, -1), rng.range(0, 8));
        EXPECT_TRUE(residue(invariant_derivation(a) * invert(F.ints(0, {1, 1}))).is_zero());
        EXPECT_TRUE(residue_of_product(invariant_derivation(a), F.S().one_plus_variable_inverse()).is_zero());
    }
}

TEST(Residue, KernelIsInverseOfPiTimesOnePlusX) {
    Fixture F(1, 2, 20);
    const Ser prod = F.S().residue_kernel() * F.S().pi() * F.ints(0, {1, 1});
    EXPECT_TRUE(vanishes(prod - Ser::from_int(1, F.S()), 2));
}
