#include <gtest/gtest.h>

#include <cstdint>
#include <vector>

#include "hilbert2/coeff.hpp"
#include "hilbert2/random.hpp"
#include "printers.hpp"

using namespace hilbert2;
using W = std::uint64_t;

namespace {

// Polynomials over F_2 as bit masks.
std::uint32_t gf2_mod(std::uint32_t a, std::uint32_t m) {
    const int dm = 31 - __builtin_clz(m);
    while (a != 0 && 31 - __builtin_clz(a) >= dm) a ^= m << ((31 - __builtin_clz(a)) - dm);
    return a;
}

bool gf2_irreducible(std::uint32_t m) {
    const int deg = 31 - __builtin_clz(m);
    for (std::uint32_t q = 2; q < (1u << (deg / 2 + 1)); ++q) {
        const int dq = 31 - __builtin_clz(q);
        if (dq >= 1 && 2 * dq <= deg && gf2_mod(m, q) == 0) return false;
    }
    return true;
}

std::uint32_t poly_mask(const std::vector<int>& p) {
    std::uint32_t m = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] & 1) m |= 1u << i;
    return m;
}

CoeffElem<W> eval_poly(const std::vector<int>& p, const CoeffElem<W>& x) {
    CoeffElem<W> acc = x.ring().zero();
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + x.ring().from_int(p[i]);
    return acc;
}

}  // namespace

TEST(CoeffRing, DegreeOneIsIntegersModPowerOfTwo) {
    auto R = CoeffRing<W>::create(1, 32);
    EXPECT_EQ(R->degree(), 1);
    auto a = R->from_int(1) + R->from_int((1LL << 32) - 1);
    EXPECT_TRUE(a.is_zero());
}

TEST(CoeffRing, DegreeTwoPolynomialIsTheUniqueIrreducibleQuadratic) {
    auto R = CoeffRing<W>::create(2, 16);
    EXPECT_EQ(poly_mask(R->defining_polynomial()), 0b111u);
}

TEST(CoeffRing, DefiningPolynomialsAreIrreducibleModTwo) {
    for (int d = 1; d <= 8; ++d) {
        const auto p = CoeffRing<W>::create(d, 16)->defining_polynomial();
        ASSERT_EQ(static_cast<int>(p.size()), d + 1);
        EXPECT_EQ(p.back(), 1);
        EXPECT_TRUE(gf2_irreducible(poly_mask(p))) << "d = " << d;
    }
}

TEST(CoeffRing, CubicHasNoRootInF2) {
    const auto m = poly_mask(CoeffRing<W>::create(3, 16)->defining_polynomial());
    EXPECT_EQ(m & 1u, 1u);                        // 0 is not a root
    EXPECT_EQ(__builtin_popcount(m) % 2, 1);      // 1 is not a root
}

TEST(CoeffArith, GeneratorSquaredFollowsDefiningPolynomial) {
    auto R = CoeffRing<W>::create(2, 20);
    auto w = R->generator();
    EXPECT_EQ(w * w, -w - R->one());
}

TEST(CoeffArith, InverseExamples) {
    auto R = CoeffRing<W>::create(1, 8);
    EXPECT_EQ(inv(R->one()), R->one());
    EXPECT_EQ(inv(R->from_int(3)), R->from_int(171));
    EXPECT_THROW(inv(R->from_int(2)), NotInvertible);
}

TEST(CoeffArith, InverseOfRandomUnits) {
    Rng rng(7);
    for (int d = 1; d <= 4; ++d) {
        auto R = CoeffRing<W>::create(d, 40);
        for (int i = 0; i < 50; ++i) {
            auto a = random_coeff_unit(rng, *R);
            EXPECT_EQ(a * inv(a), R->one());
        }
    }
}

TEST(CoeffArith, WideWordsAgreeWithNarrowOnes) {
    Rng rng(3);
    auto R = CoeffRing<W>::create(3, 60);
    auto Rw = CoeffRing<WideWord>::create(3, 60);
    for (int i = 0; i < 50; ++i) {
        auto a = random_coeff(rng, *R), b = random_coeff(rng, *R);
        auto widen = [&](const CoeffElem<W>& c) {
            CoeffElem<WideWord> r(*Rw);
            for (int k = 0; k < 3; ++k) r[k] = WideWord(c[k]);
            return r;
        };
        const auto prod = widen(a) * widen(b);
        const auto expect = widen(a * b);
        EXPECT_EQ(prod, expect);
    }
}

TEST(Frobenius, TrivialForDegreeOne) {
    auto R = CoeffRing<W>::create(1, 32);
    EXPECT_EQ(frobenius(R->from_int(12345)), R->from_int(12345));
}

TEST(Frobenius, ConjugateRootForDegreeTwo) {
    auto R = CoeffRing<W>::create(2, 30);
    auto w = R->generator();
    auto s = frobenius(w);
    EXPECT_EQ(s, -R->one() - w);
    EXPECT_TRUE(eval_poly(R->defining_polynomial(), s).is_zero());
    EXPECT_EQ(frobenius(s), w);
    EXPECT_EQ(s, w * w);  // w^2 + w + 1 = 0 makes the conjugate exactly w^2
}

TEST(Frobenius, LiftsSquaringAndHasOrderD) {
    Rng rng(11);
    for (int d = 1; d <= 8; ++d) {
        auto R = CoeffRing<W>::create(d, 40);
        for (int i = 0; i < 40; ++i) {
            auto a = random_coeff(rng, *R), b = random_coeff(rng, *R);
            auto s = frobenius(a);
            EXPECT_GE((s - a * a).v2(), 1);
            EXPECT_EQ(frobenius(a * b), s * frobenius(b));
            auto it = a;
            for (int k = 0; k < d; ++k) it = frobenius(it);
            EXPECT_EQ(it, a) << "d = " << d;
        }
    }
}

TEST(Trace, Examples) {
    auto R2 = CoeffRing<W>::create(2, 24);
    EXPECT_EQ(trace(R2->one()), ZMod2k<W>::from_int(2, 24));
    EXPECT_EQ(trace(R2->generator()), ZMod2k<W>::from_int(-1, 24));
    for (int d = 1; d <= 8; ++d) {
        auto R = CoeffRing<W>::create(d, 24);
        EXPECT_EQ(trace(R->one()), ZMod2k<W>::from_int(d, 24));
    }
}

TEST(Trace, MatchesSumOfConjugates) {
    Rng rng(5);
    for (int d = 1; d <= 8; ++d) {
        auto R = CoeffRing<W>::create(d, 36);
        for (int i = 0; i < 20; ++i) {
            auto a = random_coeff(rng, *R);
            auto sum = R->zero();
            auto c = a;
            for (int k = 0; k < d; ++k) {
                sum = sum + c;
                c = frobenius(c);
            }
            EXPECT_EQ(sum, R->from_word(trace(a).value)) << "d = " << d;
            EXPECT_EQ(trace(frobenius(a)), trace(a));
        }
    }
}

TEST(Teichmuller, Examples) {
    auto R = CoeffRing<W>::create(2, 40);
    EXPECT_TRUE(teichmuller(*R, 0).is_zero());
    EXPECT_EQ(teichmuller(*R, 1), R->one());
    auto omega = teichmuller(*R, 0b10);
    EXPECT_EQ(pow(omega, 3), R->one());
    EXPECT_NE(omega, R->one());
    EXPECT_GE((omega - R->generator()).v2(), 1);
}

TEST(Teichmuller, FixedByFrobeniusPower) {
    for (int d = 1; d <= 6; ++d) {
        auto R = CoeffRing<W>::create(d, 40);
        for (std::uint32_t r = 1; r < (1u << d); ++r) {
            auto t = teichmuller(*R, r);
            EXPECT_EQ(pow(t, (std::uint64_t(1) << d) - 1), R->one());
            EXPECT_EQ(frobenius(t), t * t);
        }
    }
}
