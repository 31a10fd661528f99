#include <gtest/gtest.h>

#include <cstdint>
#include <string>

#include "hilbert2/expr.hpp"
#include "printers.hpp"

using namespace hilbert2;
using W = std::uint64_t;

namespace {

struct Ctx {
    std::shared_ptr<const CoeffRing<W>> ring;
    std::shared_ptr<const KnContext<W>> K;
    Ctx(int d, int n, int M = 40) : ring(CoeffRing<W>::create(d, M)), K(KnContext<W>::create(ring, n)) {}
    KnElem<W> parse(const std::string& s) const { return parse_element(s, *K); }
    KnElem<W> t() const { return K->uniformizer(); }
    KnElem<W> w() const { return K->embed(ring->generator()); }
    KnElem<W> c(long long v) const { return K->from_int(v); }
};

std::size_t error_position(const Ctx& c, const std::string& s) {
    try {
        c.parse(s);
    } catch (const ParseError& e) {
        return e.position;
    }
    ADD_FAILURE() << "no parse error for '" << s << "'";
    return std::string::npos;
}

}  // namespace

TEST(Parser, Examples) {
    Ctx c(1, 2);
    EXPECT_EQ(c.parse("1 + t"), c.c(1) + c.t());
    EXPECT_EQ(c.parse("5"), c.c(5));
    Ctx c2(2, 3);
    EXPECT_EQ(c2.parse("1 + 2*w*t + t^3"), c2.c(1) + c2.c(2) * c2.w() * c2.t() + c2.t() * c2.t() * c2.t());
}

TEST(Parser, PrecedenceAndParentheses) {
    Ctx c(1, 3);
    EXPECT_EQ(c.parse("1 + 2*t^2"), c.c(1) + c.c(2) * c.t() * c.t());
    EXPECT_EQ(c.parse("(1 + t)^2"), (c.c(1) + c.t()) * (c.c(1) + c.t()));
    EXPECT_EQ(c.parse("1 - t - t"), c.c(1) - c.c(2) * c.t());
    EXPECT_EQ(c.parse("-1 + t"), c.t() - c.c(1));
    EXPECT_EQ(c.parse("(1+t)^8"), c.c(1));
    EXPECT_EQ(c.parse("t^0"), c.c(1));
    EXPECT_EQ(c.parse("  3 *\t( t )  "), c.c(3) * c.t());
}

TEST(Parser, LongLiteralsReduceModuloPrecision) {
    Ctx c(1, 2, 40);
    // 2^40 + 5 == 5 modulo 2^40
    EXPECT_EQ(c.parse("1099511627781"), c.c(5));
    EXPECT_EQ(c.parse("340282366920938463463374607431768211457"), c.c(1));  // 2^128 + 1
}

TEST(Parser, Errors) {
    Ctx c(1, 2);
    EXPECT_EQ(error_position(c, "w"), 0u);
    EXPECT_EQ(error_position(c, "1 + "), 4u);
    EXPECT_EQ(error_position(c, "1 + x"), 4u);
    EXPECT_EQ(error_position(c, "(1 + t"), 6u);
    EXPECT_EQ(error_position(c, "t^"), 2u);
    EXPECT_EQ(error_position(c, "t^-1"), 2u);
    EXPECT_EQ(error_position(c, "1 t"), 2u);
    EXPECT_EQ(error_position(c, ""), 0u);
    try {
        c.parse("w + 1");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("d = 1"), std::string::npos);
    }
}
