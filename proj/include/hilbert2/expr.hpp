#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

#include "hilbert2/error.hpp"
#include "hilbert2/knfield.hpp"

namespace hilbert2 {

// Polynomial expressions in t (= zeta - 1) and w (generator of O_K):
//
//   expr   := ['-'] term (('+' | '-') term)*
//   term   := factor ('*' factor)*
//   factor := atom ('^' uint)?
//   atom   := int | 't' | 'w' | '(' expr ')'
//
// Integer literals of any length are reduced modulo 2^M.
template <class W>
class ElementParser {
public:
    ElementParser(std::string_view src, const KnContext<W>& ctx) : src_(src), ctx_(ctx) {}

    KnElem<W> parse() {
        KnElem<W> v = expr();
        skip();
        if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_, what); }

    void skip() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    KnElem<W> expr() {
        const bool negate = accept('-');
        KnElem<W> v = term();
        if (negate) v = -v;
        for (;;) {
            if (accept('+'))
                v = v + term();
            else if (accept('-'))
                v = v - term();
            else
                return v;
        }
    }

    KnElem<W> term() {
        KnElem<W> v = factor();
        while (accept('*')) v = v * factor();
        return v;
    }

    KnElem<W> factor() {
        KnElem<W> base = atom();
        if (!accept('^')) return base;
        skip();
        const std::size_t start = pos_;
        std::uint64_t e = 0;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            if (e > (std::uint64_t(1) << 40)) fail("exponent too large");
            e = e * 10 + static_cast<std::uint64_t>(src_[pos_] - '0');
            ++pos_;
        }
        if (pos_ == start) fail("expected an unsigned exponent");
        return pow(base, e);
    }

    KnElem<W> atom() {
        skip();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            BigInt v = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                v = v * 10 + (src_[pos_] - '0');
                ++pos_;
            }
            return ctx_.embed(ctx_.ring().from_word(word_from_big<W>(v, ctx_.precision())));
        }
        if (c == 't') {
            ++pos_;
            return ctx_.uniformizer();
        }
        if (c == 'w') {
            if (ctx_.degree() == 1) fail("'w' is not available when d = 1");
            ++pos_;
            return ctx_.embed(ctx_.ring().generator());
        }
        if (c == '(') {
            ++pos_;
            KnElem<W> v = expr();
            if (!accept(')')) fail("expected ')'");
            return v;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view src_;
    const KnContext<W>& ctx_;
    std::size_t pos_ = 0;
};

template <class W>
KnElem<W> parse_element(std::string_view src, const KnContext<W>& ctx) {
    return ElementParser<W>(src, ctx).parse();
}

}  // namespace hilbert2
