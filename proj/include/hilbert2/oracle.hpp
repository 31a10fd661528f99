#pragma once

#include <cstdint>
#include <vector>

#include "hilbert2/error.hpp"
#include "hilbert2/knfield.hpp"
#include "hilbert2/symbol.hpp"

namespace hilbert2 {

// Gaussian integer re + im*i modulo 2^k.
struct Gaussian {
    std::int64_t re = 0;
    std::int64_t im = 0;
};

// Quadratic Hilbert symbol over Q_2(i) by search for primitive solutions of
// z^2 = x a^2 + y b^2 modulo t^m, t = i - 1.
//
// Since t^2 = -2i, O/t^m is Z[i]/2^(m/2) for even m. A primitive solution has
// a or b a unit (a unit z forces one, as x a^2 + y b^2 lies in t^2 O
// otherwise), so after scaling one of them to 1 it remains to ask whether
// x + y b^2 or x a^2 + y is a square for some b or a: O(2^m) work each.
class QuadraticOracle {
public:
    explicit QuadraticOracle(int m = 10) : m_(m) {
        if (m < 4 || m > 20 || m % 2 != 0) throw ConfigError("search modulus must be even and lie in [4, 20]");
        k_ = m / 2;
        q_ = std::int64_t(1) << k_;
        squares_.assign(static_cast<std::size_t>(q_ * q_), false);
        for (std::int64_t a = 0; a < q_; ++a)
            for (std::int64_t b = 0; b < q_; ++b) squares_[index(mul({a, b}, {a, b}))] = true;
    }

    int search_modulus() const { return m_; }

    // +1 or -1 for units x, y of Z_2[i].
    int symbol(Gaussian x, Gaussian y) const {
        x = reduce(x);
        y = reduce(y);
        if (!is_unit(x) || !is_unit(y)) throw DomainError("quadratic oracle needs units");
        for (std::int64_t a = 0; a < q_; ++a)
            for (std::int64_t b = 0; b < q_; ++b) {
                const Gaussian s = mul({a, b}, {a, b});
                if (squares_[index(add(x, mul(y, s)))]) return 1;
                if (squares_[index(add(mul(x, s), y))]) return 1;
            }
        return -1;
    }

    // Coordinates c0 + c1 t of a K_2 element with d = 1.
    template <class W>
    static Gaussian to_gaussian(const KnElem<W>& x) {
        const auto& K = x.context();
        if (K.degree() != 1 || K.level() != 2) throw ConfigError("quadratic oracle needs d = 1 and n = 2");
        const std::int64_t c0 = static_cast<std::int64_t>(low64(x.coefficient(0)[0]) & 0xFFFFFFFFu);
        const std::int64_t c1 = static_cast<std::int64_t>(low64(x.coefficient(1)[0]) & 0xFFFFFFFFu);
        // t = i - 1
        return {c0 - c1, c1};
    }

    template <class W>
    int symbol(const KnElem<W>& x, const KnElem<W>& y) const {
        return symbol(to_gaussian(x), to_gaussian(y));
    }

private:
    Gaussian reduce(Gaussian a) const { return {a.re & (q_ - 1), a.im & (q_ - 1)}; }
    Gaussian add(Gaussian a, Gaussian b) const { return reduce({a.re + b.re, a.im + b.im}); }
    Gaussian mul(Gaussian a, Gaussian b) const {
        return reduce({a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re});
    }
    static bool is_unit(Gaussian a) { return ((a.re + a.im) & 1) != 0; }
    std::size_t index(Gaussian a) const { return static_cast<std::size_t>(a.re * q_ + a.im); }

    int m_;
    int k_;
    std::int64_t q_;
    std::vector<bool> squares_;
};

// Verdict at modulus m, confirmed at m + 2.
class StableQuadraticOracle {
public:
    explicit StableQuadraticOracle(int m = 10) : lo_(m), hi_(m + 2) {}

    template <class X>
    int symbol(const X& x, const X& y) const {
        const int a = lo_.symbol(x, y);
        if (hi_.symbol(x, y) != a) throw PrecisionError("quadratic oracle verdict changed with the search modulus");
        return a;
    }

private:
    QuadraticOracle lo_, hi_;
};

// (-1)^value agrees with the quadratic symbol.
template <class W>
bool parity_check(const KnElem<W>& x, const KnElem<W>& y, const SymbolValue& s,
                  const StableQuadraticOracle& oracle = StableQuadraticOracle()) {
    const int sign = (s.value % 2 == 0) ? 1 : -1;
    return sign == oracle.symbol(x, y);
}

}  // namespace hilbert2
