#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hilbert2/coeff.hpp"
#include "hilbert2/knfield.hpp"
#include "hilbert2/series.hpp"

namespace hilbert2 {

// Deterministic generators for the property suites. Only raw mt19937_64
// output is used, so streams are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }
    // Uniform in [0, bound) for bound <= 2^32, by rejection.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = (~std::uint64_t(0)) - (~std::uint64_t(0)) % bound;
        for (;;) {
            std::uint64_t v = gen_();
            if (v < limit) return v % bound;
        }
    }
    long range(long lo, long hi) { return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
    bool coin() { return (gen_() & 1u) != 0; }

    template <class W>
    W word(int bits) {
        W w(0);
        for (int filled = 0; filled < bits; filled += 64) w |= W(gen_()) << filled;
        return w & low_mask<W>(bits);
    }

private:
    std::mt19937_64 gen_;
};

template <class W>
CoeffElem<W> random_coeff(Rng& rng, const CoeffRing<W>& R) {
    CoeffElem<W> c(R);
    for (int i = 0; i < R.degree(); ++i) c[i] = rng.word<W>(R.precision());
    return c;
}

template <class W>
CoeffElem<W> random_coeff_unit(Rng& rng, const CoeffRing<W>& R) {
    for (;;) {
        CoeffElem<W> c = random_coeff(rng, R);
        if (c.is_unit()) return c;
    }
}

// 1 + 2a_0 + sum_{i>=1} a_i t^i.
template <class W>
KnElem<W> random_principal_unit(Rng& rng, const KnContext<W>& K) {
    KnElem<W> x(K);
    x.set_coefficient(0, K.ring().one() + random_coeff(rng, K.ring()).times_pow2(1));
    for (int i = 1; i < K.ramification(); ++i) x.set_coefficient(i, random_coeff(rng, K.ring()));
    return x;
}

// Polynomial with exponents in [lo, hi] and random coefficients.
template <class W>
Series<W> random_laurent(Rng& rng, const SeriesContext<W>& ctx, long lo, long hi) {
    std::vector<CoeffElem<W>> c;
    for (long e = lo; e <= hi; ++e) c.push_back(random_coeff(rng, ctx.ring()));
    return Series<W>::from_coeffs(ctx, lo, c);
}

// 1 + X r(X) with deg r < degree.
template <class W>
Series<W> random_principal_series(Rng& rng, const SeriesContext<W>& ctx, long degree) {
    return Series<W>::from_int(1, ctx) + random_laurent(rng, ctx, 1, degree);
}

}  // namespace hilbert2
