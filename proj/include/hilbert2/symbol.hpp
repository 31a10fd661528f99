#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>

#include "hilbert2/coeff.hpp"
#include "hilbert2/error.hpp"
#include "hilbert2/knfield.hpp"
#include "hilbert2/scaled.hpp"
#include "hilbert2/series.hpp"
#include "hilbert2/word.hpp"

namespace hilbert2 {

struct Params {
    int d = 1;
    int n = 2;
    int guard = 16;
    long window = 0;  // 0 selects the series default
    bool recheck = true;

    int precision() const { return n + guard; }
    BigInt chi() const { return mp::pow(BigInt(5), 1u << (n - 2)); }

    void validate() const {
        if (d < 1 || d > 8) throw ConfigError("degree d must lie in [1, 8]");
        if (n < 2 || n > 8) throw ConfigError("level n must lie in [2, 8]");
        if (guard < 8) throw ConfigError("guard must be at least 8 bits");
        if (2 * n + 4 * guard > kMaxPrecision) throw ConfigError("guard too large for the supported precision");
    }
};

struct Certificate {
    int guard_consumed = 0;
    std::optional<bool> paths_agreed;
    int recheck_precision = 0;  // 0 when no recheck ran
};

struct SymbolValue {
    std::uint64_t value = 0;
    std::uint64_t modulus = 0;
    Certificate certificate;
};

// A class a (x) eps^k, kept as its representative.
template <class W>
struct TwistedClass {
    Series<W> rep;
};

// A (phi, gamma) 1-cochain (m, n).
template <class W>
struct Cochain {
    Series<W> m;
    Series<W> n;
};

// ---------------------------------------------------------------------------
// 2-adic helpers on plain integers

namespace detail {

inline BigInt big_mask(int bits) { return (BigInt(1) << bits) - 1; }

inline BigInt big_odd_inverse(const BigInt& u, int bits) {
    const BigInt m = big_mask(bits);
    BigInt x = u & m;
    for (int good = 3; good < bits; good *= 2) x = (x * (2 - u * x)) & m;
    return x & m;
}

inline int big_v2(const BigInt& z) { return z == 0 ? -1 : static_cast<int>(mp::lsb(z)); }

// log a modulo 2^bits for a = 1 mod 4.
inline BigInt integer_log(const BigInt& a, int bits) {
    const BigInt z = a - 1;
    const int v = big_v2(z);
    if (v < 2) throw DomainError("integer log needs a = 1 mod 4");
    const int work = bits + 64;
    const BigInt wm = big_mask(work);
    const BigInt m = big_mask(bits);
    BigInt acc = 0;
    BigInt p = 1;
    for (long k = 1;; ++k) {
        int lg = 0;
        while ((2L << lg) <= k) ++lg;
        if (static_cast<long>(v) * k - lg >= bits) break;
        p = (p * z) & wm;
        long u = k;
        int s = 0;
        while ((u & 1) == 0) {
            u >>= 1;
            ++s;
        }
        BigInt term = ((p >> s) * big_odd_inverse(BigInt(u), bits)) & m;
        if (k % 2 == 1)
            acc += term;
        else
            acc -= term;
    }
    return ((acc % (BigInt(1) << bits)) + (BigInt(1) << bits)) & m;
}

template <class W>
Scaled<ZMod2k<W>> trace_of(const Scaled<CoeffElem<W>>& a) {
    const auto& R = a.numerator().ring();
    ZMod2k<W> t{R.trace(a.numerator().data()), R.precision()};
    return Scaled<ZMod2k<W>>(t, a.scale(), a.abs_precision());
}

template <class W>
Scaled<ZMod2k<W>> exact_int(const BigInt& v, int bits) {
    return Scaled<ZMod2k<W>>::exact(ZMod2k<W>::from_big(v, bits));
}

}  // namespace detail

// (chi - 1) / log chi modulo 2^n.
inline std::uint64_t chi_unit_factor(const Params& p) {
    if (p.n < 2 || p.n > 62) throw ConfigError("level n out of range");
    const int bits = p.n + p.guard;
    const BigInt chi = p.chi();
    // log chi = 2^n * l with l a unit; (chi - 1)/log chi = ((chi - 1)/2^n) / l.
    const BigInt lg = detail::integer_log(chi, bits + p.n);
    if (detail::big_v2(lg) != p.n) throw InternalError("log chi does not have valuation n");
    const BigInt l = lg >> p.n;
    const BigInt q = (chi - 1) >> p.n;
    const BigInt r = (q * detail::big_odd_inverse(l, bits)) & detail::big_mask(p.n);
    return static_cast<std::uint64_t>(r);
}

// ---------------------------------------------------------------------------

// All contexts for one (d, n, guard) at word type W, with the symbol paths.
template <class W>
class SymbolEngine {
public:
    struct UnitData {
        Series<W> lift;
        Series<W> log;  // (phi/2 - 1) log f
        Series<W> dlog;
        Series<W> y;
        Series<W> phi_dlog;
        Series<W> phi_y;
    };
    struct PathResult {
        std::uint64_t value = 0;
        int abs = 0;  // bits of the final value that are certified
    };

    SymbolEngine(int d, int n, int guard, long window = 0)
        : n_(n), guard_(guard), ring_(CoeffRing<W>::create(d, n + guard)),
          series_(SeriesContext<W>::create(ring_, n, window)), field_(KnContext<W>::create(ring_, n)) {
        const int M = n + guard;
        const BigInt chi = series_->chi();
        const BigInt lg = detail::integer_log(chi, M + n);
        if (detail::big_v2(lg) != n) throw InternalError("log chi does not have valuation n");
        tr_factor_ = ZMod2k<W>::from_big(detail::big_odd_inverse(lg >> n, M), M);
        chi_ = ZMod2k<W>::from_big(chi, M);
        chi_minus_one_ = ZMod2k<W>::from_big(chi - 1, M);
        chi_minus_one_over_q_ = ZMod2k<W>::from_big((chi - 1) >> n, M);
    }

    int level() const { return n_; }
    int guard() const { return guard_; }
    int precision() const { return ring_->precision(); }
    const CoeffRing<W>& ring() const { return *ring_; }
    const SeriesContext<W>& series() const { return *series_; }
    const KnContext<W>& field() const { return *field_; }
    std::uint64_t modulus() const { return std::uint64_t(1) << n_; }

    template <class W2>
    KnElem<W> import(const KnElem<W2>& x) const {
        return import_element<W>(x, *field_);
    }

    Series<W> lift(const KnElem<W>& x) const { return lift_unit(x, *series_); }

    UnitData prepare(const Series<W>& f) const {
        UnitData u{f, frobenius_log(f), dlog(f), Series<W>::zero(*series_), Series<W>::zero(*series_),
                   Series<W>::zero(*series_)};
        u.y = coboundary_from_log(u.log);
        u.phi_dlog = frobenius(u.dlog);
        u.phi_y = frobenius(u.y);
        return u;
    }
    UnitData prepare(const KnElem<W>& x) const { return prepare(lift(x)); }

    // -(1 + 2^(n-1)) Tr Res(A w) - 2^n Tr Res(B w) with w = 1/(pi (1+X)).
    Scaled<ZMod2k<W>> main_value(const UnitData& a, const UnitData& b) const {
        const Series<W>& w = series_->residue_kernel();
        const Series<W> A = a.dlog * b.log - a.log * b.phi_dlog;
        const Series<W> B = a.log * b.phi_y - a.y * b.log;
        const auto t1 = detail::trace_of(residue_of_product(A, w));
        const auto t2 = detail::trace_of(residue_of_product(B, w));
        const int M = precision();
        const auto c = detail::exact_int<W>(BigInt(1) + (BigInt(1) << (n_ - 1)), M);
        return -(c * t1) - t2.times_pow2(n_);
    }

    PathResult evaluate(const UnitData& a, const UnitData& b) const { return reduce(main_value(a, b)); }
    PathResult evaluate(const KnElem<W>& x, const KnElem<W>& y) const { return evaluate(prepare(x), prepare(y)); }

    // Cocycle representative of the Kummer class of x, up to O_K[[X]] terms
    // that the residue never sees.
    Cochain<W> kummer_cochain(const UnitData& u) const {
        Series<W> m = u.log * series_->pi_inverse();
        Series<W> nn = u.dlog.mul_coeff(ring_->from_word(chi_minus_one_over_q_.value)) -
                       u.y.mul_coeff(ring_->from_word(chi_minus_one_.value));
        return {std::move(m), std::move(nn)};
    }

    // (m1, n1) cup (m2, n2) = n1 chi gamma(m2) - m1 phi(n2); the gamma on a
    // once-twisted class carries one factor chi.
    TwistedClass<W> cup_product(const Cochain<W>& c1, const Cochain<W>& c2) const {
        Series<W> first = c1.n * cyclotomic_action(c2.m).mul_coeff(ring_->from_word(chi_.value));
        Series<W> second = c1.m * frobenius(c2.n);
        return {first - second};
    }

    // -(2^n / log chi) Tr Res(a / (1+X)).
    Scaled<ZMod2k<W>> tr_map(const TwistedClass<W>& c) const {
        const auto t = detail::trace_of(residue_of_product(c.rep, series_->one_plus_variable_inverse()));
        return -(Scaled<ZMod2k<W>>::exact(tr_factor_) * t);
    }

    PathResult evaluate_cup(const UnitData& a, const UnitData& b) const {
        return reduce(tr_map(cup_product(kummer_cochain(a), kummer_cochain(b))));
    }
    PathResult evaluate_cup(const KnElem<W>& x, const KnElem<W>& y) const {
        return evaluate_cup(prepare(x), prepare(y));
    }

    // Reduction of an integral value modulo 2^n, refusing uncertified digits.
    PathResult reduce(const Scaled<ZMod2k<W>>& v) const {
        if (v.abs_precision() <= n_)
            throw PrecisionError("guard exhausted: only " + std::to_string(std::max(v.abs_precision(), 0)) +
                                 " certified bits");
        if (v.scale() != 0) throw InternalError("symbol value is not integral");
        return {v.numerator().mod_pow2(n_), v.abs_precision()};
    }

private:
    int n_;
    int guard_;
    std::shared_ptr<const CoeffRing<W>> ring_;
    std::shared_ptr<const SeriesContext<W>> series_;
    std::shared_ptr<const KnContext<W>> field_;
    ZMod2k<W> tr_factor_, chi_, chi_minus_one_, chi_minus_one_over_q_;
};

// -((1 + 2^(n-1)) / 2^n) Tr log x, evaluated in its own K_n context with n
// extra bits so that the division by 2^n keeps the guard.
template <class W>
class ArtinHasseEngine {
public:
    ArtinHasseEngine(int d, int n, int guard)
        : n_(n), guard_(guard), ring_(CoeffRing<W>::create(d, 2 * n + guard)),
          field_(KnContext<W>::create(ring_, n)) {}

    const KnContext<W>& field() const { return *field_; }
    int precision() const { return ring_->precision(); }

    template <class W2>
    KnElem<W> import(const KnElem<W2>& x) const {
        return import_element<W>(x, *field_);
    }

    typename SymbolEngine<W>::PathResult evaluate(const KnElem<W>& x) const {
        const auto T = kn_trace(kn_log(x));
        if (T.v2() < n_ && T.abs_precision() > n_) throw InternalError("trace of log is not divisible by 2^n");
        const auto q = T.times_pow2(-n_);
        const auto c = detail::exact_int<W>(BigInt(1) + (BigInt(1) << (n_ - 1)), precision());
        const auto v = -(c * q);
        if (v.abs_precision() <= n_) throw PrecisionError("guard exhausted in the Artin-Hasse form");
        if (v.scale() != 0) throw InternalError("Artin-Hasse value is not integral");
        // Report consumption against the n + G budget of the main path.
        return {v.numerator().mod_pow2(n_), v.abs_precision()};
    }

private:
    int n_;
    int guard_;
    std::shared_ptr<const CoeffRing<W>> ring_;
    std::shared_ptr<const KnContext<W>> field_;
};

// ---------------------------------------------------------------------------
// Certified entry points: compute at guard G (retrying once at 2G), then
// recompute at twice the guard used and require the same class.

enum class Paths { main, cup, both };

struct SymbolReport {
    SymbolValue main;
    std::optional<SymbolValue> cup;
};

namespace detail {

struct RawPaths {
    std::optional<std::uint64_t> main, cup;
    int abs = 0;
};

template <class Win>
RawPaths run_paths(const KnElem<Win>& x, const KnElem<Win>& y, const Params& p, int guard, Paths paths) {
    return with_word(p.n + guard, [&]<class W>() {
        SymbolEngine<W> eng(p.d, p.n, guard, p.window);
        const auto ux = eng.prepare(eng.import(x));
        const auto uy = eng.prepare(eng.import(y));
        RawPaths r;
        int abs = 1 << 30;
        if (paths != Paths::cup) {
            auto m = eng.evaluate(ux, uy);
            r.main = m.value;
            abs = std::min(abs, m.abs);
        }
        if (paths != Paths::main) {
            auto c = eng.evaluate_cup(ux, uy);
            r.cup = c.value;
            abs = std::min(abs, c.abs);
        }
        r.abs = abs;
        return r;
    });
}

template <class F>
auto certified(const Params& p, F&& run) {
    p.validate();
    int g = p.guard;
    std::optional<decltype(run(g))> first;
    try {
        first = run(g);
    } catch (const PrecisionError&) {
        g *= 2;
        first = run(g);
    }
    int recheck = 0;
    if (p.recheck) {
        auto again = run(2 * g);
        if (!(again.main == first->main) || !(again.cup == first->cup))
            throw PrecisionError("recheck at doubled guard changed the class");
        recheck = p.n + 2 * g;
    }
    const int consumed = (p.n + g) - first->abs;
    return std::make_tuple(*first, consumed, recheck);
}

}  // namespace detail

template <class Win>
SymbolReport evaluate_symbol(const KnElem<Win>& x, const KnElem<Win>& y, const Params& p, Paths paths) {
    if (!is_principal_unit(x) || !is_principal_unit(y)) throw DomainError("inputs must be principal units");
    auto [raw, consumed, recheck] =
        detail::certified(p, [&](int g) { return detail::run_paths(x, y, p, g, paths); });
    const std::uint64_t q = std::uint64_t(1) << p.n;
    std::optional<bool> agreed;
    if (paths == Paths::both) agreed = *raw.main == *raw.cup;
    SymbolReport rep;
    Certificate cert{consumed, agreed, recheck};
    if (raw.main) rep.main = SymbolValue{*raw.main, q, cert};
    if (raw.cup) {
        rep.cup = SymbolValue{*raw.cup, q, cert};
        if (!raw.main) rep.main = *rep.cup;
    }
    return rep;
}

template <class Win>
SymbolValue hilbert_symbol(const KnElem<Win>& x, const KnElem<Win>& y, const Params& p) {
    return evaluate_symbol(x, y, p, Paths::main).main;
}

// The cup-product path, cross-checked against the main formula.
template <class Win>
SymbolValue symbol_via_cup(const KnElem<Win>& x, const KnElem<Win>& y, const Params& p) {
    return *evaluate_symbol(x, y, p, Paths::both).cup;
}

template <class Win>
SymbolValue artin_hasse(const KnElem<Win>& x, const Params& p) {
    if (!is_principal_unit(x)) throw DomainError("input must be a principal unit");
    struct Raw {
        std::optional<std::uint64_t> main, cup;
        int abs = 0;
    };
    auto [raw, consumed, recheck] = detail::certified(p, [&](int g) {
        return with_word(2 * p.n + g, [&]<class W>() {
            ArtinHasseEngine<W> eng(p.d, p.n, g);
            auto r = eng.evaluate(eng.import(x));
            // The engine carries n more bits than the main path.
            return Raw{r.value, std::nullopt, r.abs};
        });
    });
    return SymbolValue{*raw.main, std::uint64_t(1) << p.n, Certificate{consumed, std::nullopt, recheck}};
}

}  // namespace hilbert2
