#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hilbert2/coeff.hpp"
#include "hilbert2/error.hpp"
#include "hilbert2/scaled.hpp"
#include "hilbert2/word.hpp"

namespace hilbert2 {

template <class W>
class SeriesContext;

// Exponent bound meaning "no pi_n-adic truncation".
inline constexpr long kExact = std::numeric_limits<long>::max() / 4;

inline long add_exponents(long a, long b) {
    if (a >= kExact || b >= kExact) return kExact;
    return a + b;
}

// Truncated Laurent series sum_e a_e X^e over O_K/2^M, X standing for pi_n.
//
// The value is 2^-scale * sum_e c_e X^e with numerators c_e. It is known
// modulo 2^abs (2-adically) and for exponents below prec (X-adically).
// Stored coefficients cover [lo, lo + size) with nonzero ends, all inside the
// window [-N, N].
template <class W>
class Series {
public:
    using Context = SeriesContext<W>;

    explicit Series(const Context& ctx);

    static Series zero(const Context& ctx) { return Series(ctx); }
    static Series constant(const CoeffElem<W>& c, const Context& ctx) { return monomial(c, 0, ctx); }
    static Series from_int(long long v, const Context& ctx);
    static Series monomial(const CoeffElem<W>& c, long e, const Context& ctx);
    static Series variable(const Context& ctx);
    // sum_i coeffs[i] X^(lo + i), exact.
    static Series from_coeffs(const Context& ctx, long lo, const std::vector<CoeffElem<W>>& coeffs);
    static Series from_ints(const Context& ctx, long lo, const std::vector<long long>& coeffs);

    const Context& context() const { return *ctx_; }
    const CoeffRing<W>& ring() const;
    int degree() const;

    bool is_zero() const { return c_.empty(); }
    long lo() const { return c_.empty() ? prec_ : lo_; }
    long hi() const { return c_.empty() ? lo() - 1 : lo_ + size() - 1; }
    long size() const { return c_.empty() ? 0 : static_cast<long>(c_.size()) / degree(); }
    long prec() const { return prec_; }
    bool exact() const { return prec_ >= kExact; }
    int scale() const { return scale_; }
    int abs_precision() const { return abs_; }
    // pi_n-adic valuation: lowest nonzero exponent, or prec for zero.
    long valuation() const { return lo(); }
    // 2-adic valuation of the value (abs for zero).
    int v2() const;

    // Numerator of the coefficient of X^e.
    CoeffElem<W> coefficient(long e) const;
    // Value of the coefficient of X^e with its scale and precision.
    Scaled<CoeffElem<W>> scaled_coefficient(long e) const;

    friend Series operator+(const Series& a, const Series& b) { return combine(a, b, false); }
    friend Series operator-(const Series& a, const Series& b) { return combine(a, b, true); }
    friend Series operator*(const Series& a, const Series& b) { return multiply(a, b); }
    Series operator-() const;
    Series& operator+=(const Series& b) { return *this = *this + b; }
    Series& operator-=(const Series& b) { return *this = *this - b; }
    Series& operator*=(const Series& b) { return *this = *this * b; }

    Series mul_int(long long k) const;
    Series mul_coeff(const CoeffElem<W>& c) const;
    // Multiply the value by 2^k (k may be negative).
    Series times_pow2(int k) const;
    Series half() const { return times_pow2(-1); }
    // Multiply by X^k.
    Series shift(long k) const;
    // Keep exponents below e; the result is known only below e.
    Series truncate(long e) const;
    // Restrict to exponents < 0 or >= 0 (prec is kept where meaningful).
    Series negative_part() const;
    Series nonnegative_part() const;

    // Representation equality after canonicalization.
    friend bool operator==(const Series& a, const Series& b) {
        return a.ctx_ == b.ctx_ && a.lo_ == b.lo_ && a.c_ == b.c_ && a.prec_ == b.prec_ &&
               a.scale_ == b.scale_ && a.abs_ == b.abs_;
    }
    // Equality of values at the common 2-adic and pi_n-adic precision.
    friend bool equal_within(const Series& a, const Series& b) { return (a - b).is_zero(); }

    std::string str() const;

    // Raw access for kernels in this module.
    const std::vector<W>& raw() const { return c_; }
    static Series from_raw(const Context& ctx, long lo, std::vector<W> c, long prec, int scale, int abs) {
        Series s(ctx);
        s.lo_ = lo;
        s.c_ = std::move(c);
        s.prec_ = prec;
        s.scale_ = scale;
        s.abs_ = abs;
        s.normalize();
        return s;
    }

private:
    static Series combine(const Series& a, const Series& b, bool subtract);
    static Series multiply(const Series& a, const Series& b);
    void normalize();

    const Context* ctx_;
    long lo_ = 0;
    std::vector<W> c_;
    long prec_ = kExact;
    int scale_ = 0;
    int abs_ = 0;
};

// Series over O_K/2^M at level n with exponent window [-N, N]. Holds the
// constants the operators need. Immutable; must outlive its series.
template <class W>
class SeriesContext {
public:
    static std::shared_ptr<const SeriesContext> create(std::shared_ptr<const CoeffRing<W>> ring, int n,
                                                       long window = 0) {
        return std::shared_ptr<const SeriesContext>(new SeriesContext(std::move(ring), n, window));
    }
    static long default_window(int n, int M) { return (1L << n) * (M + 1); }

    SeriesContext(const SeriesContext&) = delete;
    SeriesContext& operator=(const SeriesContext&) = delete;

    const CoeffRing<W>& ring() const { return *ring_; }
    std::shared_ptr<const CoeffRing<W>> ring_handle() const { return ring_; }
    int level() const { return n_; }
    int precision() const { return ring_->precision(); }
    long window() const { return N_; }
    // chi = 5^(2^(n-2)) as an exact integer.
    const BigInt& chi() const { return chi_; }

    // phi(X) = X^2 + 2X and its inverse.
    const Series<W>& frobenius_image() const { return *phi_x_; }
    const Series<W>& frobenius_image_inverse() const { return *phi_x_inv_; }
    // gamma(X) = (1+X)^chi - 1 and its inverse.
    const Series<W>& galois_image() const { return *gamma_x_; }
    const Series<W>& galois_image_inverse() const { return *gamma_x_inv_; }
    // pi = (1+X)^(2^n) - 1, 1/pi, 1/(1+X), and 1/(pi (1+X)).
    const Series<W>& pi() const { return *pi_; }
    const Series<W>& pi_inverse() const { return *pi_inv_; }
    const Series<W>& one_plus_variable_inverse() const { return *one_plus_x_inv_; }
    const Series<W>& residue_kernel() const { return *kernel_; }

private:
    SeriesContext(std::shared_ptr<const CoeffRing<W>> ring, int n, long window);

    std::shared_ptr<const CoeffRing<W>> ring_;
    int n_;
    long N_;
    BigInt chi_;
    std::optional<Series<W>> phi_x_, phi_x_inv_, gamma_x_, gamma_x_inv_, pi_, pi_inv_, one_plus_x_inv_, kernel_;
};

// ---------------------------------------------------------------------------
// Series members

template <class W>
Series<W>::Series(const Context& ctx) : ctx_(&ctx), abs_(ctx.precision()) {}

template <class W>
const CoeffRing<W>& Series<W>::ring() const {
    return ctx_->ring();
}

template <class W>
int Series<W>::degree() const {
    return ctx_->ring().degree();
}

template <class W>
Series<W> Series<W>::from_int(long long v, const Context& ctx) {
    return constant(ctx.ring().from_int(v), ctx);
}

template <class W>
Series<W> Series<W>::monomial(const CoeffElem<W>& c, long e, const Context& ctx) {
    if (c.ring_ptr() != &ctx.ring()) throw ContextMismatch();
    std::vector<W> raw(c.data(), c.data() + ctx.ring().degree());
    return from_raw(ctx, e, std::move(raw), kExact, 0, ctx.precision());
}

template <class W>
Series<W> Series<W>::variable(const Context& ctx) {
    return monomial(ctx.ring().one(), 1, ctx);
}

template <class W>
Series<W> Series<W>::from_coeffs(const Context& ctx, long lo, const std::vector<CoeffElem<W>>& coeffs) {
    const int d = ctx.ring().degree();
    std::vector<W> raw(coeffs.size() * d);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i].ring_ptr() != &ctx.ring()) throw ContextMismatch();
        for (int k = 0; k < d; ++k) raw[i * d + k] = coeffs[i][k];
    }
    return from_raw(ctx, lo, std::move(raw), kExact, 0, ctx.precision());
}

template <class W>
Series<W> Series<W>::from_ints(const Context& ctx, long lo, const std::vector<long long>& coeffs) {
    std::vector<CoeffElem<W>> c;
    c.reserve(coeffs.size());
    for (long long v : coeffs) c.push_back(ctx.ring().from_int(v));
    return from_coeffs(ctx, lo, c);
}

template <class W>
int Series<W>::v2() const {
    if (c_.empty()) return abs_;
    int v = ctx_->precision();
    for (const W& x : c_)
        if (x != W(0)) v = std::min(v, lowest_bit(x));
    return v - scale_;
}

template <class W>
CoeffElem<W> Series<W>::coefficient(long e) const {
    if (e >= prec_) throw WindowExhausted("coefficient of X^" + std::to_string(e) + " is beyond the known precision");
    CoeffElem<W> r(ring());
    if (c_.empty() || e < lo_ || e > hi()) return r;
    const int d = degree();
    for (int k = 0; k < d; ++k) r[k] = c_[(e - lo_) * d + k];
    return r;
}

template <class W>
Scaled<CoeffElem<W>> Series<W>::scaled_coefficient(long e) const {
    return Scaled<CoeffElem<W>>(coefficient(e), scale_, abs_);
}

template <class W>
void Series<W>::normalize() {
    const int M = ctx_->precision();
    const long N = ctx_->window();
    const int d = degree();
    if (scale_ < 0) {
        const int k = -scale_;
        for (W& x : c_) x = k >= M ? W(0) : W((x << k) & ctx_->ring().mask());
        scale_ = 0;
    }
    if (scale_ > M) throw PrecisionError("scale exceeds working precision");
    abs_ = std::min(abs_, M - scale_);
    if (abs_ < 1) throw PrecisionError("2-adic precision exhausted");
    if (prec_ < kExact) prec_ = std::min(prec_, N + 1);
    const W m = low_mask<W>(abs_ + scale_);
    for (W& x : c_) x &= m;

    long len = static_cast<long>(c_.size()) / d;
    // Drop exponents at or beyond prec.
    if (prec_ < kExact && lo_ + len > prec_) {
        len = std::max(0L, prec_ - lo_);
        c_.resize(len * d);
    }
    auto zero_at = [&](long i) {
        for (int k = 0; k < d; ++k)
            if (c_[i * d + k] != W(0)) return false;
        return true;
    };
    long first = 0;
    while (first < len && zero_at(first)) ++first;
    long last = len;
    while (last > first && zero_at(last - 1)) --last;
    if (first == last) {
        c_.clear();
        lo_ = 0;
        scale_ = 0;
        return;
    }
    if (first > 0 || last < len) {
        c_.erase(c_.begin() + last * d, c_.end());
        c_.erase(c_.begin(), c_.begin() + first * d);
        lo_ += first;
    }
    if (lo_ < -N) throw WindowExhausted("exponent below -N: window exhausted, increase N");
    if (lo_ + (last - first) - 1 > N) {
        // Terms above the window are dropped; the series is then known below N + 1.
        const long keep = std::max(0L, N + 1 - lo_);
        c_.resize(keep * d);
        prec_ = std::min(prec_, N + 1);
        while (!c_.empty()) {
            bool z = true;
            for (int k = 0; k < d; ++k)
                if (c_[c_.size() - d + k] != W(0)) z = false;
            if (!z) break;
            c_.resize(c_.size() - d);
        }
        if (c_.empty()) {
            lo_ = 0;
            scale_ = 0;
            return;
        }
    }
    while (scale_ > 0) {
        bool even = true;
        for (const W& x : c_)
            if (is_odd(x)) {
                even = false;
                break;
            }
        if (!even) break;
        for (W& x : c_) x >>= 1;
        --scale_;
    }
}

template <class W>
Series<W> Series<W>::combine(const Series& a, const Series& b, bool subtract) {
    if (a.ctx_ != b.ctx_) throw ContextMismatch();
    const Context& ctx = *a.ctx_;
    const int d = a.degree();
    const int M = ctx.precision();
    const int s = std::max(a.scale_, b.scale_);
    const long prec = std::min(a.prec_, b.prec_);
    const int abs = std::min(a.abs_, b.abs_);
    if (a.c_.empty() && b.c_.empty()) return from_raw(ctx, 0, {}, prec, 0, abs);
    long lo, hi;
    if (a.c_.empty()) {
        lo = b.lo_;
        hi = b.hi();
    } else if (b.c_.empty()) {
        lo = a.lo_;
        hi = a.hi();
    } else {
        lo = std::min(a.lo_, b.lo_);
        hi = std::max(a.hi(), b.hi());
    }
    hi = std::min(hi, prec - 1);
    if (hi < lo) return from_raw(ctx, 0, {}, prec, 0, abs);
    std::vector<W> out(static_cast<std::size_t>(hi - lo + 1) * d, W(0));
    const W mask = ctx.ring().mask();
    auto accumulate = [&](const Series& x, bool neg) {
        const int k = s - x.scale_;
        const long len = x.size();
        for (long i = 0; i < len; ++i) {
            const long e = x.lo_ + i;
            if (e > hi) break;
            for (int j = 0; j < d; ++j) {
                W v = k >= M ? W(0) : W(x.c_[i * d + j] << k);
                W& o = out[(e - lo) * d + j];
                o = neg ? W((o - v) & mask) : W((o + v) & mask);
            }
        }
    };
    accumulate(a, false);
    accumulate(b, subtract);
    return from_raw(ctx, lo, std::move(out), prec, s, abs);
}

template <class W>
Series<W> Series<W>::multiply(const Series& a, const Series& b) {
    if (a.ctx_ != b.ctx_) throw ContextMismatch();
    const Context& ctx = *a.ctx_;
    const CoeffRing<W>& R = ctx.ring();
    const int d = R.degree();
    const long N = ctx.window();
    const int scale = a.scale_ + b.scale_;
    const int abs = std::min(a.abs_ + b.v2(), b.abs_ + a.v2());
    long prec = std::min(add_exponents(a.prec_, b.valuation()), add_exponents(b.prec_, a.valuation()));
    if (a.c_.empty() || b.c_.empty()) return from_raw(ctx, 0, {}, prec, 0, std::min(abs, R.precision()));
    const long lo = a.lo_ + b.lo_;
    long hi = a.hi() + b.hi();
    if (hi > N) {
        hi = N;
        prec = std::min(prec, N + 1);
    }
    hi = std::min(hi, prec - 1);
    if (hi < lo) return from_raw(ctx, 0, {}, prec, 0, std::min(abs, R.precision()));
    const long len = hi - lo + 1;
    const long la = a.size(), lb = b.size();
    std::vector<W> out(static_cast<std::size_t>(len) * d, W(0));
    if (d == 1) {
        const W* pa = a.c_.data();
        const W* pb = b.c_.data();
        W* po = out.data();
        for (long i = 0; i < la && i < len; ++i) {
            const W ai = pa[i];
            if (ai == W(0)) continue;
            const long jmax = std::min(lb, len - i);
            for (long j = 0; j < jmax; ++j) po[i + j] += ai * pb[j];
        }
        const W mask = R.mask();
        for (W& x : out) x &= mask;
    } else {
        const int wd = 2 * d - 1;
        std::vector<W> acc(static_cast<std::size_t>(len) * wd, W(0));
        for (long i = 0; i < la && i < len; ++i) {
            const W* ai = &a.c_[i * d];
            bool zero = true;
            for (int k = 0; k < d; ++k)
                if (ai[k] != W(0)) zero = false;
            if (zero) continue;
            const long jmax = std::min(lb, len - i);
            for (long j = 0; j < jmax; ++j) R.mul_acc_wide(ai, &b.c_[j * d], &acc[(i + j) * wd]);
        }
        for (long k = 0; k < len; ++k) R.reduce_wide(&acc[k * wd], &out[k * d]);
    }
    // Coefficients below -N must vanish; anything else means the window is too small.
    long cut = 0;
    if (lo < -N) {
        cut = std::min(len, -N - lo);
        for (long k = 0; k < cut * d; ++k)
            if ((out[k] & low_mask<W>(std::min(abs + scale, R.precision()))) != W(0))
                throw WindowExhausted("product has exponent below -N: window exhausted, increase N");
        out.erase(out.begin(), out.begin() + cut * d);
    }
    return from_raw(ctx, lo + cut, std::move(out), prec, scale, abs);
}

template <class W>
Series<W> Series<W>::operator-() const {
    std::vector<W> out(c_.size());
    const W mask = ring().mask();
    for (std::size_t i = 0; i < c_.size(); ++i) out[i] = (W(0) - c_[i]) & mask;
    return from_raw(*ctx_, lo_, std::move(out), prec_, scale_, abs_);
}

template <class W>
Series<W> Series<W>::mul_int(long long k) const {
    if (k == 0) return from_raw(*ctx_, 0, {}, kExact, 0, ctx_->precision());
    int v = 0;
    unsigned long long u = k < 0 ? static_cast<unsigned long long>(-(k + 1)) + 1u : static_cast<unsigned long long>(k);
    while ((u & 1u) == 0) {
        u >>= 1;
        ++v;
    }
    const W mask = ring().mask();
    const W m = k < 0 ? W(W(0) - W(u)) : W(u);
    std::vector<W> out(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) out[i] = (c_[i] * m) & mask;
    return from_raw(*ctx_, lo_, std::move(out), prec_, scale_, abs_).times_pow2(v);
}

template <class W>
Series<W> Series<W>::mul_coeff(const CoeffElem<W>& c) const {
    if (c.ring_ptr() != &ring()) throw ContextMismatch();
    const int d = degree();
    std::vector<W> out(c_.size());
    for (long i = 0; i < size(); ++i) ring().mul(&c_[i * d], c.data(), &out[i * d]);
    return from_raw(*ctx_, lo_, std::move(out), prec_, scale_, abs_ + c.v2());
}

template <class W>
Series<W> Series<W>::times_pow2(int k) const {
    if (k <= 0 || k <= scale_) return from_raw(*ctx_, lo_, c_, prec_, scale_ - k, abs_ + k);
    const int sh = k - scale_;
    const int M = ctx_->precision();
    std::vector<W> out(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) out[i] = sh >= M ? W(0) : W((c_[i] << sh) & ring().mask());
    return from_raw(*ctx_, lo_, std::move(out), prec_, 0, abs_ + k);
}

template <class W>
Series<W> Series<W>::shift(long k) const {
    return from_raw(*ctx_, lo_ + k, c_, add_exponents(prec_, k), scale_, abs_);
}

template <class W>
Series<W> Series<W>::truncate(long e) const {
    return from_raw(*ctx_, lo_, c_, std::min(prec_, e), scale_, abs_);
}

template <class W>
Series<W> Series<W>::negative_part() const {
    if (c_.empty() || lo_ >= 0) return from_raw(*ctx_, 0, {}, kExact, 0, abs_);
    const long len = std::min(size(), -lo_);
    std::vector<W> out(c_.begin(), c_.begin() + len * degree());
    // Known negative coefficients stay known however far prec reaches.
    return from_raw(*ctx_, lo_, std::move(out), prec_ >= 0 ? kExact : prec_, scale_, abs_);
}

template <class W>
Series<W> Series<W>::nonnegative_part() const {
    if (c_.empty() || hi() < 0) return from_raw(*ctx_, 0, {}, prec_, 0, abs_);
    const long skip = std::max(0L, -lo_);
    std::vector<W> out(c_.begin() + skip * degree(), c_.end());
    return from_raw(*ctx_, lo_ + skip, std::move(out), prec_, scale_, abs_);
}

template <class W>
std::string Series<W>::str() const {
    std::string out;
    const int d = degree();
    for (long i = 0; i < size(); ++i) {
        CoeffElem<W> c(ring());
        for (int k = 0; k < d; ++k) c[k] = c_[i * d + k];
        if (c.is_zero()) continue;
        const long e = lo_ + i;
        std::string cs = c.str();
        std::string mon = e == 0 ? "" : e == 1 ? "X" : "X^" + std::to_string(e);
        std::string term;
        if (mon.empty())
            term = cs;
        else if (cs == "1")
            term = mon;
        else if (cs == "-1")
            term = "-" + mon;
        else
            term = cs + "*" + mon;
        if (!out.empty()) out += term[0] == '-' ? " - " + term.substr(1) : " + " + term;
        else out = term;
    }
    if (out.empty()) out = "0";
    if (scale_ > 0) out = "2^-" + std::to_string(scale_) + "*(" + out + ")";
    if (!exact()) out += " + O(X^" + std::to_string(prec_) + ")";
    return out;
}

// ---------------------------------------------------------------------------
// Operators on series

namespace detail {

// Apply a coefficient map to numerators, keeping scale and precision.
template <class W, class F>
Series<W> map_coefficients(const Series<W>& a, F&& f) {
    const int d = a.degree();
    std::vector<W> out(a.raw().size());
    for (long i = 0; i < a.size(); ++i) f(&a.raw()[i * d], &out[i * d]);
    return Series<W>::from_raw(a.context(), a.lo(), std::move(out), a.prec(), a.scale(), a.abs_precision());
}

// The numerators as a scale-0 series known modulo 2^(abs + scale).
template <class W>
Series<W> numerators(const Series<W>& a) {
    return Series<W>::from_raw(a.context(), a.lo(), a.raw(), a.prec(), 0, a.abs_precision() + a.scale());
}

// sum_{e<0} a_e sub_inv^(-e) by Horner in sub_inv; a scale 0.
template <class W>
Series<W> substitute_negative(const Series<W>& a, const Series<W>& sub_inv) {
    const auto& ctx = a.context();
    Series<W> r = Series<W>::zero(ctx);
    if (a.is_zero() || a.lo() >= 0) return r;
    for (long e = a.lo(); e <= -1; ++e) {
        if (e <= a.hi()) r = r + Series<W>::constant(a.coefficient(e), ctx);
        r = r * sub_inv;
    }
    // Constants were exact; restore the input's 2-adic precision.
    return Series<W>::from_raw(ctx, r.lo(), r.raw(), r.prec(), r.scale(),
                               std::min(r.abs_precision(), a.abs_precision()));
}

// sum_{e>=0} a_e sub^e by Horner in a general series sub with valuation 1.
template <class W>
Series<W> substitute_positive(const Series<W>& a, const Series<W>& sub) {
    const auto& ctx = a.context();
    Series<W> r = Series<W>::zero(ctx);
    if (a.is_zero() || a.hi() < 0) return r;
    for (long e = a.hi(); e >= std::max(a.lo(), 0L); --e) {
        r = r * sub;
        r = r + Series<W>::constant(a.coefficient(e), ctx);
    }
    for (long e = std::max(a.lo(), 0L) - 1; e >= 0; --e) r = r * sub;
    r = r.truncate(a.prec());
    return Series<W>::from_raw(ctx, r.lo(), r.raw(), r.prec(), r.scale(),
                               std::min(r.abs_precision(), a.abs_precision()));
}

// sum_{e>=0} a_e (X^2 + 2X)^e with a sparse Horner scheme; a scale 0.
template <class W>
Series<W> substitute_frobenius_positive(const Series<W>& a) {
    const auto& ctx = a.context();
    const auto& R = ctx.ring();
    const int d = R.degree();
    const long N = ctx.window();
    const W mask = R.mask();
    if (a.is_zero() || a.hi() < 0) return Series<W>::zero(ctx);
    const long start = std::max(a.lo(), 0L);
    std::vector<W> r, next;
    long deg = -1;  // r has exponents 0..deg
    bool truncated = false;
    for (long e = a.hi(); e >= 0; --e) {
        // r <- r * (X^2 + 2X)
        if (deg >= 0) {
            long nd = deg + 2;
            if (nd > N) {
                nd = N;
                truncated = true;
            }
            next.assign(static_cast<std::size_t>(nd + 1) * d, W(0));
            for (long k = 1; k <= nd; ++k) {
                for (int j = 0; j < d; ++j) {
                    W v(0);
                    if (k - 2 >= 0 && k - 2 <= deg) v += r[(k - 2) * d + j];
                    if (k - 1 <= deg) v += r[(k - 1) * d + j] << 1;
                    next[k * d + j] = v & mask;
                }
            }
            r.swap(next);
            deg = nd;
        }
        if (e >= start) {
            if (deg < 0) {
                r.assign(d, W(0));
                deg = 0;
            }
            CoeffElem<W> c = a.coefficient(e);
            for (int j = 0; j < d; ++j) r[j] = (r[j] + c[j]) & mask;
        }
    }
    long prec = a.prec();
    if (truncated) prec = std::min(prec, N + 1);
    return Series<W>::from_raw(ctx, 0, std::move(r), prec, 0, a.abs_precision());
}

}  // namespace detail

// The Frobenius lift phi: sigma on coefficients and X -> (1+X)^2 - 1.
template <class W>
Series<W> frobenius(const Series<W>& a) {
    const auto& ctx = a.context();
    const auto& R = ctx.ring();
    Series<W> num = detail::map_coefficients(detail::numerators(a), [&](const W* x, W* y) { R.frobenius(x, y); });
    Series<W> pos = detail::substitute_frobenius_positive(num.nonnegative_part());
    Series<W> neg = detail::substitute_negative(num.negative_part(), ctx.frobenius_image_inverse());
    return (pos + neg).times_pow2(-a.scale());
}

// The generator gamma of Gamma_n: X -> (1+X)^chi - 1, trivial on O_K.
template <class W>
Series<W> cyclotomic_action(const Series<W>& a) {
    const auto& ctx = a.context();
    Series<W> num = detail::numerators(a);
    Series<W> pos = detail::substitute_positive(num.nonnegative_part(), ctx.galois_image());
    Series<W> neg = detail::substitute_negative(num.negative_part(), ctx.galois_image_inverse());
    return (pos + neg).times_pow2(-a.scale());
}

// D = (1+X) d/dX.
template <class W>
Series<W> invariant_derivation(const Series<W>& a) {
    const auto& ctx = a.context();
    const auto& R = ctx.ring();
    const int d = R.degree();
    if (a.is_zero()) return Series<W>::from_raw(ctx, 0, {}, a.exact() ? kExact : a.prec() - 1, 0, a.abs_precision());
    // Coefficient of X^k is (k+1) a_{k+1} + k a_k.
    const long lo = a.lo() - 1, hi = a.hi();
    std::vector<W> out(static_cast<std::size_t>(hi - lo + 1) * d, W(0));
    for (long e = a.lo(); e <= a.hi(); ++e) {
        CoeffElem<W> c = a.coefficient(e);
        const W k = word_from_int<W>(e);
        for (int j = 0; j < d; ++j) {
            W v = c[j] * k;
            out[(e - 1 - lo) * d + j] += v;
            out[(e - lo) * d + j] += v;
        }
    }
    for (W& x : out) x &= R.mask();
    return Series<W>::from_raw(ctx, lo, std::move(out), a.exact() ? kExact : a.prec() - 1, a.scale(),
                               a.abs_precision());
}

// Coefficient of X^-1 with its scale.
template <class W>
Scaled<CoeffElem<W>> residue(const Series<W>& a) {
    if (a.prec() < 0) throw WindowExhausted("residue is beyond the known precision: increase N");
    return a.scaled_coefficient(-1);
}

// Residue of a*b without forming the whole product.
template <class W>
Scaled<CoeffElem<W>> residue_of_product(const Series<W>& a, const Series<W>& b) {
    if (&a.context() != &b.context()) throw ContextMismatch();
    const auto& R = a.ring();
    const long prec = std::min(add_exponents(a.prec(), b.valuation()), add_exponents(b.prec(), a.valuation()));
    if (prec < 0) throw WindowExhausted("residue is beyond the known precision: increase N");
    const int abs = std::min(a.abs_precision() + b.v2(), b.abs_precision() + a.v2());
    const int scale = a.scale() + b.scale();
    CoeffElem<W> r(R);
    if (!a.is_zero() && !b.is_zero()) {
        const int d = R.degree();
        std::array<W, 2 * CoeffElem<W>::kMaxDegree - 1> acc{};
        for (long e = a.lo(); e <= a.hi(); ++e) {
            const long f = -1 - e;
            if (f < b.lo() || f > b.hi()) continue;
            const W* x = &a.raw()[(e - a.lo()) * d];
            const W* y = &b.raw()[(f - b.lo()) * d];
            if (d == 1)
                acc[0] += x[0] * y[0];
            else
                R.mul_acc_wide(x, y, acc.data());
        }
        if (d == 1)
            r[0] = acc[0] & R.mask();
        else
            R.reduce_wide(acc.data(), r.data());
    }
    return Scaled<CoeffElem<W>>(r, scale, abs);
}

namespace detail {

// Inverse of a power series with unit constant term: invert modulo 2 over the
// residue field, then Newton t <- t(2 - b t).
template <class W>
Series<W> invert_unit_power_series(const Series<W>& b) {
    const auto& ctx = b.context();
    const auto& R = ctx.ring();
    const long N = ctx.window();
    if (b.exact() && b.lo() == 0 && b.hi() == 0) {
        // A constant has a constant inverse.
        return Series<W>::constant(inv(b.coefficient(0)), ctx);
    }
    const long top = std::min(N, b.prec() - 1);
    // Mod-2 inverse: t_0 = c_0^-1, t_k = c_0^-1 * sum_{j>=1} c_j t_{k-j} (signs vanish mod 2).
    CoeffElem<W> c0inv = inv(b.coefficient(0)).truncated(1);
    std::vector<CoeffElem<W>> bc(top + 1, R.zero()), t(top + 1, R.zero());
    for (long k = 0; k <= top && k <= b.hi(); ++k) bc[k] = b.coefficient(k).truncated(1);
    t[0] = c0inv;
    for (long k = 1; k <= top; ++k) {
        CoeffElem<W> s = R.zero();
        for (long j = 1; j <= k && j <= b.hi(); ++j)
            if (!bc[j].is_zero()) s += bc[j] * t[k - j];
        t[k] = (c0inv * s).truncated(1);
    }
    Series<W> x = Series<W>::from_coeffs(ctx, 0, t).truncate(std::min(b.prec(), N + 1));
    const Series<W> two = Series<W>::from_int(2, ctx);
    for (int good = 1; good < b.abs_precision(); good *= 2) x = x * (two - b * x);
    return x;
}

}  // namespace detail

// Inverse in the Laurent series ring.
//
// With v the lowest exponent carrying a unit coefficient, a = X^v b where the
// negative part of b is divisible by 2. The power-series part b+ is inverted
// by the mod-2 inverse plus Newton lifting, and the even tail by the
// geometric series in eps = b+^-1 b-.
template <class W>
Series<W> invert(const Series<W>& a) {
    const auto& ctx = a.context();
    if (a.is_zero() || a.scale() != 0) throw NotInvertible("not invertible: series is zero modulo 2");
    long v = kExact;
    for (long e = a.lo(); e <= a.hi(); ++e)
        if (a.coefficient(e).is_unit()) {
            v = e;
            break;
        }
    if (v == kExact) throw NotInvertible("not invertible: series is zero modulo 2");
    const Series<W> b = a.shift(-v);
    const Series<W> bplus = b.nonnegative_part();
    const Series<W> bminus = b.negative_part();
    Series<W> t = detail::invert_unit_power_series(bplus);
    if (!bminus.is_zero()) {
        const Series<W> eps = t * bminus;
        Series<W> term = Series<W>::from_int(1, ctx);
        Series<W> sum = term;
        // eps is divisible by 2^v, and so is the part of eps^k hidden above
        // its known exponents; terms from k = ceil(M / v) on vanish.
        const int v2 = bminus.v2();
        const int steps = (ctx.precision() + v2 - 1) / v2;
        for (int k = 1; k < steps; ++k) {
            term = -(term * eps);
            sum += term;
            if (term.is_zero() && term.exact()) break;
        }
        t = t * sum;
    }
    t = t.shift(-v);
    return Series<W>::from_raw(ctx, t.lo(), t.raw(), t.prec(), t.scale(),
                               std::min(t.abs_precision(), a.abs_precision()));
}

// (1+X)^(2^(n-k)) - 1: pi_n at k = n, pi at k = 0.
template <class W>
Series<W> level_variable(const SeriesContext<W>& ctx, int k) {
    if (k < 0 || k > ctx.level()) throw DomainError("level must lie in [0, n]");
    Series<W> one = Series<W>::from_int(1, ctx);
    Series<W> z = one + Series<W>::variable(ctx);
    for (int i = 0; i < ctx.level() - k; ++i) z = z * z;
    return z - one;
}

// log f = sum_{m>=1} (-1)^(m+1) (f-1)^m / m for f in 1 + X O_K[[X]].
template <class W>
Series<W> log_series(const Series<W>& f) {
    const auto& ctx = f.context();
    if (f.scale() != 0 || f.lo() < 0) throw DomainError("log series needs an integral power series");
    if (!(f.coefficient(0) == ctx.ring().one())) throw DomainError("log series needs constant term 1");
    const Series<W> g = f - Series<W>::from_int(1, ctx);
    Series<W> acc = g;
    Series<W> p = g;
    const int M = ctx.precision();
    const int vg = g.v2();
    for (long m = 2; m <= ctx.window() + 1; ++m) {
        p = p * g;
        if (p.is_zero()) {
            // g^j for j >= m is zero below prec(p) modulo 2^(abs(p) + (j - m) vg);
            // dividing by j costs v2(j) bits.
            long bound = M;
            for (long j = m; j <= std::min(ctx.window(), p.prec()); ++j) {
                const long gain = p.abs_precision() + (j - m) * vg;
                if (gain - 64 >= M) break;
                bound = std::min(bound, gain - std::countr_zero(static_cast<unsigned long>(j)));
            }
            if (bound < 1) throw PrecisionError("log series lost all 2-adic precision");
            acc += Series<W>::from_raw(ctx, 0, {}, p.prec(), 0, static_cast<int>(bound));
            break;
        }
        long u = m;
        int v = 0;
        while ((u & 1) == 0) {
            u >>= 1;
            ++v;
        }
        CoeffElem<W> uinv = ctx.ring().from_word(odd_inverse(W(static_cast<std::uint64_t>(u)), M));
        Series<W> term = p.mul_coeff(uinv).times_pow2(-v);
        if (m % 2 == 0)
            acc -= term;
        else
            acc += term;
    }
    return acc;
}

namespace detail {
template <class W>
void require_principal_power_series(const Series<W>& f) {
    if (f.scale() != 0 || f.lo() < 0 || !(f.coefficient(0) == f.ring().one()))
        throw DomainError("expected a power series in 1 + X O_K[[X]]");
}
}  // namespace detail

// (phi/2 - 1) log f, computed as half the log of the unit phi(f)/f^2, which
// is congruent to 1 modulo 2 so its log series converges 2-adically fast.
template <class W>
Series<W> frobenius_log(const Series<W>& f) {
    detail::require_principal_power_series(f);
    const Series<W> finv = invert(f);
    const Series<W> u = frobenius(f) * (finv * finv);
    Series<W> L = log_series(u).half();
    if (L.scale() != 0) throw PrecisionError("Frobenius log is not integral at this precision");
    if (!L.coefficient(0).is_zero()) throw InternalError("Frobenius log has a constant term");
    return L;
}

// D log f = D(f) / f.
template <class W>
Series<W> dlog(const Series<W>& f) {
    detail::require_principal_power_series(f);
    return invariant_derivation(f) * invert(f);
}

// Y = -sum_{i>=0} phi^i(L/2) for L = frobenius_log(f); solves (phi - 1) Y = L/2.
template <class W>
Series<W> coboundary_from_log(const Series<W>& frob_log) {
    const auto& ctx = frob_log.context();
    int bound = ctx.precision() + 6;
    for (long w = ctx.window(); w > 0; w >>= 1) ++bound;
    Series<W> t = frob_log.half();
    Series<W> acc = Series<W>::zero(ctx);
    for (int i = 0; i < bound; ++i) {
        // A zero term still bounds what the rest of the orbit may contribute.
        acc += t;
        if (t.is_zero()) return -acc;
        t = frobenius(t);
    }
    throw InternalError("Frobenius orbit did not vanish within the step bound");
}

template <class W>
Series<W> coboundary_series(const Series<W>& f) {
    return coboundary_from_log(frobenius_log(f));
}

// ---------------------------------------------------------------------------
// SeriesContext construction

template <class W>
SeriesContext<W>::SeriesContext(std::shared_ptr<const CoeffRing<W>> ring, int n, long window)
    : ring_(std::move(ring)), n_(n) {
    if (!ring_) throw ConfigError("null coefficient ring");
    if (n < 2 || n > 8) throw ConfigError("level n must lie in [2, 8]");
    N_ = window > 0 ? window : default_window(n, ring_->precision());
    if (N_ < (1L << n) + 2) throw ConfigError("window N too small for level n");
    chi_ = mp::pow(BigInt(5), 1u << (n - 2));

    const auto& self = *this;
    Series<W> one = Series<W>::from_int(1, self);
    Series<W> x = Series<W>::variable(self);
    phi_x_ = x * x + x.mul_int(2);
    phi_x_inv_ = invert(*phi_x_);
    // (1+X)^chi by 2^(n-2) fifth powers.
    Series<W> z = one + x;
    for (int i = 0; i < (1 << (n - 2)); ++i) {
        Series<W> z2 = z * z;
        z = z2 * z2 * z;
    }
    gamma_x_ = z - one;
    gamma_x_inv_ = invert(*gamma_x_);
    pi_ = level_variable(self, 0);
    pi_inv_ = invert(*pi_);
    one_plus_x_inv_ = invert(one + x);
    kernel_ = invert(*pi_ * (one + x));
}

}  // namespace hilbert2
