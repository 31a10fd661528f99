#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hilbert2/coeff.hpp"
#include "hilbert2/error.hpp"
#include "hilbert2/scaled.hpp"
#include "hilbert2/series.hpp"
#include "hilbert2/word.hpp"

namespace hilbert2 {

template <class W>
class KnContext;

// Element of O_{K_n}/2^M in the basis 1, t, ..., t^(e-1) with t = zeta_{2^n} - 1
// and e = 2^(n-1); each coordinate lies in O_K/2^M.
template <class W>
class KnElem {
public:
    KnElem() = default;
    explicit KnElem(const KnContext<W>& ctx);

    const KnContext<W>& context() const { return *ctx_; }
    const KnContext<W>* context_ptr() const { return ctx_; }
    const CoeffRing<W>& ring() const;
    int precision() const;
    int size() const;  // e

    CoeffElem<W> coefficient(int i) const;
    void set_coefficient(int i, const CoeffElem<W>& c);
    const std::vector<W>& raw() const { return c_; }
    std::vector<W>& raw() { return c_; }

    bool is_zero() const {
        for (const W& x : c_)
            if (x != W(0)) return false;
        return true;
    }
    // Largest j with the element in 2^j O_{K_n}.
    int v2() const {
        int v = precision();
        for (const W& x : c_)
            if (x != W(0)) v = std::min(v, lowest_bit(x));
        return v;
    }
    KnElem half() const {
        KnElem r(*ctx_);
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] >> 1;
        return r;
    }
    KnElem times_pow2(int k) const;
    KnElem truncated(int bits) const {
        KnElem r = *this;
        const W m = low_mask<W>(std::min(bits, precision()));
        for (W& x : r.c_) x &= m;
        return r;
    }

    friend KnElem operator+(const KnElem& a, const KnElem& b) { return a.combine(b, false); }
    friend KnElem operator-(const KnElem& a, const KnElem& b) { return a.combine(b, true); }
    friend KnElem operator*(const KnElem& a, const KnElem& b) { return multiply(a, b); }
    KnElem operator-() const;
    KnElem& operator+=(const KnElem& b) { return *this = *this + b; }
    KnElem& operator-=(const KnElem& b) { return *this = *this - b; }
    KnElem& operator*=(const KnElem& b) { return *this = *this * b; }
    friend bool operator==(const KnElem& a, const KnElem& b) { return a.ctx_ == b.ctx_ && a.c_ == b.c_; }

    std::string str() const;

private:
    KnElem combine(const KnElem& b, bool subtract) const;
    static KnElem multiply(const KnElem& a, const KnElem& b);

    const KnContext<W>* ctx_ = nullptr;
    std::vector<W> c_;
};

// K_n = K(zeta_{2^n}) over O_K/2^M. Immutable; must outlive its elements.
template <class W>
class KnContext {
public:
    static std::shared_ptr<const KnContext> create(std::shared_ptr<const CoeffRing<W>> ring, int n) {
        return std::shared_ptr<const KnContext>(new KnContext(std::move(ring), n));
    }
    KnContext(const KnContext&) = delete;
    KnContext& operator=(const KnContext&) = delete;

    const CoeffRing<W>& ring() const { return *ring_; }
    std::shared_ptr<const CoeffRing<W>> ring_handle() const { return ring_; }
    int level() const { return n_; }
    int ramification() const { return e_; }
    int precision() const { return ring_->precision(); }
    int degree() const { return ring_->degree(); }

    // Phi(X) = (1+X)^e + 1 = X^e + sum_{k<e} phi_k X^k, phi_k modulo 2^M.
    const std::vector<W>& min_poly() const { return phiw_; }
    // Tr_{K_n/K}(t^i) for 0 <= i < e, from Newton's identities on Phi.
    const std::vector<W>& power_sums() const { return psum_; }

    KnElem<W> zero() const { return KnElem<W>(*this); }
    KnElem<W> one() const { return from_int(1); }
    KnElem<W> from_int(long long v) const { return embed(ring_->from_int(v)); }
    KnElem<W> embed(const CoeffElem<W>& c) const {
        KnElem<W> r(*this);
        r.set_coefficient(0, c);
        return r;
    }
    KnElem<W> from_coeffs(const std::vector<CoeffElem<W>>& c) const {
        if (static_cast<int>(c.size()) > e_) throw DomainError("too many coordinates for K_n");
        KnElem<W> r(*this);
        for (std::size_t i = 0; i < c.size(); ++i) r.set_coefficient(static_cast<int>(i), c[i]);
        return r;
    }
    KnElem<W> from_ints(const std::vector<long long>& c) const {
        std::vector<CoeffElem<W>> cc;
        for (long long v : c) cc.push_back(ring_->from_int(v));
        return from_coeffs(cc);
    }
    // t = zeta - 1.
    KnElem<W> uniformizer() const;
    KnElem<W> zeta() const { return one() + uniformizer(); }

private:
    KnContext(std::shared_ptr<const CoeffRing<W>> ring, int n);

    std::shared_ptr<const CoeffRing<W>> ring_;
    int n_;
    int e_;
    std::vector<W> phiw_;
    std::vector<W> psum_;
};

// ---------------------------------------------------------------------------

template <class W>
KnElem<W>::KnElem(const KnContext<W>& ctx) : ctx_(&ctx), c_(static_cast<std::size_t>(ctx.ramification()) * ctx.degree(), W(0)) {}

template <class W>
const CoeffRing<W>& KnElem<W>::ring() const {
    return ctx_->ring();
}
template <class W>
int KnElem<W>::precision() const {
    return ctx_->precision();
}
template <class W>
int KnElem<W>::size() const {
    return ctx_->ramification();
}

template <class W>
CoeffElem<W> KnElem<W>::coefficient(int i) const {
    CoeffElem<W> r(ring());
    const int d = ring().degree();
    for (int k = 0; k < d; ++k) r[k] = c_[i * d + k];
    return r;
}

template <class W>
void KnElem<W>::set_coefficient(int i, const CoeffElem<W>& c) {
    if (c.ring_ptr() != &ring()) throw ContextMismatch();
    const int d = ring().degree();
    for (int k = 0; k < d; ++k) c_[i * d + k] = c[k];
}

template <class W>
KnElem<W> KnElem<W>::times_pow2(int k) const {
    KnElem r(*ctx_);
    if (k >= precision()) return r;
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = (c_[i] << k) & ring().mask();
    return r;
}

template <class W>
KnElem<W> KnElem<W>::combine(const KnElem& b, bool subtract) const {
    if (ctx_ != b.ctx_ || ctx_ == nullptr) throw ContextMismatch();
    KnElem r(*ctx_);
    const W m = ring().mask();
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = (subtract ? c_[i] - b.c_[i] : c_[i] + b.c_[i]) & m;
    return r;
}

template <class W>
KnElem<W> KnElem<W>::operator-() const {
    KnElem r(*ctx_);
    const W m = ring().mask();
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = (W(0) - c_[i]) & m;
    return r;
}

template <class W>
KnElem<W> KnElem<W>::multiply(const KnElem& a, const KnElem& b) {
    if (a.ctx_ != b.ctx_ || a.ctx_ == nullptr) throw ContextMismatch();
    const KnContext<W>& K = *a.ctx_;
    const CoeffRing<W>& R = K.ring();
    const int d = R.degree(), e = K.ramification();
    const int wd = 2 * d - 1;
    std::vector<W> acc(static_cast<std::size_t>(2 * e - 1) * wd, W(0));
    for (int i = 0; i < e; ++i)
        for (int j = 0; j < e; ++j) R.mul_acc_wide(&a.c_[i * d], &b.c_[j * d], &acc[(i + j) * wd]);
    std::vector<W> r(static_cast<std::size_t>(2 * e - 1) * d, W(0));
    for (int k = 0; k < 2 * e - 1; ++k) R.reduce_wide(&acc[k * wd], &r[k * d]);
    // t^e = -sum_k phi_k t^k
    for (int k = 2 * e - 2; k >= e; --k)
        for (int j = 0; j < e; ++j) {
            if (K.min_poly()[j] == W(0)) continue;
            for (int q = 0; q < d; ++q) r[(k - e + j) * d + q] -= r[k * d + q] * K.min_poly()[j];
        }
    KnElem<W> out(K);
    for (int i = 0; i < e * d; ++i) out.c_[i] = r[i] & R.mask();
    return out;
}

template <class W>
std::string KnElem<W>::str() const {
    std::string out;
    for (int i = 0; i < size(); ++i) {
        CoeffElem<W> c = coefficient(i);
        if (c.is_zero()) continue;
        std::string cs = c.str();
        std::string mon = i == 0 ? "" : i == 1 ? "t" : "t^" + std::to_string(i);
        std::string term = mon.empty() ? cs : cs == "1" ? mon : cs == "-1" ? "-" + mon : cs + "*" + mon;
        if (!out.empty()) out += term[0] == '-' ? " - " + term.substr(1) : " + " + term;
        else out = term;
    }
    return out.empty() ? "0" : out;
}

template <class W>
KnContext<W>::KnContext(std::shared_ptr<const CoeffRing<W>> ring, int n) : ring_(std::move(ring)), n_(n) {
    if (!ring_) throw ConfigError("null coefficient ring");
    if (n < 2 || n > 8) throw ConfigError("level n must lie in [2, 8]");
    e_ = 1 << (n - 1);
    const int M = ring_->precision();
    // Binomial coefficients C(e, k) fit in BigInt; reduce modulo 2^M.
    std::vector<BigInt> binom(e_ + 1);
    binom[0] = 1;
    for (int k = 1; k <= e_; ++k) binom[k] = binom[k - 1] * (e_ - k + 1) / k;
    phiw_.assign(e_, W(0));
    for (int k = 0; k < e_; ++k) phiw_[k] = word_from_big<W>(binom[k] + (k == 0 ? 1 : 0), M);
    // Newton's identities: p_i = -(sum_{j=1}^{i-1} a_{e-j} p_{i-j}) - i a_{e-i}, p_0 = e.
    std::vector<BigInt> p(e_);
    p[0] = e_;
    for (int i = 1; i < e_; ++i) {
        BigInt s = BigInt(i) * binom[e_ - i];
        for (int j = 1; j < i; ++j) s += binom[e_ - j] * p[i - j];
        p[i] = -s;
    }
    psum_.resize(e_);
    for (int i = 0; i < e_; ++i) psum_[i] = word_from_big<W>(p[i], M);
}

template <class W>
KnElem<W> KnContext<W>::uniformizer() const {
    KnElem<W> r(*this);
    if (e_ == 1) throw InternalError("degenerate level");
    r.set_coefficient(1, ring_->one());
    return r;
}

// ---------------------------------------------------------------------------
// Field operations

template <class W>
KnElem<W> pow(KnElem<W> a, std::uint64_t k) {
    KnElem<W> r = a.context().one();
    while (k) {
        if (k & 1u) r *= a;
        a *= a;
        k >>= 1;
    }
    return r;
}

// t-adic valuation; empty for an element that is zero at this precision.
template <class W>
std::optional<long> valuation(const KnElem<W>& a) {
    const int e = a.size();
    std::optional<long> v;
    for (int i = 0; i < e; ++i) {
        CoeffElem<W> c = a.coefficient(i);
        if (c.is_zero()) continue;
        long vi = static_cast<long>(e) * c.v2() + i;
        if (!v || vi < *v) v = vi;
    }
    return v;
}

template <class W>
bool is_principal_unit(const KnElem<W>& a) {
    CoeffElem<W> c0 = a.coefficient(0) - a.ring().one();
    return c0.v2() >= 1;
}

template <class W>
KnElem<W> inv(const KnElem<W>& a) {
    if (!a.coefficient(0).is_unit()) throw NotInvertible("not invertible: element is not a unit of K_n");
    const auto& K = a.context();
    KnElem<W> t = K.embed(inv(a.coefficient(0)));
    const KnElem<W> one = K.one(), two = K.from_int(2);
    const long target = static_cast<long>(K.ramification()) * K.precision();
    for (long good = 1; good < 2 * target; good *= 2) {
        if (a * t == one) return t;
        t = t * (two - a * t);
    }
    if (!(a * t == one)) throw InternalError("Newton inversion in K_n did not converge");
    return t;
}

// The automorphism sigma_c: t -> (1+t)^c - 1, trivial on O_K; c odd.
template <class W>
KnElem<W> galois(const KnElem<W>& a, std::uint64_t c) {
    if ((c & 1u) == 0) throw DomainError("Galois exponent must be odd");
    const auto& K = a.context();
    const KnElem<W> z = pow(K.zeta(), c) - K.one();
    KnElem<W> r = K.zero();
    for (int i = a.size() - 1; i >= 0; --i) r = r * z + K.embed(a.coefficient(i));
    return r;
}

// Elements of one K_n context re-read in another with the same d and n.
template <class W2, class W1>
KnElem<W2> import_element(const KnElem<W1>& x, const KnContext<W2>& ctx) {
    if (x.context().degree() != ctx.degree() || x.context().level() != ctx.level())
        throw ContextMismatch();
    if (x.precision() < ctx.precision()) throw PrecisionError("element is known to lower precision than the target");
    KnElem<W2> r(ctx);
    const W2 m = ctx.ring().mask();
    for (std::size_t i = 0; i < x.raw().size(); ++i) r.raw()[i] = word_cast<W2>(x.raw()[i]) & m;
    return r;
}

template <class W>
ZMod2k<W> kn_trace(const KnElem<W>& a) {
    const auto& K = a.context();
    W t(0);
    for (int i = 0; i < a.size(); ++i) {
        CoeffElem<W> c = a.coefficient(i);
        t += K.ring().trace(c.data()) * K.power_sums()[i];
    }
    return {W(t & K.ring().mask()), K.precision()};
}

template <class W>
Scaled<ZMod2k<W>> kn_trace(const Scaled<KnElem<W>>& a) {
    return Scaled<ZMod2k<W>>(kn_trace(a.numerator()), a.scale(), a.abs_precision());
}

// 2-adic logarithm of a principal unit: square k times until v(y - 1) > e,
// sum the log series of y (each term divides exactly), then divide by 2^k.
template <class W>
Scaled<KnElem<W>> kn_log(const KnElem<W>& x) {
    if (!is_principal_unit(x)) throw DomainError("logarithm needs a principal unit");
    const auto& K = x.context();
    const int e = K.ramification();
    const int M = K.precision();
    const KnElem<W> one = K.one();
    KnElem<W> y = x;
    int k = 0;
    for (;;) {
        auto v = valuation(y - one);
        if (!v || *v > e) break;
        y = y * y;
        if (++k > 64) throw InternalError("log squaring did not converge");
    }
    const KnElem<W> z = y - one;
    KnElem<W> acc = K.zero();
    auto vz = valuation(z);
    if (!vz) return Scaled<KnElem<W>>(acc, k, M - k);
    KnElem<W> p = z;
    int used = 0;
    long m = 1;
    for (; !p.is_zero(); ++m, p = p * z) {
        int v = 0;
        long u = m;
        while ((u & 1) == 0) {
            u >>= 1;
            ++v;
        }
        if (p.v2() < v) throw InternalError("log term is not divisible by its index");
        KnElem<W> term = p;
        for (int i = 0; i < v; ++i) term = term.half();
        if (u > 1) term = term * K.embed(K.ring().from_word(odd_inverse(W(static_cast<std::uint64_t>(u)), M)));
        used = std::max(used, v);
        acc = (m % 2 == 1) ? acc + term : acc - term;
    }
    // Omitted terms m' >= m have valuation >= floor(m' v(z) / e) - v2(m').
    int tail = M;
    for (long mm = m; mm < m + 4 * M + 64; ++mm) {
        long u = mm;
        int v = 0;
        while ((u & 1) == 0) {
            u >>= 1;
            ++v;
        }
        tail = static_cast<int>(std::min<long>(tail, mm * *vz / e - v));
    }
    const int abs_num = std::min(M - used, tail);
    return Scaled<KnElem<W>>(acc, k, abs_num - k);
}

// Lift of a principal unit x to f in 1 + X O_K[X] with f(t) = x.
//
// Coordinates t^1..t^(e-1) of x - 1 move into f directly. The constant
// coordinate is 2c and 2 = -t^e - sum_{0<k<e} C(e,k) t^k, so it becomes
// -c X^e - sum_k c C(e,k) X^k.
template <class W>
Series<W> lift_unit(const KnElem<W>& x, const SeriesContext<W>& sctx) {
    const auto& K = x.context();
    if (&K.ring() != &sctx.ring() || K.level() != sctx.level()) throw ContextMismatch();
    if (!is_principal_unit(x)) throw DomainError("not a principal unit");
    const auto& R = K.ring();
    const int e = K.ramification();
    const KnElem<W> t = x - K.one();
    const CoeffElem<W> c = t.coefficient(0).half();
    std::vector<CoeffElem<W>> f(e + 1, R.zero());
    f[0] = R.one();
    for (int k = 1; k < e; ++k) {
        CoeffElem<W> ck(R);
        R.scale(c.data(), K.min_poly()[k], ck.data());
        f[k] = t.coefficient(k) - ck;
    }
    f[e] = -c;
    return Series<W>::from_coeffs(sctx, 0, f);
}

namespace detail {

// 1/z for z with t-adic valuation v >= 1: with v = c e - r (0 <= r < e),
// y = z t^r / 2^c is a unit and 1/z = 2^-c t^r / y.
template <class W>
Scaled<KnElem<W>> invert_nonunit(const KnElem<W>& z) {
    const auto& K = z.context();
    const int e = K.ramification();
    const int M = K.precision();
    auto v = valuation(z);
    if (!v) throw NotInvertible("cannot invert zero");
    if (*v == 0) return Scaled<KnElem<W>>::exact(inv(z));
    const int c = static_cast<int>((*v + e - 1) / e);
    const int r = static_cast<int>(c * e - *v);
    const KnElem<W> tr = pow(K.uniformizer(), static_cast<std::uint64_t>(r));
    KnElem<W> y = z * tr;
    if (y.v2() < c) throw InternalError("unexpected valuation in inversion");
    for (int i = 0; i < c; ++i) y = y.half();
    // y is known modulo 2^(M - c); so is its inverse.
    return Scaled<KnElem<W>>(tr * inv(y), c, M - 2 * c);
}

}  // namespace detail

// F((1+t)^u - 1) for a series F; the answer carries F's scale.
template <class W>
Scaled<KnElem<W>> eval_at_root(const Series<W>& F, long long u, const KnContext<W>& K) {
    const auto& sctx = F.context();
    if (&K.ring() != &sctx.ring() || K.level() != sctx.level()) throw ContextMismatch();
    const int e = K.ramification();
    const long long q = 1LL << K.level();
    u %= q;
    if (u < 0) u += q;
    const int s = F.scale();
    if (F.is_zero()) return Scaled<KnElem<W>>(K.zero(), 0, F.abs_precision());
    if (u == 0) {
        if (F.lo() < 0) throw DomainError("negative exponents cannot be evaluated at X = 0");
        if (F.prec() <= 0) throw WindowExhausted("constant term is beyond the known precision");
        return Scaled<KnElem<W>>(K.embed(F.coefficient(0)), s, F.abs_precision());
    }
    const KnElem<W> z = pow(K.zeta(), static_cast<std::uint64_t>(u)) - K.one();
    const long vz = *valuation(z);
    int abs = F.abs_precision();
    if (!F.exact()) {
        const long tail = F.prec() * vz / e;
        abs = static_cast<int>(std::min<long>(abs, tail - s));
    }
    KnElem<W> pos = K.zero();
    for (long i = F.hi(); i >= std::max(0L, F.lo()); --i) pos = pos * z + K.embed(F.coefficient(i));
    for (long i = F.lo() - 1; i >= 0; --i) pos = pos * z;
    Scaled<KnElem<W>> out(pos, s, abs);
    if (F.lo() < 0) {
        const Scaled<KnElem<W>> zinv = detail::invert_nonunit(z);
        Scaled<KnElem<W>> r = Scaled<KnElem<W>>::exact(K.zero());
        for (long i = F.lo(); i <= -1; ++i) {
            if (i <= F.hi()) r = r + Scaled<KnElem<W>>::exact(K.embed(F.coefficient(i)));
            r = r * zinv;
        }
        out = out + Scaled<KnElem<W>>(r.numerator(), r.scale() + s, std::min(r.abs_precision() - s, abs));
    }
    return out;
}

}  // namespace hilbert2
