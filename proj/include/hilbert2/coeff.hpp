#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hilbert2/error.hpp"
#include "hilbert2/word.hpp"

namespace hilbert2 {

template <class W>
class CoeffRing;

// Element of Z/2^M, the prime subring of O_K/2^M (trace values live here).
template <class W>
struct ZMod2k {
    W value{0};
    int bits = 0;

    static ZMod2k from_int(long long v, int bits) {
        return {word_from_int<W>(v) & low_mask<W>(bits), bits};
    }
    static ZMod2k from_big(const BigInt& v, int bits) { return {word_from_big<W>(v, bits), bits}; }

    int precision() const { return bits; }
    bool is_zero() const { return value == W(0); }
    int v2() const { return is_zero() ? bits : lowest_bit(value); }
    ZMod2k half() const { return {W(value >> 1), bits}; }
    ZMod2k times_pow2(int k) const {
        if (k >= bits) return {W(0), bits};
        return {W((value << k) & low_mask<W>(bits)), bits};
    }
    ZMod2k truncated(int b) const { return {W(value & low_mask<W>(b < bits ? b : bits)), bits}; }

    friend ZMod2k operator+(const ZMod2k& a, const ZMod2k& b) {
        return {W((a.value + b.value) & low_mask<W>(a.bits)), a.bits};
    }
    friend ZMod2k operator-(const ZMod2k& a, const ZMod2k& b) {
        return {W((a.value - b.value) & low_mask<W>(a.bits)), a.bits};
    }
    friend ZMod2k operator*(const ZMod2k& a, const ZMod2k& b) {
        return {W((a.value * b.value) & low_mask<W>(a.bits)), a.bits};
    }
    ZMod2k operator-() const { return {W((W(0) - value) & low_mask<W>(bits)), bits}; }
    friend bool operator==(const ZMod2k& a, const ZMod2k& b) { return a.value == b.value && a.bits == b.bits; }

    // Residue modulo 2^k as an unsigned integer (k <= 63).
    std::uint64_t mod_pow2(int k) const { return low64(value) & ((std::uint64_t(1) << k) - 1); }
    std::string str() const { return signed_string(value, bits); }
};

// Element of O_K/2^M in the power basis 1, w, ..., w^(d-1).
template <class W>
class CoeffElem {
public:
    static constexpr int kMaxDegree = 8;

    CoeffElem() = default;
    explicit CoeffElem(const CoeffRing<W>& ring) : ring_(&ring) {}

    const CoeffRing<W>& ring() const { return *ring_; }
    const CoeffRing<W>* ring_ptr() const { return ring_; }
    int degree() const { return ring_->degree(); }
    int precision() const { return ring_->precision(); }

    const W& operator[](int i) const { return c_[i]; }
    W& operator[](int i) { return c_[i]; }
    const W* data() const { return c_.data(); }
    W* data() { return c_.data(); }

    bool is_zero() const {
        for (int i = 0; i < degree(); ++i)
            if (c_[i] != W(0)) return false;
        return true;
    }
    // Units of O_K are the elements nonzero modulo 2.
    bool is_unit() const {
        for (int i = 0; i < degree(); ++i)
            if (is_odd(c_[i])) return true;
        return false;
    }
    // Largest j with this element in 2^j O_K (M for zero).
    int v2() const {
        int v = precision();
        for (int i = 0; i < degree(); ++i)
            if (c_[i] != W(0)) v = std::min(v, lowest_bit(c_[i]));
        return v;
    }
    CoeffElem half() const {
        CoeffElem r(*ring_);
        for (int i = 0; i < degree(); ++i) r.c_[i] = c_[i] >> 1;
        return r;
    }
    CoeffElem times_pow2(int k) const {
        CoeffElem r(*ring_);
        if (k >= precision()) return r;
        for (int i = 0; i < degree(); ++i) r.c_[i] = (c_[i] << k) & ring_->mask();
        return r;
    }
    CoeffElem truncated(int bits) const {
        CoeffElem r(*ring_);
        W m = low_mask<W>(std::min(bits, precision()));
        for (int i = 0; i < degree(); ++i) r.c_[i] = c_[i] & m;
        return r;
    }

    friend CoeffElem operator+(const CoeffElem& a, const CoeffElem& b) {
        check_same(a, b);
        CoeffElem r(*a.ring_);
        a.ring_->add(a.data(), b.data(), r.data());
        return r;
    }
    friend CoeffElem operator-(const CoeffElem& a, const CoeffElem& b) {
        check_same(a, b);
        CoeffElem r(*a.ring_);
        a.ring_->sub(a.data(), b.data(), r.data());
        return r;
    }
    friend CoeffElem operator*(const CoeffElem& a, const CoeffElem& b) {
        check_same(a, b);
        CoeffElem r(*a.ring_);
        a.ring_->mul(a.data(), b.data(), r.data());
        return r;
    }
    CoeffElem operator-() const {
        CoeffElem r(*ring_);
        ring_->neg(data(), r.data());
        return r;
    }
    CoeffElem& operator+=(const CoeffElem& b) { return *this = *this + b; }
    CoeffElem& operator-=(const CoeffElem& b) { return *this = *this - b; }
    CoeffElem& operator*=(const CoeffElem& b) { return *this = *this * b; }

    friend bool operator==(const CoeffElem& a, const CoeffElem& b) {
        if (a.ring_ != b.ring_) return false;
        for (int i = 0; i < a.degree(); ++i)
            if (a.c_[i] != b.c_[i]) return false;
        return true;
    }

    std::string str() const;

private:
    static void check_same(const CoeffElem& a, const CoeffElem& b) {
        if (a.ring_ != b.ring_ || a.ring_ == nullptr) throw ContextMismatch();
    }

    const CoeffRing<W>* ring_ = nullptr;
    std::array<W, kMaxDegree> c_{};
};

// O_K/2^M for K the unramified extension of Q_2 of degree d.
// Contexts are immutable and must outlive the elements built on them.
template <class W>
class CoeffRing {
public:
    static constexpr int kMaxDegree = CoeffElem<W>::kMaxDegree;

    static std::shared_ptr<const CoeffRing> create(int d, int M) {
        return std::shared_ptr<const CoeffRing>(new CoeffRing(d, M));
    }

    CoeffRing(const CoeffRing&) = delete;
    CoeffRing& operator=(const CoeffRing&) = delete;

    int degree() const { return d_; }
    int precision() const { return M_; }
    const W& mask() const { return mask_; }

    // Coefficients p_0..p_d of the monic defining polynomial, each 0 or 1.
    const std::vector<int>& defining_polynomial() const { return poly_; }

    static std::vector<int> conway_polynomial(int d) {
        // Low-to-high coefficient lists of the Conway polynomials over F_2.
        static const std::vector<std::vector<int>> table = {
            {1, 1},
            {1, 1, 1},
            {1, 1, 0, 1},
            {1, 1, 0, 0, 1},
            {1, 0, 1, 0, 0, 1},
            {1, 1, 0, 1, 1, 0, 1},
            {1, 1, 0, 0, 0, 0, 0, 1},
            {1, 0, 1, 1, 1, 0, 0, 0, 1},
        };
        return table.at(d - 1);
    }

    // Raw kernels on d-word coordinate arrays.
    void add(const W* a, const W* b, W* out) const {
        for (int i = 0; i < d_; ++i) out[i] = (a[i] + b[i]) & mask_;
    }
    void sub(const W* a, const W* b, W* out) const {
        for (int i = 0; i < d_; ++i) out[i] = (a[i] - b[i]) & mask_;
    }
    void neg(const W* a, W* out) const {
        for (int i = 0; i < d_; ++i) out[i] = (W(0) - a[i]) & mask_;
    }
    void scale(const W* a, const W& k, W* out) const {
        for (int i = 0; i < d_; ++i) out[i] = (a[i] * k) & mask_;
    }
    // acc[0..2d-2] += a*b as polynomials in w, without reduction.
    void mul_acc_wide(const W* a, const W* b, W* acc) const {
        for (int i = 0; i < d_; ++i) {
            if (a[i] == W(0)) continue;
            for (int j = 0; j < d_; ++j) acc[i + j] += a[i] * b[j];
        }
    }
    // Reduces a (2d-1)-word polynomial modulo the defining polynomial; acc is clobbered.
    void reduce_wide(W* acc, W* out) const {
        for (int k = 2 * d_ - 2; k >= d_; --k) {
            const W c = acc[k];
            if (c == W(0)) continue;
            for (int i : taps_) acc[k - d_ + i] -= c;
        }
        for (int i = 0; i < d_; ++i) out[i] = acc[i] & mask_;
    }
    void mul(const W* a, const W* b, W* out) const {
        if (d_ == 1) {
            out[0] = (a[0] * b[0]) & mask_;
            return;
        }
        std::array<W, 2 * kMaxDegree - 1> acc{};
        mul_acc_wide(a, b, acc.data());
        reduce_wide(acc.data(), out);
    }
    void frobenius(const W* a, W* out) const {
        if (d_ == 1) {
            out[0] = a[0];
            return;
        }
        std::array<W, kMaxDegree> r{};
        for (int j = 0; j < d_; ++j) {
            if (a[j] == W(0)) continue;
            const W* col = &sigma_[j * d_];
            for (int i = 0; i < d_; ++i) r[i] += a[j] * col[i];
        }
        for (int i = 0; i < d_; ++i) out[i] = r[i] & mask_;
    }
    W trace(const W* a) const {
        W t(0);
        for (int j = 0; j < d_; ++j) t += a[j] * trace_[j];
        return t & mask_;
    }

    // Element constructors.
    CoeffElem<W> zero() const { return CoeffElem<W>(*this); }
    CoeffElem<W> one() const { return from_int(1); }
    CoeffElem<W> from_int(long long v) const {
        CoeffElem<W> r(*this);
        r[0] = word_from_int<W>(v) & mask_;
        return r;
    }
    CoeffElem<W> from_word(const W& v) const {
        CoeffElem<W> r(*this);
        r[0] = v & mask_;
        return r;
    }
    CoeffElem<W> from_coords(std::span<const long long> c) const {
        if (static_cast<int>(c.size()) > d_) throw DomainError("too many coordinates for degree");
        CoeffElem<W> r(*this);
        for (std::size_t i = 0; i < c.size(); ++i) r[static_cast<int>(i)] = word_from_int<W>(c[i]) & mask_;
        return r;
    }
    // The generator w (a root of the defining polynomial); requires d >= 2.
    CoeffElem<W> generator() const {
        if (d_ < 2) throw DomainError("degree-1 ring has no generator w");
        CoeffElem<W> r(*this);
        r[1] = W(1);
        return r;
    }

private:
    CoeffRing(int d, int M) : d_(d), M_(M) {
        if (d < 1 || d > kMaxDegree) throw ConfigError("degree d must lie in [1, 8]");
        if (M < 1 || M > word_traits<W>::bits || M > kMaxPrecision)
            throw ConfigError("precision M out of range for this word type");
        mask_ = low_mask<W>(M);
        poly_ = conway_polynomial(d);
        for (int i = 0; i < d; ++i)
            if (poly_[i]) taps_.push_back(i);
        build_frobenius();
        build_trace();
    }

    void build_frobenius();
    void build_trace();

    int d_;
    int M_;
    W mask_;
    std::vector<int> poly_;
    std::vector<int> taps_;
    std::vector<W> sigma_;  // column j holds the image of w^j
    std::vector<W> trace_;  // trace of w^j
};

template <class W>
CoeffElem<W> pow(CoeffElem<W> a, std::uint64_t e) {
    CoeffElem<W> r = a.ring().one();
    while (e) {
        if (e & 1u) r *= a;
        a *= a;
        e >>= 1;
    }
    return r;
}

template <class W>
CoeffElem<W> inv(const CoeffElem<W>& a) {
    if (!a.is_unit()) throw NotInvertible("not invertible: element is divisible by 2");
    const auto& R = a.ring();
    // a^(2^d - 2) inverts a modulo 2; Newton doubles the 2-adic accuracy.
    CoeffElem<W> t = pow(a, (std::uint64_t(1) << R.degree()) - 2);
    const CoeffElem<W> two = R.from_int(2);
    for (int good = 1; good < R.precision(); good *= 2) t = t * (two - a * t);
    return t;
}

template <class W>
CoeffElem<W> frobenius(const CoeffElem<W>& a) {
    CoeffElem<W> r(a.ring());
    a.ring().frobenius(a.data(), r.data());
    return r;
}

template <class W>
ZMod2k<W> trace(const CoeffElem<W>& a) {
    return {a.ring().trace(a.data()), a.precision()};
}

// Teichmuller lift of the residue-field element with coordinate bits `residue`.
template <class W>
CoeffElem<W> teichmuller(const CoeffRing<W>& R, std::uint32_t residue) {
    if (R.degree() < 32 && (residue >> R.degree()) != 0)
        throw DomainError("residue has more bits than the degree");
    CoeffElem<W> a(R);
    for (int i = 0; i < R.degree(); ++i) a[i] = W((residue >> i) & 1u);
    const std::uint64_t q = std::uint64_t(1) << R.degree();
    for (int it = 0; it <= R.precision() + 1; ++it) {
        CoeffElem<W> b = pow(a, q);
        if (b == a) return a;
        a = b;
    }
    throw InternalError("Teichmuller iteration did not reach a fixed point");
}

template <class W>
void CoeffRing<W>::build_frobenius() {
    sigma_.assign(static_cast<std::size_t>(d_) * d_, W(0));
    if (d_ == 1) {
        sigma_[0] = W(1);
        return;
    }
    // Hensel-lift the root of the defining polynomial congruent to w^2.
    auto eval = [&](const CoeffElem<W>& x, bool derivative) {
        CoeffElem<W> acc = zero();
        for (int k = d_; k >= 0; --k) {
            long long c = derivative ? (k < d_ ? (k + 1) * poly_[k + 1] : 0) : poly_[k];
            acc = acc * x + from_int(c);
        }
        return acc;
    };
    CoeffElem<W> w = generator();
    CoeffElem<W> r = w * w;
    for (int it = 0; it < 2 * M_ + 4; ++it) {
        CoeffElem<W> p = eval(r, false);
        if (p.is_zero()) break;
        r = r - p * inv(eval(r, true));
    }
    if (!eval(r, false).is_zero()) throw InternalError("Frobenius root lift failed");
    CoeffElem<W> pw = one();
    for (int j = 0; j < d_; ++j) {
        for (int i = 0; i < d_; ++i) sigma_[j * d_ + i] = pw[i];
        pw = pw * r;
    }
}

template <class W>
void CoeffRing<W>::build_trace() {
    trace_.assign(d_, W(0));
    CoeffElem<W> pw = one();
    const CoeffElem<W> w = d_ > 1 ? generator() : one();
    for (int j = 0; j < d_; ++j) {
        CoeffElem<W> s = zero();
        CoeffElem<W> c = pw;
        for (int i = 0; i < d_; ++i) {
            s += c;
            c = ::hilbert2::frobenius(c);
        }
        for (int i = 1; i < d_; ++i)
            if (s[i] != W(0)) throw InternalError("trace left the prime subring");
        trace_[j] = s[0];
        pw = pw * w;
    }
}

template <class W>
std::string CoeffElem<W>::str() const {
    if (degree() == 1) return signed_string(c_[0], precision());
    std::string out;
    for (int i = 0; i < degree(); ++i) {
        if (c_[i] == W(0)) continue;
        std::string s = signed_string(c_[i], precision());
        std::string term = i == 0 ? s : (s == "1" ? "" : s == "-1" ? "-" : s + "*") + std::string(i == 1 ? "w" : "w^" + std::to_string(i));
        if (!out.empty() && term[0] != '-') out += "+";
        out += term;
    }
    return out.empty() ? "0" : "(" + out + ")";
}

}  // namespace hilbert2
