#pragma once

#include <algorithm>
#include <string>

#include "hilbert2/error.hpp"

namespace hilbert2 {

// A value 2^-scale * num known modulo 2^abs.
//
// Num is ZMod2k, CoeffElem or KnElem: anything with precision(), is_zero(),
// v2(), half(), times_pow2(k), truncated(bits) and ring operators.
// Invariants: scale >= 0 and minimal, abs + scale <= precision(), and num is
// reduced modulo 2^(abs + scale).
template <class Num>
class Scaled {
public:
    Scaled() = default;
    Scaled(Num num, int scale, int abs) : num_(std::move(num)), scale_(scale), abs_(abs) { normalize(); }

    static Scaled exact(Num num) {
        int p = num.precision();
        return Scaled(std::move(num), 0, p);
    }

    const Num& numerator() const { return num_; }
    int scale() const { return scale_; }
    int abs_precision() const { return abs_; }
    int precision() const { return num_.precision(); }
    bool is_zero() const { return num_.is_zero(); }
    bool is_integral() const { return scale_ == 0; }

    // 2-adic valuation of the value; abs for a value that is zero at this precision.
    int v2() const { return num_.is_zero() ? abs_ : num_.v2() - scale_; }

    Scaled times_pow2(int k) const {
        if (k <= 0) return Scaled(num_, scale_ - k, abs_ + k);
        if (k <= scale_) return Scaled(num_, scale_ - k, abs_ + k);
        return Scaled(num_.times_pow2(k - scale_), 0, abs_ + k);
    }

    friend Scaled operator+(const Scaled& a, const Scaled& b) {
        int s = std::max(a.scale_, b.scale_);
        Num n = a.num_.times_pow2(s - a.scale_) + b.num_.times_pow2(s - b.scale_);
        return Scaled(std::move(n), s, std::min(a.abs_, b.abs_));
    }
    friend Scaled operator-(const Scaled& a, const Scaled& b) { return a + (-b); }
    Scaled operator-() const { return Scaled(-num_, scale_, abs_); }
    friend Scaled operator*(const Scaled& a, const Scaled& b) {
        int abs = std::min(a.abs_ + b.v2(), b.abs_ + a.v2());
        return Scaled(a.num_ * b.num_, a.scale_ + b.scale_, abs);
    }
    // Product with an exactly known integral value.
    friend Scaled operator*(const Scaled& a, const Num& b) { return a * exact(b); }

    // Equal as values at the common precision.
    friend bool equal_within(const Scaled& a, const Scaled& b) { return (a - b).is_zero(); }

private:
    void normalize() {
        if (scale_ < 0) {
            num_ = num_.times_pow2(-scale_);
            scale_ = 0;
        }
        const int P = num_.precision();
        if (scale_ > P) throw PrecisionError("scale exceeds working precision");
        abs_ = std::min(abs_, P - scale_);
        num_ = num_.truncated(std::max(abs_ + scale_, 0));
        if (num_.is_zero()) {
            scale_ = 0;
            return;
        }
        while (scale_ > 0 && num_.v2() > 0) {
            num_ = num_.half();
            --scale_;
        }
    }

    Num num_{};
    int scale_ = 0;
    int abs_ = 0;
};

}  // namespace hilbert2
