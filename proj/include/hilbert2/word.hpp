#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

#include "hilbert2/error.hpp"

namespace hilbert2 {

namespace mp = boost::multiprecision;

// Fixed 512-bit word with wraparound arithmetic, used when M > 64.
using WideWord = mp::number<
    mp::cpp_int_backend<512, 512, mp::unsigned_magnitude, mp::unchecked, void>>;

using BigInt = mp::cpp_int;

inline constexpr int kMaxPrecision = 512;

template <class W>
struct word_traits;

template <>
struct word_traits<std::uint64_t> {
    static constexpr int bits = 64;
};

template <>
struct word_traits<WideWord> {
    static constexpr int bits = 512;
};

template <class W>
inline constexpr bool is_word_v =
    std::is_same_v<W, std::uint64_t> || std::is_same_v<W, WideWord>;

template <class W>
W low_mask(int bits) {
    if (bits <= 0) return W(0);
    if (bits >= word_traits<W>::bits) return ~W(0);
    return (W(1) << bits) - W(1);
}

// Index of the lowest set bit; x must be nonzero.
template <class W>
int lowest_bit(const W& x) {
    if constexpr (std::is_same_v<W, std::uint64_t>)
        return std::countr_zero(x);
    else
        return static_cast<int>(mp::lsb(x));
}

template <class W>
bool is_odd(const W& x) {
    if constexpr (std::is_same_v<W, std::uint64_t>)
        return (x & 1u) != 0;
    else
        return mp::bit_test(x, 0);
}

template <class W>
std::uint64_t low64(const W& x) {
    if constexpr (std::is_same_v<W, std::uint64_t>)
        return x;
    else
        return static_cast<std::uint64_t>(x & WideWord(~std::uint64_t(0)));
}

template <class To, class From>
To word_cast(const From& x) {
    if constexpr (std::is_same_v<To, From>)
        return x;
    else if constexpr (std::is_same_v<To, WideWord>)
        return WideWord(x);
    else
        return low64(x);
}

// Two's-complement image of v modulo 2^bits(W).
template <class W>
W word_from_int(long long v) {
    if (v >= 0) return W(static_cast<std::uint64_t>(v));
    return W(0) - W(static_cast<std::uint64_t>(-(v + 1)) + 1u);
}

template <class W>
W word_from_big(const BigInt& v, int bits) {
    BigInt m = BigInt(1) << bits;
    BigInt r = v % m;
    if (r < 0) r += m;
    W out(0);
    for (int k = 0; k < bits; k += 64) {
        auto limb = static_cast<std::uint64_t>((r >> k) & BigInt(~std::uint64_t(0)));
        out |= W(limb) << k;
    }
    return out & low_mask<W>(bits);
}

template <class W>
BigInt word_to_big(const W& x) {
    if constexpr (std::is_same_v<W, std::uint64_t>)
        return BigInt(x);
    else
        return BigInt(x);
}

// Inverse of an odd word modulo 2^bits.
template <class W>
W odd_inverse(const W& a, int bits) {
    if (!is_odd(a)) throw NotInvertible("even residue is not invertible");
    W x = a;  // correct to 3 bits
    for (int good = 3; good < bits; good *= 2) x = x * (W(2) - a * x);
    return x & low_mask<W>(bits);
}

// Decimal string of the representative in (-2^(bits-1), 2^(bits-1)].
template <class W>
std::string signed_string(const W& x, int bits) {
    BigInt v = word_to_big(W(x & low_mask<W>(bits)));
    BigInt half = BigInt(1) << (bits - 1);
    if (v > half) v -= BigInt(1) << bits;
    return v.str();
}

template <class W>
std::string unsigned_string(const W& x) {
    return word_to_big(x).str();
}

// Calls f.template operator()<W>() with the narrowest word holding M bits.
template <class F>
decltype(auto) with_word(int M, F&& f) {
    if (M < 1 || M > kMaxPrecision)
        throw ConfigError("precision M must lie in [1, " + std::to_string(kMaxPrecision) + "]");
    if (M <= 64) return f.template operator()<std::uint64_t>();
    return f.template operator()<WideWord>();
}

}  // namespace hilbert2
