#pragma once

#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hilbert2/coeff.hpp"
#include "hilbert2/knfield.hpp"
#include "hilbert2/oracle.hpp"
#include "hilbert2/random.hpp"
#include "hilbert2/series.hpp"
#include "hilbert2/symbol.hpp"

namespace hilbert2::checks {

enum class Level { fast, full };

struct CheckResult {
    std::string id;
    std::string title;
    long cases = 0;
    long failures = 0;
    std::string first_failure;

    bool passed() const { return failures == 0 && cases > 0; }
};

struct Config {
    int d;
    int n;
};

inline const std::vector<Config>& symbol_configs() {
    static const std::vector<Config> c = {{1, 2}, {2, 2}, {1, 3}, {2, 3}};
    return c;
}

inline std::string label(const Config& c) {
    return "d=" + std::to_string(c.d) + ",n=" + std::to_string(c.n);
}

// Case counts: the full level runs the stated count, the fast level a quarter.
inline long count(Level level, long full) { return level == Level::full ? full : (full + 3) / 4; }

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t id) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (id + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Tally {
public:
    Tally(std::string id, std::string title) {
        r_.id = std::move(id);
        r_.title = std::move(title);
    }
    template <class F>
    void run(const std::string& where, F&& f) {
        ++r_.cases;
        std::string why;
        bool ok = false;
        try {
            ok = f();
            if (!ok) why = "property violated";
        } catch (const std::exception& e) {
            why = e.what();
        }
        if (!ok) {
            if (r_.failures == 0) r_.first_failure = where + ": " + why;
            ++r_.failures;
        }
    }
    CheckResult result() const { return r_; }

private:
    CheckResult r_;
};

using Word = std::uint64_t;
using Elem = KnElem<Word>;
using Ser = Series<Word>;

// Engines for one configuration at guard G and 2G.
class Bundle {
public:
    Bundle(int d, int n, int guard = 16)
        : cfg_{d, n}, g1_(d, n, guard), g2_(d, n, 2 * guard), ah1_(d, n, guard), ah2_(d, n, 2 * guard) {}

    const Config& config() const { return cfg_; }
    int n() const { return cfg_.n; }
    std::uint64_t modulus() const { return std::uint64_t(1) << cfg_.n; }
    const SymbolEngine<Word>& engine() const { return g1_; }
    const SymbolEngine<Word>& wide_engine() const { return g2_; }
    // Inputs are drawn at the highest precision any engine reads.
    const KnContext<Word>& input_field() const { return ah2_.field(); }

    Elem random_unit(Rng& rng) const { return random_principal_unit(rng, input_field()); }

    // Main path with one retry at doubled guard.
    std::uint64_t symbol(const Elem& x, const Elem& y) const {
        try {
            return g1_.evaluate(g1_.import(x), g1_.import(y)).value;
        } catch (const PrecisionError&) {
            return g2_.evaluate(g2_.import(x), g2_.import(y)).value;
        }
    }
    std::uint64_t symbol_wide(const Elem& x, const Elem& y) const {
        return g2_.evaluate(g2_.import(x), g2_.import(y)).value;
    }
    std::uint64_t cup(const Elem& x, const Elem& y) const {
        try {
            return g1_.evaluate_cup(g1_.import(x), g1_.import(y)).value;
        } catch (const PrecisionError&) {
            return g2_.evaluate_cup(g2_.import(x), g2_.import(y)).value;
        }
    }
    std::uint64_t artin_hasse(const Elem& x) const {
        try {
            return ah1_.evaluate(ah1_.import(x)).value;
        } catch (const PrecisionError&) {
            return ah2_.evaluate(ah2_.import(x)).value;
        }
    }

private:
    Config cfg_;
    SymbolEngine<Word> g1_, g2_;
    ArtinHasseEngine<Word> ah1_, ah2_;
};

inline std::vector<Bundle>& bundles() {
    static std::vector<Bundle> b = [] {
        std::vector<Bundle> v;
        for (const auto& c : symbol_configs()) v.emplace_back(c.d, c.n);
        return v;
    }();
    return b;
}

inline std::string where(const Bundle& b, long i) { return "(" + label(b.config()) + ") case " + std::to_string(i); }

// A value zero at its certified precision, with more than n certified bits.
template <class V>
bool certified_zero(const V& v, int n) {
    return v.is_zero() && v.abs_precision() > n;
}

// ---------------------------------------------------------------------------
// Acceptance criteria 1-13

inline CheckResult slide_identity(Level level, std::uint64_t seed) {
    Tally t("C1", "slide identity (phi - 1) Y = Log f / 2");
    Rng rng(stream_seed(seed, 1));
    for (auto& b : bundles())
        for (long i = 0; i < count(level, 50); ++i) {
            const auto& S = b.engine().series();
            Ser f = random_principal_series(rng, S, rng.range(1, 16));
            t.run(where(b, i), [&] {
                Ser L = frobenius_log(f);
                Ser Y = coboundary_from_log(L);
                Ser diff = frobenius(Y) - Y - L.half();
                return certified_zero(diff, b.n()) && diff.prec() > S.window();
            });
        }
    return t.result();
}

inline CheckResult residue_average(Level level, std::uint64_t seed) {
    Tally t("C2", "Res(F w) = 2^-n sum_zeta F(zeta - 1)");
    Rng rng(stream_seed(seed, 2));
    for (auto& b : bundles())
        for (long i = 0; i < count(level, 50); ++i) {
            const auto& E = b.engine();
            Ser F = random_laurent(rng, E.series(), 0, rng.range(0, 20));
            t.run(where(b, i), [&] {
                const auto lhs = residue_of_product(F, E.series().residue_kernel());
                Scaled<Elem> sum = Scaled<Elem>::exact(E.field().zero());
                for (long u = 0; u < (1L << b.n()); ++u) sum = sum + eval_at_root(F, u, E.field());
                sum = sum.times_pow2(-b.n());
                Scaled<Elem> l(E.field().embed(lhs.numerator()), lhs.scale(), lhs.abs_precision());
                return certified_zero(l - sum, b.n());
            });
        }
    return t.result();
}

inline CheckResult trace_of_log(Level level, std::uint64_t seed) {
    Tally t("C3", "Tr log x = -Tr_K sum_zeta Log f(zeta - 1)");
    Rng rng(stream_seed(seed, 3));
    for (auto& b : bundles())
        for (long i = 0; i < count(level, 25); ++i) {
            const auto& E = b.engine();
            Elem x0 = b.random_unit(rng);
            t.run(where(b, i), [&] {
                Elem x = E.import(x0);
                Ser L = frobenius_log(E.lift(x));
                Scaled<Elem> sum = Scaled<Elem>::exact(E.field().zero());
                for (long u = 0; u < (1L << b.n()); ++u) sum = sum + eval_at_root(L, u, E.field());
                for (int k = 1; k < E.field().ramification(); ++k)
                    if (!sum.numerator().coefficient(k).is_zero()) return false;
                const CoeffElem<Word> c0 = sum.numerator().coefficient(0);
                Scaled<ZMod2k<Word>> rhs(ZMod2k<Word>{E.ring().trace(c0.data()), E.precision()}, sum.scale(),
                                         sum.abs_precision());
                const auto lhs = kn_trace(kn_log(x));
                return certified_zero(lhs + rhs, b.n());
            });
        }
    return t.result();
}

inline CheckResult bilinearity(Level level, std::uint64_t seed) {
    Tally t("C4", "bilinearity in both arguments");
    Rng rng(stream_seed(seed, 4));
    for (auto& b : bundles())
        for (long i = 0; i < count(level, 100); ++i) {
            Elem x1 = b.random_unit(rng), x2 = b.random_unit(rng), y = b.random_unit(rng);
            t.run(where(b, i), [&] {
                const std::uint64_t q = b.modulus();
                const bool left = b.symbol(x1 * x2, y) == (b.symbol(x1, y) + b.symbol(x2, y)) % q;
                const bool right = b.symbol(y, x1 * x2) == (b.symbol(y, x1) + b.symbol(y, x2)) % q;
                return left && right;
            });
        }
    return t.result();
}

inline CheckResult antisymmetry(Level level, std::uint64_t seed) {
    Tally t("C5", "antisymmetry [x,y] + [y,x] = 0");
    Rng rng(stream_seed(seed, 5));
    for (auto& b : bundles())
        for (long i = 0; i < count(level, 100); ++i) {
            Elem x = b.random_unit(rng), y = b.random_unit(rng);
            t.run(where(b, i), [&] { return (b.symbol(x, y) + b.symbol(y, x)) % b.modulus() == 0; });
        }
    return t.result();
}

inline CheckResult artin_hasse_agreement(Level level, std::uint64_t seed) {
    Tally t("C6", "[x, zeta] equals the Artin-Hasse closed form");
    Rng rng(stream_seed(seed, 6));
    for (auto& b : bundles())
        for (long i = 0; i < count(level, 25); ++i) {
            Elem x = b.random_unit(rng);
            t.run(where(b, i), [&] { return b.symbol(x, b.input_field().zeta()) == b.artin_hasse(x); });
        }
    return t.result();
}

inline CheckResult two_paths(Level level, std::uint64_t seed) {
    Tally t("C7", "main formula equals cup product path");
    Rng rng(stream_seed(seed, 7));
    for (auto& b : bundles())
        for (long i = 0; i < count(level, 50); ++i) {
            Elem x = b.random_unit(rng), y = b.random_unit(rng);
            t.run(where(b, i), [&] { return b.symbol(x, y) == b.cup(x, y); });
        }
    return t.result();
}

inline CheckResult quadratic_parity(Level level, std::uint64_t seed) {
    Tally t("C8", "parity matches the quadratic oracle (d=1, n=2)");
    Rng rng(stream_seed(seed, 8));
    const StableQuadraticOracle oracle(10);
    for (auto& b : bundles()) {
        if (b.config().d != 1 || b.config().n != 2) continue;
        for (long i = 0; i < count(level, 50); ++i) {
            Elem x = b.random_unit(rng), y = b.random_unit(rng);
            t.run(where(b, i), [&] {
                SymbolValue s{b.symbol(x, y), b.modulus(), {}};
                return parity_check(x, y, s, oracle);
            });
        }
    }
    return t.result();
}

inline CheckResult lift_independence(Level level, std::uint64_t seed) {
    Tally t("C9", "symbols do not depend on the chosen lifts");
    Rng rng(stream_seed(seed, 9));
    for (auto& b : bundles())
        for (long i = 0; i < count(level, 25); ++i) {
            const auto& E = b.engine();
            Elem x0 = b.random_unit(rng), y0 = b.random_unit(rng);
            // Perturbations r with r(0) = 0 keep the constant term 1.
            Ser r = random_laurent(rng, E.series(), 1, rng.range(1, 6));
            Ser s = random_laurent(rng, E.series(), 1, rng.range(1, 6));
            t.run(where(b, i), [&] {
                Elem x = E.import(x0), y = E.import(y0);
                const Ser Phi = level_variable(E.series(), 1) + Ser::from_int(2, E.series());
                Ser f = E.lift(x), g = E.lift(y);
                Ser f2 = f + Phi * r, g2 = g + Phi * s;
                if (!(eval_at_root(f2, 1, E.field()).numerator() == x)) return false;
                if (!(eval_at_root(g2, 1, E.field()).numerator() == y)) return false;
                const auto a = E.evaluate(E.prepare(f), E.prepare(g)).value;
                const auto c = E.evaluate(E.prepare(f2), E.prepare(g2)).value;
                return a == c;
            });
        }
    return t.result();
}

inline CheckResult galois_equivariance(Level level, std::uint64_t seed) {
    Tally t("C10", "[sigma_c x, sigma_c y] = c [x,y] for c = 3, 5");
    Rng rng(stream_seed(seed, 10));
    for (auto& b : bundles())
        for (std::uint64_t c : {3u, 5u})
            for (long i = 0; i < count(level, 25); ++i) {
                Elem x = b.random_unit(rng), y = b.random_unit(rng);
                t.run(where(b, i) + " c=" + std::to_string(c), [&] {
                    const std::uint64_t lhs = b.symbol(galois(x, c), galois(y, c));
                    return lhs == (c * b.symbol(x, y)) % b.modulus();
                });
            }
    return t.result();
}

inline CheckResult tr_coboundaries(Level level, std::uint64_t seed) {
    Tally t("C11", "TR kills (chi gamma - 1) b and (1 - phi) b");
    Rng rng(stream_seed(seed, 11));
    for (auto& b : bundles())
        for (long i = 0; i < count(level, 50); ++i) {
            const auto& E = b.engine();
            Ser a = random_laurent(rng, E.series(), rng.range(-12, -1), rng.range(0, 12));
            t.run(where(b, i), [&] {
                const CoeffElem<Word> chi = E.ring().from_word(word_from_big<Word>(E.series().chi(), E.precision()));
                const auto v1 = E.tr_map({cyclotomic_action(a).mul_coeff(chi) - a});
                const auto v2 = E.tr_map({a - frobenius(a)});
                return E.reduce(v1).value == 0 && E.reduce(v2).value == 0;
            });
        }
    return t.result();
}

inline CheckResult chi_factor(Level, std::uint64_t) {
    Tally t("C12", "(chi - 1)/log chi = 1 + 2^(n-1) mod 2^n");
    for (int n = 2; n <= 5; ++n)
        t.run("n=" + std::to_string(n), [&] {
            Params p;
            p.n = n;
            return chi_unit_factor(p) == 1 + (std::uint64_t(1) << (n - 1));
        });
    return t.result();
}

inline CheckResult precision_stability(Level level, std::uint64_t seed) {
    Tally t("C13", "doubling the guard keeps every class");
    Rng rng(stream_seed(seed, 13));
    auto& all = bundles();
    for (long i = 0; i < count(level, 20); ++i) {
        const Bundle& b = all[rng.below(all.size())];
        Elem x = b.random_unit(rng), y = b.random_unit(rng);
        t.run(where(b, i), [&] { return b.symbol(x, y) == b.symbol_wide(x, y); });
    }
    return t.result();
}

inline std::vector<std::function<CheckResult(Level, std::uint64_t)>> acceptance_suite() {
    return {slide_identity,      residue_average,    trace_of_log,      bilinearity,
            antisymmetry,        artin_hasse_agreement, two_paths,      quadratic_parity,
            lift_independence,   galois_equivariance, tr_coboundaries,  chi_factor,
            precision_stability};
}

// ---------------------------------------------------------------------------
// Module invariant suites

inline CheckResult coeff_field(Level level, std::uint64_t seed) {
    Tally t("coeff", "O_K/2^M ring, Frobenius and trace laws, d = 1..8");
    Rng rng(stream_seed(seed, 101));
    for (int d = 1; d <= 8; ++d) {
        auto R = CoeffRing<Word>::create(d, 40);
        for (long i = 0; i < count(level, 20); ++i) {
            auto a = random_coeff(rng, *R), b = random_coeff(rng, *R), u = random_coeff_unit(rng, *R);
            t.run("d=" + std::to_string(d) + " case " + std::to_string(i), [&] {
                bool ok = inv(u) * u == R->one();
                ok = ok && frobenius(a * b) == frobenius(a) * frobenius(b);
                ok = ok && frobenius(a + b) == frobenius(a) + frobenius(b);
                auto s = a;
                for (int k = 0; k < d; ++k) s = frobenius(s);
                ok = ok && s == a;
                ok = ok && trace(frobenius(a)) == trace(a);
                ok = ok && trace(a + b) == trace(a) + trace(b);
                ok = ok && (frobenius(a) - a * a).v2() >= 1;
                const auto tm = teichmuller(*R, static_cast<std::uint32_t>(rng.below(1u << d)));
                ok = ok && pow(tm, std::uint64_t(1) << d) == tm;
                return ok;
            });
        }
    }
    return t.result();
}

inline CheckResult series_laws(Level level, std::uint64_t seed) {
    Tally t("series", "inverse, phi/gamma homomorphisms, commutation, Leibniz, log");
    Rng rng(stream_seed(seed, 102));
    for (auto& bnd : bundles()) {
        const auto& S = bnd.engine().series();
        const int n = bnd.n();
        for (long i = 0; i < count(level, 100); ++i) {
            const long v = rng.range(-4, 4);
            Ser unit = Ser::monomial(random_coeff_unit(rng, S.ring()), v, S) +
                       random_laurent(rng, S, v + 1, v + 10) + random_laurent(rng, S, v - 2, v + 6).mul_int(2);
            Ser a = random_laurent(rng, S, rng.range(-6, 0), rng.range(0, 10));
            Ser b = random_laurent(rng, S, 0, rng.range(0, 8));
            Ser c = random_laurent(rng, S, 0, rng.range(0, 8));
            Ser f = random_principal_series(rng, S, rng.range(1, 10));
            Ser g = random_principal_series(rng, S, rng.range(1, 10));
            t.run(where(bnd, i), [&] {
                // Zero with its low exponents known, so the comparison is not vacuous.
                auto zero = [&](const Ser& s, int bits) { return certified_zero(s, bits) && s.prec() >= 0; };
                Ser one = Ser::from_int(1, S);
                bool ok = zero(unit * invert(unit) - one, n);
                ok = ok && zero(frobenius(cyclotomic_action(a)) - cyclotomic_action(frobenius(a)), n);
                ok = ok && zero(frobenius(b * c) - frobenius(b) * frobenius(c), n);
                ok = ok && zero(cyclotomic_action(b * c) - cyclotomic_action(b) * cyclotomic_action(c), n);
                ok = ok && zero(invariant_derivation(a * b) -
                                              invariant_derivation(a) * b - a * invariant_derivation(b),
                                          n);
                // Exact differentials have no residue.
                ok = ok && residue_of_product(invariant_derivation(a), S.one_plus_variable_inverse()).is_zero();
                // gamma F = F modulo pi for power series F.
                Ser w = (cyclotomic_action(b) - b) * S.pi_inverse();
                ok = ok && w.negative_part().is_zero() && w.scale() == 0;
                // chi gamma(1/pi + 1/2) - (1/pi + 1/2) is a power series.
                Ser u = S.pi_inverse() + one.half();
                const CoeffElem<Word> chi = S.ring().from_word(word_from_big<Word>(S.chi(), S.precision()));
                ok = ok && (cyclotomic_action(u).mul_coeff(chi) - u).negative_part().is_zero();
                ok = ok && zero(log_series(f * g) - log_series(f) - log_series(g), n);
                ok = ok && zero(frobenius_log(f) - (log_series(frobenius(f)) - log_series(f).mul_int(2)).half(), n);
                ok = ok && zero(dlog(f) - invariant_derivation(log_series(f)), n);
                return ok;
            });
        }
    }
    return t.result();
}

inline CheckResult field_laws(Level level, std::uint64_t seed) {
    Tally t("knfield", "K_n inverse, log homomorphism, lifts, Galois action, trace");
    Rng rng(stream_seed(seed, 103));
    for (auto& bnd : bundles()) {
        const auto& E = bnd.engine();
        const auto& K = E.field();
        for (long i = 0; i < count(level, 50); ++i) {
            Elem x = E.import(bnd.random_unit(rng)), y = E.import(bnd.random_unit(rng));
            const std::uint64_t c = 2 * rng.below(1u << bnd.n()) + 1;
            t.run(where(bnd, i), [&] {
                bool ok = inv(x) * x == K.one();
                ok = ok && certified_zero(kn_log(x * y) - kn_log(x) - kn_log(y), bnd.n());
                ok = ok && eval_at_root(E.lift(x), 1, K).numerator() == x;
                ok = ok && galois(x * y, c) == galois(x, c) * galois(y, c);
                ok = ok && kn_trace(galois(x, c)) == kn_trace(x);
                return ok;
            });
        }
    }
    return t.result();
}

inline CheckResult oracle_laws(Level level, std::uint64_t seed) {
    Tally t("oracle", "quadratic oracle: symmetry, multiplicativity, stability");
    Rng rng(stream_seed(seed, 104));
    const StableQuadraticOracle q(10);
    for (auto& bnd : bundles()) {
        if (bnd.config().d != 1 || bnd.config().n != 2) continue;
        for (long i = 0; i < count(level, 50); ++i) {
            Elem x = bnd.random_unit(rng), y1 = bnd.random_unit(rng), y2 = bnd.random_unit(rng);
            t.run(where(bnd, i), [&] {
                bool ok = q.symbol(x, y1) == q.symbol(y1, x);
                ok = ok && q.symbol(x, y1 * y2) == q.symbol(x, y1) * q.symbol(x, y2);
                ok = ok && q.symbol(x, -x) == 1 && q.symbol(x, y1 * y1) == 1;
                return ok;
            });
        }
    }
    return t.result();
}

inline CheckResult level_four_smoke(Level level, std::uint64_t seed) {
    Tally t("smoke", "n = 4 antisymmetry and Artin-Hasse agreement");
    Rng rng(stream_seed(seed, 105));
    static const Bundle b(1, 4);
    for (long i = 0; i < count(level, 4); ++i) {
        Elem x = b.random_unit(rng), y = b.random_unit(rng);
        t.run(where(b, i), [&] {
            bool ok = (b.symbol(x, y) + b.symbol(y, x)) % b.modulus() == 0;
            ok = ok && b.symbol(x, b.input_field().zeta()) == b.artin_hasse(x);
            return ok;
        });
    }
    return t.result();
}

inline std::vector<std::function<CheckResult(Level, std::uint64_t)>> module_suite() {
    return {coeff_field, series_laws, field_laws, oracle_laws, level_four_smoke};
}

inline std::string format_row(const CheckResult& r) {
    std::ostringstream os;
    os << (r.passed() ? "PASS" : "FAIL") << "  " << r.id;
    for (std::size_t i = r.id.size(); i < 9; ++i) os << ' ';
    os << r.title << "  [" << (r.cases - r.failures) << "/" << r.cases << "]";
    if (!r.first_failure.empty()) os << "  first failure: " << r.first_failure;
    return os.str();
}

}  // namespace hilbert2::checks
