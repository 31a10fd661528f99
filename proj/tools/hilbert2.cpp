#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hilbert2/checks.hpp"
#include "hilbert2/expr.hpp"
#include "hilbert2/knfield.hpp"
#include "hilbert2/symbol.hpp"

namespace {

using hilbert2::Params;
using json = nlohmann::ordered_json;

enum Exit { kOk = 0, kUsage = 1, kDisagree = 2, kPrecision = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Elements are read at n + 4G bits: enough for a retry at 2G and its recheck.
int parse_precision(const Params& p) { return p.n + 4 * p.guard; }

template <class W>
void require_principal(const hilbert2::KnElem<W>& x, const std::string& name) {
    if (hilbert2::is_principal_unit(x)) return;
    auto v = hilbert2::valuation(x);
    std::ostringstream os;
    os << name << " is not a principal unit (valuation ";
    if (v)
        os << *v;
    else
        os << "infinite";
    if (v && *v == 0) os << ", residue is not 1";
    os << ")";
    throw UsageError(os.str());
}

template <class W>
hilbert2::KnElem<W> parse_input(const std::string& src, const hilbert2::KnContext<W>& K, const std::string& name) {
    try {
        return hilbert2::parse_element(src, K);
    } catch (const hilbert2::ParseError& e) {
        throw UsageError(name + ": " + e.what());
    }
}

struct SymbolArgs {
    Params params;
    std::string x, y;
    std::string emit = "text";
    std::string paths = "main";
    bool lift_out = false;
    bool no_recheck = false;
};

int cmd_symbol(SymbolArgs a) {
    a.params.recheck = !a.no_recheck;
    a.params.validate();
    const Params& p = a.params;
    const hilbert2::Paths paths = a.paths == "cup" ? hilbert2::Paths::cup
                                  : a.paths == "both" ? hilbert2::Paths::both
                                                      : hilbert2::Paths::main;
    return hilbert2::with_word(parse_precision(p), [&]<class W>() {
        auto R = hilbert2::CoeffRing<W>::create(p.d, parse_precision(p));
        auto K = hilbert2::KnContext<W>::create(R, p.n);
        const auto x = parse_input(a.x, *K, "x");
        const auto y = parse_input(a.y, *K, "y");
        require_principal(x, "x");
        require_principal(y, "y");
        const auto rep = hilbert2::evaluate_symbol(x, y, p, paths);

        std::string fx, gy;
        if (a.lift_out) {
            hilbert2::with_word(p.precision(), [&]<class V>() {
                hilbert2::SymbolEngine<V> eng(p.d, p.n, p.guard, p.window);
                fx = eng.lift(eng.import(x)).str();
                gy = eng.lift(eng.import(y)).str();
                return 0;
            });
        }
        const auto& cert = rep.main.certificate;
        const bool disagree = cert.paths_agreed && !*cert.paths_agreed;
        if (a.emit == "json") {
            json out;
            out["symbol"] = rep.main.value;
            out["modulus"] = rep.main.modulus;
            out["n"] = p.n;
            out["d"] = p.d;
            out["guard_consumed"] = cert.guard_consumed;
            out["paths_agreed"] = cert.paths_agreed ? json(*cert.paths_agreed) : json(nullptr);
            if (rep.cup && paths == hilbert2::Paths::both) out["cup_symbol"] = rep.cup->value;
            out["paths"] = a.paths;
            out["recheck_precision"] = cert.recheck_precision;
            if (a.lift_out) {
                out["lift_x"] = fx;
                out["lift_y"] = gy;
            }
            std::cout << out.dump() << "\n";
        } else {
            std::cout << "[x,y] = " << rep.main.value << " mod " << rep.main.modulus << "\n";
            if (paths == hilbert2::Paths::both)
                std::cout << "cup path = " << rep.cup->value << " (" << (disagree ? "DISAGREES" : "agrees") << ")\n";
            std::cout << "guard consumed: " << cert.guard_consumed << " of " << p.guard << " bits";
            if (cert.recheck_precision) std::cout << ", rechecked at precision " << cert.recheck_precision;
            std::cout << "\n";
            if (a.lift_out) std::cout << "f = " << fx << "\ng = " << gy << "\n";
        }
        if (disagree) {
            std::cerr << "error: the main formula and the cup product path disagree\n";
            return static_cast<int>(kDisagree);
        }
        return static_cast<int>(kOk);
    });
}

struct TableArgs {
    Params params;
    std::string gens;
    std::string emit = "text";
};

std::vector<std::string> split_gens(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    for (const auto& g : out)
        if (g.find_first_not_of(" \t") == std::string::npos) throw UsageError("empty generator in --gens");
    return out;
}

int cmd_table(TableArgs a) {
    a.params.validate();
    const Params& p = a.params;
    if (a.gens.find_first_not_of(" \t") == std::string::npos) throw UsageError("--gens must list at least one element");
    const auto names = split_gens(a.gens);
    return hilbert2::with_word(parse_precision(p), [&]<class W>() {
        auto R = hilbert2::CoeffRing<W>::create(p.d, parse_precision(p));
        auto K = hilbert2::KnContext<W>::create(R, p.n);
        std::vector<hilbert2::KnElem<W>> g;
        for (std::size_t i = 0; i < names.size(); ++i) {
            const std::string label = "generator " + std::to_string(i + 1);
            g.push_back(parse_input(names[i], *K, label));
            require_principal(g.back(), label);
        }
        std::vector<std::vector<std::uint64_t>> m(g.size(), std::vector<std::uint64_t>(g.size()));
        int consumed = 0;
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < g.size(); ++j) {
                auto v = hilbert2::hilbert_symbol(g[i], g[j], p);
                m[i][j] = v.value;
                consumed = std::max(consumed, v.certificate.guard_consumed);
            }
        if (a.emit == "json") {
            json out;
            out["n"] = p.n;
            out["d"] = p.d;
            out["modulus"] = std::uint64_t(1) << p.n;
            out["gens"] = names;
            out["matrix"] = m;
            out["guard_consumed"] = consumed;
            std::cout << out.dump() << "\n";
        } else {
            std::size_t width = 0;
            for (const auto& s : names) width = std::max(width, s.size());
            std::cout << "[g_i, g_j] mod " << (std::uint64_t(1) << p.n) << "\n";
            for (std::size_t i = 0; i < g.size(); ++i) {
                std::cout << names[i] << std::string(width - names[i].size(), ' ') << " |";
                for (std::size_t j = 0; j < g.size(); ++j) std::cout << ' ' << m[i][j];
                std::cout << "\n";
            }
        }
        return static_cast<int>(kOk);
    });
}

int cmd_selfcheck(const std::string& level, std::uint64_t seed) {
    using namespace hilbert2::checks;
    const Level lv = level == "full" ? Level::full : Level::fast;
    std::cout << "selfcheck level=" << level << " seed=" << seed << "\n";
    bool all = true;
    auto run = [&](const auto& suite) {
        for (const auto& check : suite) {
            const CheckResult r = check(lv, seed);
            all = all && r.passed();
            std::cout << format_row(r) << std::endl;
        }
    };
    run(module_suite());
    run(acceptance_suite());
    std::cout << (all ? "all checks passed" : "some checks FAILED") << "\n";
    return all ? kOk : kUsage;
}

void add_field_options(CLI::App* cmd, Params& p) {
    cmd->add_option("--n", p.n, "level n (K_n = K(zeta_{2^n}))")->required()->check(CLI::Range(2, 8));
    cmd->add_option("--d", p.d, "degree of the unramified base K over Q_2")->required()->check(CLI::Range(1, 8));
    cmd->add_option("--guard", p.guard, "guard bits")->check(CLI::Range(8, 96));
    cmd->add_option("--window", p.window, "exponent window N (0 selects the default)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2^n-th Hilbert symbols of principal units of K(zeta_{2^n})"};
    app.require_subcommand(1);

    SymbolArgs sa;
    auto* sym = app.add_subcommand("symbol", "compute [x,y] mod 2^n");
    add_field_options(sym, sa.params);
    sym->add_option("--x", sa.x, "first element, a polynomial in t and w")->required();
    sym->add_option("--y", sa.y, "second element")->required();
    sym->add_option("--emit", sa.emit, "output format")->check(CLI::IsMember({"text", "json"}));
    sym->add_option("--paths", sa.paths, "evaluation path")->check(CLI::IsMember({"main", "cup", "both"}));
    sym->add_flag("--lift-out", sa.lift_out, "print the series lifts f and g");
    sym->add_flag("--no-recheck", sa.no_recheck, "skip the doubled-guard recheck");

    std::string level = "fast";
    std::uint64_t seed = 1;
    auto* self = app.add_subcommand("selfcheck", "run the invariant and acceptance suites");
    self->add_option("--level", level, "suite size")->check(CLI::IsMember({"fast", "full"}));
    self->add_option("--seed", seed, "random seed");

    TableArgs ta;
    auto* table = app.add_subcommand("table", "matrix of symbols over a list of generators");
    add_field_options(table, ta.params);
    table->add_option("--gens", ta.gens, "comma-separated elements")->required();
    table->add_option("--emit", ta.emit, "output format")->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*sym) return cmd_symbol(sa);
        if (*self) return cmd_selfcheck(level, seed);
        if (*table) return cmd_table(ta);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const hilbert2::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const hilbert2::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const hilbert2::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kPrecision;
    }
    return kUsage;
}
