#ifndef VALIRON_DIFFOP_HPP
#define VALIRON_DIFFOP_HPP

#include <map>
#include <string>
#include <vector>

#include "valiron/series.hpp"

namespace valiron {

// Operator symbol P = sum a_alpha(z) d^alpha over |alpha| <= a_max; absent
// alpha means a_alpha = 0.
template <class T>
struct Symbol {
    unsigned long n = 1;
    unsigned long a_max = 0;
    std::map<MultiIndex, Series<T>> table;

    Symbol() = default;
    Symbol(unsigned long n_, unsigned long a_max_) : n(n_), a_max(a_max_) {}

    void set(const MultiIndex& a, Series<T> s) {
        if (a.e.size() != n || s.n != n) throw domain_error("symbol: arity mismatch");
        if (a.degree() > a_max) throw domain_error("symbol: |alpha| exceeds a_max");
        if (s.coeffs.empty())
            table.erase(a);
        else
            table[a] = std::move(s);
    }
};

using ExactSymbol = Symbol<GaussRat>;
using NumSymbol = Symbol<BigComplex>;

NumSymbol to_numeric(const ExactSymbol& s);

// Image table of a homomorphism on normalized monomials: images[beta] holds
// F z^beta / beta!, complete for every |beta| <= b_max (zero series allowed,
// but the key must be present).
template <class T>
struct HomImages {
    unsigned long n = 1;
    unsigned long b_max = 0;
    std::map<MultiIndex, Series<T>> images;
};

using ExactHomImages = HomImages<GaussRat>;
using NumHomImages = HomImages<BigComplex>;

// a_alpha(z) = sum_{beta <= alpha} (-z)^(alpha-beta)/(alpha-beta)! * images[beta].
template <class T>
Symbol<T> hom_to_symbol(const HomImages<T>& im) {
    std::string missing;
    unsigned long miss = 0;
    for (const auto& b : indices_up_to(im.n, im.b_max))
        if (!im.images.count(b)) {
            if (miss < 8) missing += (missing.empty() ? "" : ", ") + b.str();
            ++miss;
        }
    if (miss)
        throw domain_error("hom_to_symbol: image table missing " + std::to_string(miss) +
                           " beta: " + missing + (miss > 8 ? ", ..." : ""));
    Symbol<T> s(im.n, im.b_max);
    for (const auto& a : indices_up_to(im.n, im.b_max)) {
        Series<T> acc(im.n, 0);
        for (const auto& [b, fb] : im.images) {
            if (!b.leq(a) || fb.coeffs.empty()) continue;
            MultiIndex d = a - b;
            Rat c = Rat(1) / d.factorial_rat();
            T cc = scalar_from_rat<T>(d.degree() % 2 ? -c : c);
            acc = add(acc, shift_monomial(fb, d, cc));
        }
        if (!acc.coeffs.empty()) s.table.emplace(a, std::move(acc));
    }
    return s;
}

// images[beta] = sum_{alpha <= beta} a_alpha(z) z^(beta-alpha)/(beta-alpha)!,
// i.e. P z^beta / beta!; the table is emitted complete.
template <class T>
HomImages<T> symbol_to_hom(const Symbol<T>& s) {
    HomImages<T> im;
    im.n = s.n;
    im.b_max = s.a_max;
    for (const auto& b : indices_up_to(s.n, s.a_max)) {
        Series<T> acc(s.n, 0);
        for (const auto& [a, aa] : s.table) {
            if (!a.leq(b)) continue;
            MultiIndex d = b - a;
            T cc = scalar_from_rat<T>(Rat(1) / d.factorial_rat());
            acc = add(acc, shift_monomial(aa, d, cc));
        }
        im.images.emplace(b, std::move(acc));
    }
    return im;
}

// sum_{|alpha| <= a_max} a_alpha d^alpha f, truncated to f.q_max - a_max so
// every retained output coefficient is fully determined by the data.
template <class T>
Series<T> apply_symbol_truncated(const Symbol<T>& s, const Series<T>& f) {
    if (s.n != f.n) throw domain_error("apply_operator: mismatched n");
    if (f.q_max < s.a_max) throw domain_error("apply_operator: f.q_max < a_max");
    unsigned long out_q = f.q_max - s.a_max;
    Series<T> out(f.n, out_q);
    for (const auto& [a, aa] : s.table) {
        Series<T> d = derivative(f, a);
        for (const auto& [ga, va] : aa.coeffs) {
            if (ga.degree() > out_q) continue;
            for (const auto& [gd, vd] : d.coeffs) {
                MultiIndex g = ga + gd;
                if (g.degree() > out_q) continue;
                out.add_to(g, va * vd);
            }
        }
    }
    return out;
}

struct ExactApply {
    ExactSeries result;
    BigFloat tail_bound{0L};
};
struct NumApply {
    NumSeries result;
    BigFloat tail_bound{0L};
};

// Operator application with a convergence-control tail estimate for
// the |alpha| > a_max cut, extrapolated per level from the symbol's own
// norm profile (geometric in ln units, +inf when no decay is visible).
ExactApply apply_operator(const ExactSymbol& s, const ExactSeries& f,
                          const NormalizedOrder& dst, const BigFloat& sigma_out);
NumApply apply_operator(const NumSymbol& s, const NumSeries& f,
                        const NormalizedOrder& dst, const BigFloat& sigma_out);

enum class SymbolMode { NormalType, MinimalType };
std::string symbol_mode_name(SymbolMode m);

struct ProbeResult {
    BigFloat probe;                  // lambda (NormalType) or sigma (MinimalType)
    bool ok = false;
    bool via_rate_extrapolation = false;  // passed through the decaying-rate test
    bool definitive_fail = false;         // diverging lower-bound witness
    BigFloat partner{0L};            // chosen sigma resp. fitted lambda
    BigFloat C{0L};                  // fitted constant
    BigFloat y_slope_span{0L};       // tail slope of ln(g_q/lambda^q) x q_end
    BigFloat rate_slope_span{0L};    // tail slope of the per-q growth rate x q_end
    BigFloat ln_witness_max = BigFloat::neg_inf();
    unsigned long witness_cross_q = 0;  // smallest q with witness > 1e8 (0: never)
    std::string note;
};

struct SymbolClassVerdict {
    SymbolMode mode = SymbolMode::NormalType;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<ProbeResult> probes;
    bool extrapolated = false;  // some probe needed the rate test
    std::string diagnostics;
};

// lambda resp. sigma ladder 2^-6 .. 2^6.
std::vector<BigFloat> default_probe_ladder();

// Membership of the symbol in the operator class D_{rho1->rho2} (NormalType,
// "for all lambda exists sigma") or D_{rho1->rho2,0} (MinimalType, "for all
// sigma exists lambda"), decided per probe on the truncated data. Throws
// when r^varrho1 = O(r^varrho2) fails on the comparison grid.
SymbolClassVerdict classify_symbol(const NumSymbol& s, const NormalizedOrder& src,
                                   const GrowthScale& src_scale, const NormalizedOrder& dst,
                                   SymbolMode mode, std::vector<BigFloat> probes = {});

SymbolClassVerdict classify_symbol(const ExactSymbol& s, const NormalizedOrder& src,
                                   const GrowthScale& src_scale, const NormalizedOrder& dst,
                                   SymbolMode mode, std::vector<BigFloat> probes = {});

// The final Example's d^2-part: sum_j (it/2)^j/j! d^(2j), n = 1. The
// exp((t^2/2) d) factor and the e^(-itz) multiplication factor are separate
// options (the global phase e^(-it^3/6) is dropped to keep entries rational;
// it has modulus 1 and is invisible to every norm here).
ExactSymbol schrodinger_symbol(const Rat& t, unsigned long j_max,
                               bool include_shift_factor = false,
                               bool include_prefactor = false);

struct ExampleRatio {
    std::vector<BigFloat> ln_R;  // j = 1..j_max
    unsigned long first_small = 0;  // least j with R_i < 1e-8 for all i >= j (0: none)
    std::vector<std::pair<BigFloat, BigFloat>> limit_check;  // (t, t/phi(t)^2)
};

// ln R_j for R_j = (2j/phi(2j)^2 * 2e|t|/eps^2)^j (2j-1)!!/(2j)^j, plus the
// grid check of t/phi(t)^2 -> 0. Requires rho = 2.
ExampleRatio example_ratio(const NormalizedOrder& order, const BigFloat& t,
                           const BigFloat& eps, unsigned long j_max);

bool series_equal(const ExactSeries& a, const ExactSeries& b);
bool symbol_equal(const ExactSymbol& a, const ExactSymbol& b);

}  // namespace valiron

#endif
