#ifndef VALIRON_SERIES_HPP
#define VALIRON_SERIES_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "valiron/bigfloat.hpp"
#include "valiron/errors.hpp"
#include "valiron/multiindex.hpp"
#include "valiron/proxorder.hpp"
#include "valiron/rational.hpp"

namespace valiron {

inline bool coeff_is_zero(const GaussRat& v) { return v.re.is_zero() && v.im.is_zero(); }
inline bool coeff_is_zero(const BigComplex& v) { return v.is_zero(); }

template <class T> T scalar_from_rat(const Rat& r);
template <> inline GaussRat scalar_from_rat<GaussRat>(const Rat& r) { return GaussRat(r); }
template <> inline BigComplex scalar_from_rat<BigComplex>(const Rat& r) {
    return BigComplex(r.to_bigfloat());
}

// Truncated entire series sum f_alpha z^alpha over |alpha| <= q_max. Absent
// key means coefficient zero; set() keeps that canonical by erasing zeros.
// T is GaussRat on the exact paths, BigComplex on the analysis paths.
template <class T>
struct Series {
    unsigned long n = 1;
    unsigned long q_max = 0;
    std::map<MultiIndex, T> coeffs;

    Series() = default;
    Series(unsigned long n_, unsigned long q_max_) : n(n_), q_max(q_max_) {}

    const T* find(const MultiIndex& a) const {
        auto it = coeffs.find(a);
        return it == coeffs.end() ? nullptr : &it->second;
    }
    T at(const MultiIndex& a) const {
        const T* p = find(a);
        return p ? *p : T();
    }
    void set(const MultiIndex& a, T v) {
        if (a.e.size() != n) throw domain_error("series: index arity != n");
        if (a.degree() > q_max) throw domain_error("series: |alpha| exceeds q_max");
        if (coeff_is_zero(v))
            coeffs.erase(a);
        else
            coeffs[a] = std::move(v);
    }
    void add_to(const MultiIndex& a, const T& v) { set(a, at(a) + v); }
};

using ExactSeries = Series<GaussRat>;
using NumSeries = Series<BigComplex>;

template <class T>
Series<T> add(const Series<T>& f, const Series<T>& g) {
    if (f.n != g.n) throw domain_error("series add: mismatched n");
    Series<T> r(f.n, f.q_max > g.q_max ? f.q_max : g.q_max);
    r.coeffs = f.coeffs;
    for (const auto& [a, v] : g.coeffs) {
        auto it = r.coeffs.find(a);
        if (it == r.coeffs.end())
            r.coeffs.emplace(a, v);
        else {
            it->second += v;
            if (coeff_is_zero(it->second)) r.coeffs.erase(it);
        }
    }
    return r;
}

template <class T>
Series<T> scale(const T& c, const Series<T>& f) {
    Series<T> r(f.n, f.q_max);
    if (coeff_is_zero(c)) return r;
    for (const auto& [a, v] : f.coeffs) r.coeffs.emplace(a, c * v);
    return r;
}

// Exact product; the truncation order is the sum so nothing is dropped as
// long as both factors are genuinely truncated polynomials.
template <class T>
Series<T> multiply(const Series<T>& f, const Series<T>& g) {
    if (f.n != g.n) throw domain_error("series multiply: mismatched n");
    Series<T> r(f.n, f.q_max + g.q_max);
    for (const auto& [a, va] : f.coeffs)
        for (const auto& [b, vb] : g.coeffs) r.add_to(a + b, va * vb);
    return r;
}

// f(z) * c * z^g
template <class T>
Series<T> shift_monomial(const Series<T>& f, const MultiIndex& g, const T& c) {
    Series<T> r(f.n, f.q_max + g.degree());
    if (coeff_is_zero(c)) return r;
    for (const auto& [a, v] : f.coeffs) {
        T w = c * v;
        if (!coeff_is_zero(w)) r.coeffs.emplace(a + g, std::move(w));
    }
    return r;
}

// d^alpha f, coefficient shift: coefficient of z^gamma is
// f_{gamma+alpha} * (gamma+alpha)! / gamma!, computed exactly.
template <class T>
Series<T> derivative(const Series<T>& f, const MultiIndex& a) {
    if (a.e.size() != f.n) throw domain_error("derivative: index arity != n");
    unsigned long da = a.degree();
    Series<T> r(f.n, f.q_max > da ? f.q_max - da : 0);
    for (const auto& [b, v] : f.coeffs) {
        if (!a.leq(b)) continue;
        MultiIndex g = b - a;
        Rat mult(1);
        for (size_t i = 0; i < a.e.size(); ++i)
            for (uint32_t j = 1; j <= a.e[i]; ++j)
                mult *= Rat(static_cast<long>(g.e[i]) + static_cast<long>(j));
        r.coeffs.emplace(g, scalar_from_rat<T>(mult) * v);
    }
    return r;
}

template <class T>
T evaluate(const Series<T>& f, const std::vector<T>& z) {
    if (z.size() != f.n) throw domain_error("evaluate: point arity != n");
    T acc{};
    for (const auto& [a, v] : f.coeffs) {
        T term = v;
        for (size_t i = 0; i < a.e.size(); ++i)
            for (uint32_t j = 0; j < a.e[i]; ++j) term = term * z[i];
        acc += term;
    }
    return acc;
}

NumSeries to_numeric(const ExactSeries& f);

// ln sum_{|alpha|=q} |f_alpha| for q = 0..q_max (-inf on zero parts): the
// triangle-inequality upper bound for K_q, exact for n = 1.
std::vector<BigFloat> level_ln_upper(const NumSeries& f);
// ln max_{|alpha|=q} |f_alpha|.
std::vector<BigFloat> level_ln_max(const NumSeries& f);

struct HomNormProfile {
    unsigned long q_max = 0;
    std::vector<BigFloat> ln_lower, ln_upper;  // index q; -inf for zero parts
};

// Interval bracketing K_q = sup_{|z|<=1} |f_q(z)|. Upper: coefficient sum.
// Lower: evaluation at axis points, the uniform point, and `samples` seeded
// random sphere points, each improved by coordinate-wise phase alignment.
HomNormProfile hom_norm_profile(const NumSeries& f, unsigned samples = 8);

enum class WeightKind {
    original,    // weight exp(varrho(r) ln r), the defining seminorm weight
    normalized   // spliced monotone weight, the hat-varrho internals
};

struct WeightedNorm {
    BigFloat value;      // upper estimate of sup |f| exp(-sigma w(r))
    BigFloat ln_value;
    BigFloat argmax_r;   // 0 when the sup is attained in the r -> 0 limit
    bool tail_suspect = false;  // argmax within 1% of r*(q_max)
};

WeightedNorm weighted_norm(const NumSeries& f, const NormalizedOrder& order,
                           const BigFloat& sigma, unsigned radial_grid = 512,
                           WeightKind kind = WeightKind::original);

// ln sup_{r>0} r^q exp(-sigma w(r)); the radial factor of a monomial norm.
BigFloat ln_monomial_norm(const NormalizedOrder& order, const BigFloat& sigma,
                          unsigned long q, WeightKind kind = WeightKind::original);

// ln of the sphere maximum of |z^alpha| / r^q on |z| = r (Euclidean):
// sqrt(prod alpha_i^alpha_i / q^q), in logs; 0 for q = 0.
BigFloat ln_sphere_factor(const MultiIndex& a);

struct TypeEstimate {
    BigFloat sigma_hat{0L};
    unsigned long q_lo = 0, q_hi = 0;
    BigFloat trend_slope{0L};
    std::string confidence_note;
};

TypeEstimate estimate_type(const NumSeries& f, const NormalizedOrder& order,
                           const BigFloat& window_frac = BigFloat::parse("0.25"));

enum class Verdict { Member, NotMember, Inconclusive };
std::string verdict_name(Verdict v);

struct MembershipVerdict {
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::pair<std::string, BigFloat>> fitted;
    BigFloat margin{0L};
    std::string diagnostics;
};

// minimal-type test: limsup (K_q G_q)^(rho/q) <= sigma.
MembershipVerdict classify_minimal_type(const NumSeries& f, const NormalizedOrder& order,
                                        const BigFloat& sigma, const GrowthScale& scale);
// coefficient test against the threshold sqrt(n)^rho * sigma.
MembershipVerdict classify_coeff_bound(const NumSeries& f, const NormalizedOrder& order,
                                       const BigFloat& sigma, const GrowthScale& scale);
// normal-type test: (max|f_alpha| G_q)^(rho/q) bounded.
MembershipVerdict classify_normal_type(const NumSeries& f, const NormalizedOrder& order,
                                       const GrowthScale& scale);

// checks ||z^q|| <= C G_q sigma'^(-q/rho); C fitted on q <= q_max/2 and
// re-checked on the held-out upper half.
LemmaReport monomial_norm_check(const NormalizedOrder& order, const BigFloat& sigma,
                                const BigFloat& sigma_prime, const GrowthScale& scale,
                                unsigned long q_max);

// checks ||d^alpha f|| / alpha! <= C (2 kappa sqrt(n)^rho sigma)^(q/rho)
// / G_q * ||f||; fitted C must show no growth trend over the tail levels.
LemmaReport derivative_norm_check(const NumSeries& f, const NormalizedOrder& order,
                                  const BigFloat& sigma, const BigFloat& kappa,
                                  const GrowthScale& scale, unsigned long q_max);

// Taylor tail bound: sum_{|alpha|>Q} |f_alpha| s_alpha R_q at
// sigma_eff = sqrt(n)^rho (sigma + epsilon).
BigFloat partial_sum_residual(const NumSeries& f, const NormalizedOrder& order,
                              const BigFloat& sigma, const BigFloat& epsilon,
                              unsigned long Q);

}  // namespace valiron

#endif
