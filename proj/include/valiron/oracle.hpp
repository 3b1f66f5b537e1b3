#ifndef VALIRON_ORACLE_HPP
#define VALIRON_ORACLE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "valiron/diffop.hpp"

namespace valiron {
namespace oracle {

// Untruncated multivariate polynomial with exact Gaussian-rational
// coefficients. This is the slow independent path the seeded corpus is
// checked against; it shares no truncation logic with Series<T>.
struct RationalPoly {
    unsigned long n = 1;
    std::map<MultiIndex, GaussRat> coeffs;

    RationalPoly() = default;
    explicit RationalPoly(unsigned long n_) : n(n_) {}

    void set(const MultiIndex& a, const GaussRat& c) {
        if (a.e.size() != n) throw domain_error("RationalPoly: arity mismatch");
        if (c.re.is_zero() && c.im.is_zero())
            coeffs.erase(a);
        else
            coeffs[a] = c;
    }
    GaussRat at(const MultiIndex& a) const {
        auto it = coeffs.find(a);
        return it == coeffs.end() ? GaussRat() : it->second;
    }
    uint64_t degree() const {
        uint64_t d = 0;
        for (const auto& [a, c] : coeffs)
            if (a.degree() > d) d = a.degree();
        return d;
    }
};

struct PolySymbol {
    unsigned long n = 1;
    std::map<MultiIndex, RationalPoly> table;
};

RationalPoly add(const RationalPoly& a, const RationalPoly& b);
RationalPoly multiply(const RationalPoly& a, const RationalPoly& b);
RationalPoly differentiate(const RationalPoly& f, const MultiIndex& a);
// f(z + c), exact binomial substitution coordinate by coordinate
RationalPoly shift_substitute(const RationalPoly& f, const std::vector<GaussRat>& c);

RationalPoly from_series(const ExactSeries& f);
ExactSeries to_series(const RationalPoly& f, unsigned long q_max);
PolySymbol from_symbol(const ExactSymbol& s);

// P f = sum_gamma f_gamma sum_{alpha <= gamma} a_alpha(z) gamma! z^(gamma-alpha)/(gamma-alpha)!
RationalPoly exact_apply(const PolySymbol& s, const RationalPoly& f);

// (q/(e sigma rho))^(q/rho), the radial maximizer value for a monomial under
// a constant order; the order overload rejects every other family.
BigFloat ln_closed_form_monomial_norm(unsigned long q, const BigFloat& rho, const BigFloat& sigma);
BigFloat closed_form_monomial_norm(unsigned long q, const BigFloat& rho, const BigFloat& sigma);
BigFloat closed_form_monomial_norm(const ProximateOrder& order, const BigFloat& sigma,
                                   unsigned long q);

struct StirlingRefs {
    BigFloat ln_factorial;
    BigFloat ln_double_factorial_odd;  // ln (2q-1)!! for the same q
};
// Plain summation, recomputed locally (no shared cache), q <= 10^4.
StirlingRefs stirling_refs(unsigned long q);

// Seeded random corpus: n cycles 1,2,3; |alpha| <= 6 and series degree <= 6;
// numerators and denominators bounded by 10^3 so exact round trips stay fast.
struct CorpusItem {
    uint64_t seed = 0;
    unsigned long n = 1;
    ExactSymbol symbol;
    ExactSeries probe;  // random polynomial, degree <= 4
};

std::vector<CorpusItem> make_corpus(size_t count = 100, uint64_t master_seed = 0x5eedc0deULL);

std::string digest_series(const ExactSeries& f);
std::string digest_symbol(const ExactSymbol& s);
std::string digest_hom(const ExactHomImages& h);
std::string digest_poly(const RationalPoly& f);

// One corpus item pushed through both paths: digests for the manifest plus
// the two exactness verdicts (conversion round trip, apply agreement).
struct CorpusRecord {
    std::string seed;  // decimal
    unsigned long n = 1;
    size_t symbol_entries = 0;
    std::string digest_symbol;
    std::string digest_hom;
    std::string digest_apply;
    bool roundtrip_ok = false;
    bool apply_ok = false;
};

CorpusRecord corpus_record(const CorpusItem& item);

}  // namespace oracle
}  // namespace valiron

#endif
