#include "valiron/oracle.hpp"

#include <gmp.h>

#include "valiron/rng.hpp"

namespace valiron {
namespace oracle {

namespace {

Rat binomial(unsigned long m, unsigned long k) {
    Rat r;
    mpz_bin_uiui(mpq_numref(r.raw()), m, k);
    return r;
}

// gamma!/(gamma-alpha)! as an exact rational, alpha <= gamma
Rat falling_factorial(const MultiIndex& gamma, const MultiIndex& alpha) {
    Rat r(1);
    for (size_t i = 0; i < gamma.e.size(); ++i)
        for (uint32_t m = gamma.e[i] - alpha.e[i] + 1; m <= gamma.e[i]; ++m)
            r = r * Rat(static_cast<long>(m));
    return r;
}

void accumulate(RationalPoly& acc, const MultiIndex& a, const GaussRat& c) {
    if (c.re.is_zero() && c.im.is_zero()) return;
    auto it = acc.coeffs.find(a);
    if (it == acc.coeffs.end()) {
        acc.coeffs.emplace(a, c);
        return;
    }
    it->second += c;
    if (it->second.re.is_zero() && it->second.im.is_zero()) acc.coeffs.erase(it);
}

}  // namespace

RationalPoly add(const RationalPoly& a, const RationalPoly& b) {
    if (a.n != b.n) throw domain_error("oracle add: arity mismatch");
    RationalPoly out = a;
    for (const auto& [g, c] : b.coeffs) accumulate(out, g, c);
    return out;
}

RationalPoly multiply(const RationalPoly& a, const RationalPoly& b) {
    if (a.n != b.n) throw domain_error("oracle multiply: arity mismatch");
    RationalPoly out(a.n);
    for (const auto& [g1, c1] : a.coeffs)
        for (const auto& [g2, c2] : b.coeffs) accumulate(out, g1 + g2, c1 * c2);
    return out;
}

RationalPoly differentiate(const RationalPoly& f, const MultiIndex& a) {
    if (a.e.size() != f.n) throw domain_error("oracle differentiate: arity mismatch");
    RationalPoly out(f.n);
    for (const auto& [g, c] : f.coeffs) {
        if (!a.leq(g)) continue;
        out.coeffs.emplace(g - a, c * GaussRat(falling_factorial(g, a)));
    }
    return out;
}

RationalPoly shift_substitute(const RationalPoly& f, const std::vector<GaussRat>& c) {
    if (c.size() != f.n) throw domain_error("oracle shift_substitute: arity mismatch");
    RationalPoly cur = f;
    for (size_t i = 0; i < c.size(); ++i) {
        if (c[i].re.is_zero() && c[i].im.is_zero()) continue;
        RationalPoly next(f.n);
        for (const auto& [g, coef] : cur.coeffs) {
            uint32_t gi = g.e[i];
            GaussRat cpow(Rat(1));  // c_i^(gi - m), built downward from m = gi
            for (uint32_t m = gi + 1; m-- > 0;) {
                MultiIndex t = g;
                t.e[i] = m;
                accumulate(next, t, coef * cpow * GaussRat(binomial(gi, m)));
                cpow = cpow * c[i];
            }
        }
        cur = std::move(next);
    }
    return cur;
}

RationalPoly from_series(const ExactSeries& f) {
    RationalPoly out(f.n);
    out.coeffs = f.coeffs;
    return out;
}

ExactSeries to_series(const RationalPoly& f, unsigned long q_max) {
    ExactSeries out(f.n, q_max);
    for (const auto& [g, c] : f.coeffs) out.set(g, c);
    return out;
}

PolySymbol from_symbol(const ExactSymbol& s) {
    PolySymbol out;
    out.n = s.n;
    for (const auto& [a, aa] : s.table) out.table.emplace(a, from_series(aa));
    return out;
}

RationalPoly exact_apply(const PolySymbol& s, const RationalPoly& f) {
    if (s.n != f.n) throw domain_error("oracle exact_apply: arity mismatch");
    RationalPoly out(f.n);
    for (const auto& [gamma, fg] : f.coeffs)
        for (const auto& [alpha, aa] : s.table) {
            if (!alpha.leq(gamma)) continue;
            GaussRat c = fg * GaussRat(falling_factorial(gamma, alpha));
            MultiIndex rest = gamma - alpha;
            for (const auto& [g, ac] : aa.coeffs) accumulate(out, g + rest, ac * c);
        }
    return out;
}

BigFloat ln_closed_form_monomial_norm(unsigned long q, const BigFloat& rho, const BigFloat& sigma) {
    if (!(rho > BigFloat(0L)) || !(sigma > BigFloat(0L)))
        throw domain_error("closed_form_monomial_norm: rho and sigma must be positive");
    if (q == 0) return BigFloat(0L);
    BigFloat qf(q);
    return (qf / rho) * (log(qf) - BigFloat(1L) - log(sigma) - log(rho));
}

BigFloat closed_form_monomial_norm(unsigned long q, const BigFloat& rho, const BigFloat& sigma) {
    return exp(ln_closed_form_monomial_norm(q, rho, sigma));
}

BigFloat closed_form_monomial_norm(const ProximateOrder& order, const BigFloat& sigma,
                                   unsigned long q) {
    if (order.family != Family::Constant)
        throw domain_error("closed_form_monomial_norm: unsupported for non-constant orders");
    return closed_form_monomial_norm(q, order.rho, sigma);
}

StirlingRefs stirling_refs(unsigned long q) {
    if (q > 10000UL) throw domain_error("stirling_refs: q must be <= 10^4");
    StirlingRefs out;
    BigFloat lf(0L), ldf(0L);
    for (unsigned long m = 1; m <= q; ++m) {
        lf += log(BigFloat(m));
        ldf += log(BigFloat(2 * m - 1));
    }
    out.ln_factorial = lf;
    out.ln_double_factorial_odd = ldf;
    return out;
}

namespace {

Rat random_rat(SplitMix64& rng) {
    long num = static_cast<long>(1 + rng.below(1000));
    if (rng.below(2)) num = -num;
    long den = static_cast<long>(1 + rng.below(1000));
    return Rat(num) / Rat(den);
}

GaussRat random_coeff(SplitMix64& rng) {
    switch (rng.below(4)) {
        case 0: return GaussRat(random_rat(rng));
        case 1: return GaussRat(Rat(0), random_rat(rng));
        default: {
            Rat re = random_rat(rng);
            return GaussRat(re, random_rat(rng));
        }
    }
}

MultiIndex random_index(SplitMix64& rng, unsigned long n, unsigned long deg_max) {
    for (;;) {
        MultiIndex a(n);
        for (unsigned long i = 0; i < n; ++i)
            a.e[i] = static_cast<uint32_t>(rng.below(deg_max + 1));
        if (a.degree() <= deg_max) return a;
    }
}

}  // namespace

std::vector<CorpusItem> make_corpus(size_t count, uint64_t master_seed) {
    SplitMix64 master(master_seed);
    std::vector<CorpusItem> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        CorpusItem item;
        item.seed = master.next();
        item.n = 1 + (i % 3);
        SplitMix64 rng(item.seed);
        item.symbol = ExactSymbol(item.n, 6);
        size_t entries = 1 + rng.below(5);
        for (size_t k = 0; k < entries; ++k) {
            MultiIndex alpha = random_index(rng, item.n, 6);
            ExactSeries a(item.n, 6);
            size_t terms = 1 + rng.below(4);
            for (size_t t = 0; t < terms; ++t)
                a.set(random_index(rng, item.n, 6), random_coeff(rng));
            item.symbol.set(alpha, std::move(a));
        }
        item.probe = ExactSeries(item.n, 4);
        size_t terms = 1 + rng.below(4);
        for (size_t t = 0; t < terms; ++t)
            item.probe.set(random_index(rng, item.n, 4), random_coeff(rng));
        out.push_back(std::move(item));
    }
    return out;
}

namespace {

void canon_series(std::string& s, const ExactSeries& f) {
    for (const auto& [g, c] : f.coeffs)
        s += g.str() + ":" + c.re.str() + "," + c.im.str() + ";";
}

std::string hex16(uint64_t h) {
    static const char* d = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = d[h & 0xF];
        h >>= 4;
    }
    return s;
}

std::string digest_of(const std::string& s) { return hex16(fnv1a(s.data(), s.size())); }

}  // namespace

std::string digest_series(const ExactSeries& f) {
    std::string s = "S" + std::to_string(f.n) + "|";
    canon_series(s, f);
    return digest_of(s);
}

std::string digest_symbol(const ExactSymbol& sym) {
    std::string s = "P" + std::to_string(sym.n) + "|";
    for (const auto& [a, aa] : sym.table) {
        s += "A" + a.str() + "{";
        canon_series(s, aa);
        s += "}";
    }
    return digest_of(s);
}

std::string digest_hom(const ExactHomImages& h) {
    std::string s = "H" + std::to_string(h.n) + "|";
    for (const auto& [b, img] : h.images) {
        s += "B" + b.str() + "{";
        canon_series(s, img);
        s += "}";
    }
    return digest_of(s);
}

std::string digest_poly(const RationalPoly& f) {
    std::string s = "Q" + std::to_string(f.n) + "|";
    for (const auto& [g, c] : f.coeffs)
        s += g.str() + ":" + c.re.str() + "," + c.im.str() + ";";
    return digest_of(s);
}

CorpusRecord corpus_record(const CorpusItem& item) {
    CorpusRecord rec;
    rec.seed = std::to_string(item.seed);
    rec.n = item.n;
    rec.symbol_entries = item.symbol.table.size();
    rec.digest_symbol = digest_symbol(item.symbol);

    ExactHomImages hom = symbol_to_hom(item.symbol);
    rec.digest_hom = digest_hom(hom);
    ExactSymbol back = hom_to_symbol(hom);
    rec.roundtrip_ok = symbol_equal(back, item.symbol);

    // Bit-exact apply agreement: pad the probe so the truncated path keeps
    // every output term (deg Pf <= probe degree + symbol series degree).
    ExactSeries padded = item.probe;
    padded.q_max = item.probe.q_max + 2 * item.symbol.a_max;
    ExactSeries via_main = apply_symbol_truncated(item.symbol, padded);
    RationalPoly via_oracle = exact_apply(from_symbol(item.symbol), from_series(item.probe));
    rec.digest_apply = digest_poly(via_oracle);
    rec.apply_ok = series_equal(via_main, to_series(via_oracle, padded.q_max - item.symbol.a_max));
    return rec;
}

}  // namespace oracle
}  // namespace valiron
