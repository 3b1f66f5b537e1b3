#include "doctest.h"

#include "reference_values.hpp"
#include "test_helpers.hpp"
#include "valiron/diffop.hpp"
#include "valiron/errors.hpp"
#include "valiron/oracle.hpp"
#include "valiron/rng.hpp"

using namespace valiron;
using vt::bf;
using vt::exp_series;

namespace {

const NormalizedOrder& c1_norm() {
    static NormalizedOrder n = normalize(ProximateOrder::constant(BigFloat(1L)));
    return n;
}
const NormalizedOrder& c2_norm() {
    static NormalizedOrder n = normalize(ProximateOrder::constant(BigFloat(2L)));
    return n;
}
const NormalizedOrder& ll_norm() {
    static NormalizedOrder n = normalize(ProximateOrder::loglog(BigFloat(2L), BigFloat(-1L)));
    return n;
}

// constant-coefficient series c (n = 1)
ExactSeries const_series(const GaussRat& c) {
    ExactSeries s(1, 0);
    s.set(MultiIndex{0u}, c);
    return s;
}

// shift-by-c symbol truncated at a_max: a_q = c^q / q!
ExactSymbol shift_symbol(const Rat& c, unsigned long a_max) {
    ExactSymbol s(1, a_max);
    GaussRat cur{Rat(1)};
    s.set(MultiIndex{0u}, const_series(cur));
    for (unsigned long q = 1; q <= a_max; ++q) {
        cur = GaussRat(cur.re * c / Rat(static_cast<long>(q)));
        s.set(MultiIndex{static_cast<uint32_t>(q)}, const_series(cur));
    }
    return s;
}

ExactSeries truncate_to(const ExactSeries& f, unsigned long q_max) {
    ExactSeries r(f.n, q_max);
    for (const auto& [a, v] : f.coeffs)
        if (a.degree() <= q_max) r.coeffs.emplace(a, v);
    return r;
}

}  // namespace

TEST_CASE("reconstruction closed forms: identity, shift, derivative") {
    // identity homomorphism (n = 2): images[beta] = z^beta / beta!
    ExactHomImages id;
    id.n = 2;
    id.b_max = 4;
    for (const auto& b : indices_up_to(2, 4)) {
        ExactSeries s(2, 4);
        s.set(b, GaussRat(Rat(1) / b.factorial_rat()));
        id.images.emplace(b, std::move(s));
    }
    ExactSymbol sid = hom_to_symbol(id);
    REQUIRE(sid.table.size() == 1);
    const ExactSeries& a0 = sid.table.begin()->second;
    CHECK(sid.table.begin()->first == MultiIndex(2));
    CHECK(a0.coeffs.size() == 1);
    CHECK(a0.at(MultiIndex(2)) == GaussRat(Rat(1)));

    // shift by c (n = 1): images[beta] = (z+c)^beta / beta!  ->  a_q = c^q/q!
    Rat c(3, 7);
    ExactHomImages sh;
    sh.n = 1;
    sh.b_max = 6;
    for (uint32_t b = 0; b <= 6; ++b) {
        ExactSeries s(1, b);
        Rat binom(1);
        for (uint32_t m = 0; m <= b; ++m) {
            // C(b, m) c^(b-m) / b!
            Rat coeff = binom * Rat::pow(c, b - m) / Rat::factorial(b);
            s.set(MultiIndex{m}, GaussRat(coeff));
            binom *= Rat(static_cast<long>(b) - static_cast<long>(m));
            binom /= Rat(static_cast<long>(m) + 1);
        }
        sh.images.emplace(MultiIndex{b}, std::move(s));
    }
    ExactSymbol ssh = hom_to_symbol(sh);
    CHECK(symbol_equal(ssh, shift_symbol(c, 6)));

    // d/dz (n = 1): images[beta] = z^(beta-1)/(beta-1)!  ->  a_1 = 1 only
    ExactHomImages dh;
    dh.n = 1;
    dh.b_max = 5;
    dh.images.emplace(MultiIndex{0u}, ExactSeries(1, 0));
    for (uint32_t b = 1; b <= 5; ++b) {
        ExactSeries s(1, b - 1);
        s.set(MultiIndex{b - 1}, GaussRat(Rat(1) / Rat::factorial(b - 1)));
        dh.images.emplace(MultiIndex{b}, std::move(s));
    }
    ExactSymbol sdh = hom_to_symbol(dh);
    REQUIRE(sdh.table.size() == 1);
    CHECK(sdh.table.begin()->first == MultiIndex{1u});
    CHECK(sdh.table.begin()->second.at(MultiIndex{0u}) == GaussRat(Rat(1)));
}

TEST_CASE("symbol/hom round trip is the exact identity on seeded symbols") {
    auto corpus = oracle::make_corpus(10);
    for (const auto& item : corpus) {
        ExactHomImages h = symbol_to_hom(item.symbol);
        CHECK(h.b_max == item.symbol.a_max);
        // the emitted table is complete even where images vanish
        CHECK(h.images.size() == indices_up_to(h.n, h.b_max).size());
        ExactSymbol back = hom_to_symbol(h);
        CHECK_MESSAGE(symbol_equal(back, item.symbol), "round trip broke for seed ", item.seed);
    }
}

TEST_CASE("hom_to_symbol rejects incomplete image tables") {
    ExactHomImages h;
    h.n = 2;
    h.b_max = 2;
    h.images.emplace(MultiIndex{0u, 0u}, ExactSeries(2, 0));
    CHECK_THROWS_WITH_AS((void)hom_to_symbol(h),
                         doctest::Contains("image table missing"), domain_error);
}

TEST_CASE("operator application: exactness, truncation, and guards") {
    // a_1 = 1 acts as d/dz: on z^3 it yields 3 z^2
    ExactSymbol dz(1, 1);
    dz.set(MultiIndex{1u}, const_series(GaussRat(Rat(1))));
    ExactSeries cube(1, 3);
    cube.set(MultiIndex{3u}, GaussRat(Rat(1)));
    ExactSeries out = apply_symbol_truncated(dz, cube);
    CHECK(out.q_max == 2);
    CHECK(out.at(MultiIndex{2u}) == GaussRat(Rat(3)));
    CHECK(out.coeffs.size() == 1);

    ExactSeries shallow(1, 0);
    shallow.set(MultiIndex{0u}, GaussRat(Rat(1)));
    CHECK_THROWS_AS((void)apply_symbol_truncated(dz, shallow), domain_error);
    CHECK_THROWS_AS((void)apply_symbol_truncated(dz, ExactSeries(2, 5)), domain_error);

    // linearity: P(3f - 2ig) = 3 Pf - 2i Pg, exact
    auto corpus = oracle::make_corpus(3);
    const ExactSymbol& P = corpus[1].symbol;
    ExactSeries f = corpus[1].probe;
    f.q_max = f.q_max + P.a_max + 2;  // pad so the application is defined
    ExactSeries g(f.n, f.q_max);
    g.set(MultiIndex(f.n), GaussRat(Rat(2)));
    g.set(MultiIndex::unit(f.n, 0, 3), GaussRat(Rat(-1, 5), Rat(2)));
    g.set(MultiIndex::unit(f.n, f.n - 1, 1), GaussRat(Rat(7, 2)));
    GaussRat ca{Rat(3)}, cb{Rat(0), Rat(-2)};
    ExactSeries combo = add(scale(ca, f), scale(cb, g));
    ExactSeries lhs = apply_symbol_truncated(P, combo);
    ExactSeries rhs = add(scale(ca, apply_symbol_truncated(P, f)),
                          scale(cb, apply_symbol_truncated(P, g)));
    CHECK(series_equal(lhs, rhs));
}

TEST_CASE("shift operators compose additively on polynomials") {
    Rat c1(2, 5), c2(-3, 4);
    ExactSymbol s1 = shift_symbol(c1, 5), s2 = shift_symbol(c2, 5), s12 = shift_symbol(c1 + c2, 5);

    ExactSeries f(1, 20);
    f.set(MultiIndex{0u}, GaussRat(Rat(7)));
    f.set(MultiIndex{1u}, GaussRat(Rat(-2), Rat(1)));
    f.set(MultiIndex{3u}, GaussRat(Rat(1, 3)));

    ExactSeries step = apply_symbol_truncated(s2, apply_symbol_truncated(s1, f));
    ExactSeries direct = apply_symbol_truncated(s12, f);
    CHECK(series_equal(step, direct));

    // and the composite really is f(z + c1 + c2)
    oracle::RationalPoly pf = oracle::from_series(f);
    oracle::RationalPoly shifted = oracle::shift_substitute(pf, {GaussRat(c1 + c2)});
    CHECK(series_equal(direct, truncate_to(oracle::to_series(shifted, 20), direct.q_max)));
}

TEST_CASE("reconstructed symbols act like the original homomorphism on monomials") {
    SplitMix64 rng(0x7a57ed11u);
    for (int rep = 0; rep < 5; ++rep) {
        unsigned long n = 1 + rep % 2;
        unsigned long b_max = 4;
        ExactHomImages h;
        h.n = n;
        h.b_max = b_max;
        for (const auto& b : indices_up_to(n, b_max)) {
            ExactSeries s(n, 6);
            unsigned terms = 1 + static_cast<unsigned>(rng.below(3));
            for (unsigned t = 0; t < terms; ++t) {
                MultiIndex a(n);
                for (auto& ei : a.e) ei = static_cast<uint32_t>(rng.below(4));
                long num = 1 + static_cast<long>(rng.below(9));
                if (rng.below(2)) num = -num;
                s.add_to(a, GaussRat(Rat(num, 1 + rng.below(9))));
            }
            h.images.emplace(b, std::move(s));
        }
        ExactSymbol P = hom_to_symbol(h);

        for (const auto& g : indices_up_to(n, 3)) {
            // f = z^gamma, padded so nothing the operator produces is cut
            ExactSeries f(n, g.degree() + b_max + 6);
            f.set(g, GaussRat(Rat(1)));
            ExactSeries got = apply_symbol_truncated(P, f);
            // direct extension: F z^gamma = gamma! * images[gamma]
            ExactSeries want = scale(GaussRat(g.factorial_rat()), h.images.at(g));
            CHECK_MESSAGE(series_equal(got, want), "monomial action differs at gamma = ", g.str());
        }
    }
}

TEST_CASE("tail bound covers the mass discarded by truncating the symbol") {
    ExactSeries f = exp_series(Rat(1), 80);
    ExactSymbol full = shift_symbol(Rat(1), 40);
    ExactSymbol trunc = shift_symbol(Rat(1), 12);

    for (const NormalizedOrder* dst : {&c1_norm(), &c2_norm()}) {
        ExactApply wide = apply_operator(full, f, *dst, BigFloat(1L));
        ExactApply cut = apply_operator(trunc, f, *dst, BigFloat(1L));
        REQUIRE(cut.tail_bound.is_finite());
        CHECK(cut.tail_bound > BigFloat(0L));

        // discarded mass on the levels both results determine
        ExactSeries diff = add(truncate_to(wide.result, wide.result.q_max),
                               scale(GaussRat(-Rat(1)), truncate_to(cut.result, wide.result.q_max)));
        WeightedNorm wn = weighted_norm(to_numeric(diff), *dst, BigFloat(1L), 512,
                                        WeightKind::normalized);
        CHECK_MESSAGE(wn.value <= cut.tail_bound, "discarded mass ", wn.value.str(),
                      " exceeds tail bound ", cut.tail_bound.str());
    }

    // a flat two-level symbol shows no decay to extrapolate from, so the
    // conservative answer for the cut levels is +inf, not a fake number
    ExactSeries poly(1, 30);
    poly.set(MultiIndex{2u}, GaussRat(Rat(5)));
    ExactApply ap = apply_operator(shift_symbol(Rat(1), 1), poly, c1_norm(), BigFloat(1L));
    CHECK(!ap.tail_bound.is_finite());
    CHECK(ap.tail_bound > BigFloat(0L));
}

TEST_CASE("schrodinger symbol: exact entries and optional factors") {
    // t = 1: a_{2j} = (i/2)^j / j!
    ExactSymbol s = schrodinger_symbol(Rat(1), 4);
    CHECK(s.a_max == 8);
    CHECK(s.table.size() == 5);
    auto entry = [&](uint32_t q) { return s.table.at(MultiIndex{q}).at(MultiIndex{0u}); };
    CHECK(entry(0) == GaussRat(Rat(1)));
    CHECK(entry(2) == GaussRat(Rat(0), Rat(1, 2)));
    CHECK(entry(4) == GaussRat(Rat(-1, 8)));
    CHECK(entry(6) == GaussRat(Rat(0), Rat(-1, 48)));
    CHECK(entry(8) == GaussRat(Rat(1, 384)));

    // t = 0 collapses to the identity
    ExactSymbol id = schrodinger_symbol(Rat(0), 4);
    REQUIRE(id.table.size() == 1);
    CHECK(id.table.begin()->second.at(MultiIndex{0u}) == GaussRat(Rat(1)));

    // shift factor exp((t^2/2) d) convolves in; checked by hand at j_max = 2
    ExactSymbol sf = schrodinger_symbol(Rat(1), 2, true);
    auto sfe = [&](uint32_t q) { return sf.table.at(MultiIndex{q}).at(MultiIndex{0u}); };
    CHECK(sfe(0) == GaussRat(Rat(1)));
    CHECK(sfe(1) == GaussRat(Rat(1, 2)));
    CHECK(sfe(2) == GaussRat(Rat(1, 8), Rat(1, 2)));
    CHECK(sfe(3) == GaussRat(Rat(1, 48), Rat(1, 4)));
    CHECK(sfe(4) == GaussRat(Rat(-47, 384), Rat(1, 16)));

    // prefactor multiplies a_alpha by the truncated e^(-itz) series
    ExactSymbol pf = schrodinger_symbol(Rat(1), 2, false, true);
    const ExactSeries& a0 = pf.table.at(MultiIndex{0u});
    CHECK(a0.at(MultiIndex{0u}) == GaussRat(Rat(1)));
    CHECK(a0.at(MultiIndex{1u}) == GaussRat(Rat(0), Rat(-1)));
    CHECK(a0.at(MultiIndex{2u}) == GaussRat(Rat(-1, 2)));

    CHECK_THROWS_AS((void)schrodinger_symbol(Rat(1), 0), domain_error);
}

TEST_CASE("example ratio: frozen pins, cutoff index, and limit check") {
    ExampleRatio er = example_ratio(ll_norm(), BigFloat(1L), BigFloat(1L), 400);
    REQUIRE(er.ln_R.size() == 400);
    CHECK_CLOSE_REL(er.ln_R[9], bf(REF_LN_R10), "1e-24");
    CHECK_CLOSE_REL(er.ln_R[399], bf(REF_LN_R400), "1e-24");
    CHECK(er.first_small == 53);
    REQUIRE(er.limit_check.size() >= 2);
    CHECK(er.limit_check.back().second < er.limit_check.front().second);
    CHECK(er.limit_check.back().second > BigFloat(0L));

    // t = 0: every ratio vanishes, so the cutoff is immediate
    ExampleRatio e0 = example_ratio(ll_norm(), BigFloat(0L), BigFloat(1L), 10);
    CHECK(e0.first_small == 1);
    CHECK(!e0.ln_R[0].is_finite());

    CHECK_THROWS_AS((void)example_ratio(c1_norm(), BigFloat(1L), BigFloat(1L), 10), domain_error);
    CHECK_THROWS_AS((void)example_ratio(ll_norm(), BigFloat(1L), BigFloat(0L), 10), domain_error);
    CHECK_THROWS_AS((void)example_ratio(ll_norm(), BigFloat(1L), BigFloat(1L), 0), domain_error);
}

TEST_CASE("symbol classification: membership, witnesses, and guards") {
    // constant-coefficient shift symbol is a member in both modes
    ExactSymbol sh = shift_symbol(Rat(1), 12);
    GrowthScale sc1 = growth_scale(c1_norm(), 12);
    SymbolClassVerdict nv = classify_symbol(sh, c1_norm(), sc1, c1_norm(), SymbolMode::NormalType);
    CHECK(nv.verdict == Verdict::Member);
    SymbolClassVerdict mv = classify_symbol(sh, c1_norm(), sc1, c1_norm(), SymbolMode::MinimalType);
    CHECK(mv.verdict == Verdict::Member);

    // the worked example's operator on loglog(2,-1): member via rate extrapolation
    ExactSymbol schro = schrodinger_symbol(Rat(1), 100);
    GrowthScale sll = growth_scale(ll_norm(), schro.a_max);
    SymbolClassVerdict ll = classify_symbol(schro, ll_norm(), sll, ll_norm(), SymbolMode::NormalType);
    CHECK(ll.verdict == Verdict::Member);
    CHECK(ll.extrapolated);

    // against constant rho = 2 at lambda = 1/2 the witness diverges
    GrowthScale sc2 = growth_scale(c2_norm(), schro.a_max);
    SymbolClassVerdict c2v = classify_symbol(schro, c2_norm(), sc2, c2_norm(),
                                             SymbolMode::NormalType, {bf("0.5")});
    CHECK(c2v.verdict == Verdict::NotMember);
    REQUIRE(c2v.probes.size() == 1);
    CHECK(c2v.probes[0].probe == bf("0.5"));
    CHECK(c2v.probes[0].definitive_fail);
    CHECK(c2v.probes[0].witness_cross_q > 0);
    CHECK(c2v.probes[0].witness_cross_q <= 200);

    // minimal type on constant rho = 2: member, fitted lambda stays small
    SymbolClassVerdict c2m = classify_symbol(schro, c2_norm(), sc2, c2_norm(),
                                             SymbolMode::MinimalType);
    CHECK(c2m.verdict == Verdict::Member);
    for (const auto& p : c2m.probes) {
        CHECK(p.ok);
        CHECK_MESSAGE(p.partner <= BigFloat(4L), "fitted lambda ", p.partner.str(),
                      " too large at sigma = ", p.probe.str());
    }

    // r^varrho_src = O(r^varrho_dst) fails: constant 2 does not map into loglog(2,-1)
    GrowthScale scc = growth_scale(c2_norm(), 12);
    CHECK_THROWS_AS((void)classify_symbol(sh, c2_norm(), scc, ll_norm(), SymbolMode::NormalType),
                    domain_error);
    // the reverse direction is admissible
    GrowthScale sll12 = growth_scale(ll_norm(), 12);
    CHECK_NOTHROW((void)classify_symbol(sh, ll_norm(), sll12, c2_norm(), SymbolMode::NormalType,
                                        {BigFloat(1L)}));

    // empty symbols are trivially members
    SymbolClassVerdict ev = classify_symbol(ExactSymbol(1, 3), c1_norm(),
                                            growth_scale(c1_norm(), 3), c1_norm(),
                                            SymbolMode::NormalType);
    CHECK(ev.verdict == Verdict::Member);

    // growth scale must reach a_max
    GrowthScale shorts = growth_scale(c1_norm(), 4);
    CHECK_THROWS_AS((void)classify_symbol(sh, c1_norm(), shorts, c1_norm(), SymbolMode::NormalType),
                    domain_error);
}

TEST_CASE("series and symbol equality ignore declared truncation depth") {
    ExactSeries a(1, 5), b(1, 9);
    a.set(MultiIndex{2u}, GaussRat(Rat(1, 3)));
    b.set(MultiIndex{2u}, GaussRat(Rat(1, 3)));
    CHECK(series_equal(a, b));
    b.set(MultiIndex{2u}, GaussRat(Rat(2, 3)));
    CHECK(!series_equal(a, b));
    CHECK(!series_equal(a, ExactSeries(2, 5)));

    ExactSymbol sa(1, 2), sb(1, 4);
    sa.set(MultiIndex{1u}, a);
    sb.set(MultiIndex{1u}, a);
    CHECK(symbol_equal(sa, sb));
    sb.set(MultiIndex{2u}, a);
    CHECK(!symbol_equal(sa, sb));
}
