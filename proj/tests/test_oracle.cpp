#include <fstream>
#include <sstream>

#include "doctest.h"

#include "test_helpers.hpp"
#include "valiron/errors.hpp"
#include "valiron/json_io.hpp"
#include "valiron/oracle.hpp"

using namespace valiron;
using vt::bf;

TEST_CASE("rational polynomial arithmetic is exact") {
    oracle::RationalPoly f(2), g(2);
    f.set(MultiIndex{1u, 0u}, GaussRat(Rat(1)));
    f.set(MultiIndex{0u, 1u}, GaussRat(Rat(1)));
    g.set(MultiIndex{1u, 0u}, GaussRat(Rat(1)));
    g.set(MultiIndex{0u, 1u}, GaussRat(-Rat(1)));
    oracle::RationalPoly p = oracle::multiply(f, g);
    CHECK(p.at(MultiIndex{2u, 0u}) == GaussRat(Rat(1)));
    CHECK(p.at(MultiIndex{0u, 2u}) == GaussRat(-Rat(1)));
    CHECK(p.coeffs.size() == 2);  // the cross terms cancel away entirely
    CHECK(p.degree() == 2);

    oracle::RationalPoly d = oracle::differentiate(p, MultiIndex{1u, 0u});
    CHECK(d.at(MultiIndex{1u, 0u}) == GaussRat(Rat(2)));
    CHECK(d.coeffs.size() == 1);

    // p + p*g = z1^2 - z2^2 + z1^3 - z1^2 z2 - z1 z2^2 + z2^3
    oracle::RationalPoly sum = oracle::add(p, oracle::multiply(p, g));
    CHECK(sum.at(MultiIndex{2u, 0u}) == GaussRat(Rat(1)));
    CHECK(sum.at(MultiIndex{3u, 0u}) == GaussRat(Rat(1)));
    CHECK(sum.at(MultiIndex{2u, 1u}) == GaussRat(-Rat(1)));
    CHECK(sum.coeffs.size() == 6);
}

TEST_CASE("shift substitution expands binomially") {
    // f(z) = z^2 -> f(z+1) = z^2 + 2z + 1
    oracle::RationalPoly f(1);
    f.set(MultiIndex{2u}, GaussRat(Rat(1)));
    oracle::RationalPoly s = oracle::shift_substitute(f, {GaussRat(Rat(1))});
    CHECK(s.at(MultiIndex{0u}) == GaussRat(Rat(1)));
    CHECK(s.at(MultiIndex{1u}) == GaussRat(Rat(2)));
    CHECK(s.at(MultiIndex{2u}) == GaussRat(Rat(1)));

    // two variables, complex shift: (z1 + i)(z2 - 1/2)
    oracle::RationalPoly h(2);
    h.set(MultiIndex{1u, 1u}, GaussRat(Rat(1)));
    oracle::RationalPoly hs =
        oracle::shift_substitute(h, {GaussRat(Rat(0), Rat(1)), GaussRat(Rat(-1, 2))});
    CHECK(hs.at(MultiIndex{1u, 1u}) == GaussRat(Rat(1)));
    CHECK(hs.at(MultiIndex{1u, 0u}) == GaussRat(Rat(-1, 2)));
    CHECK(hs.at(MultiIndex{0u, 1u}) == GaussRat(Rat(0), Rat(1)));
    CHECK(hs.at(MultiIndex{0u, 0u}) == GaussRat(Rat(0), Rat(-1, 2)));

    CHECK_THROWS_AS((void)oracle::shift_substitute(f, {GaussRat(Rat(1)), GaussRat(Rat(1))}),
                    domain_error);
}

TEST_CASE("series conversions round-trip through the polynomial form") {
    ExactSeries f(2, 5);
    f.set(MultiIndex{1u, 2u}, GaussRat(Rat(3, 7), Rat(-2)));
    f.set(MultiIndex{0u, 0u}, GaussRat(Rat(5)));
    oracle::RationalPoly p = oracle::from_series(f);
    CHECK(series_equal(oracle::to_series(p, 5), f));
    // widening the truncation depth changes nothing material
    CHECK(series_equal(oracle::to_series(p, 9), f));
}

TEST_CASE("independent application path agrees with the main one") {
    auto corpus = oracle::make_corpus(20);
    for (const auto& item : corpus) {
        ExactSeries padded = item.probe;
        padded.q_max += 2 * item.symbol.a_max;
        ExactSeries via_main = apply_symbol_truncated(item.symbol, padded);
        oracle::RationalPoly via_oracle =
            oracle::exact_apply(oracle::from_symbol(item.symbol), oracle::from_series(item.probe));
        CHECK_MESSAGE(
            series_equal(via_main, oracle::to_series(via_oracle, via_main.q_max)),
            "application paths disagree for seed ", item.seed);
    }
}

TEST_CASE("closed-form monomial norms and the family guard") {
    CHECK(oracle::closed_form_monomial_norm(0, BigFloat(1L), BigFloat(1L)) == BigFloat(1L));
    // sup r exp(-r) = 1/e
    CHECK_CLOSE_REL(oracle::closed_form_monomial_norm(1, BigFloat(1L), BigFloat(1L)),
                    exp(BigFloat(-1L)), "1e-70");
    // sup r^4 exp(-r^2) = (2/e)^2
    CHECK_CLOSE_REL(oracle::closed_form_monomial_norm(4, BigFloat(2L), BigFloat(1L)),
                    exp(BigFloat(2L) * (const_ln2() - BigFloat(1L))), "1e-70");

    ProximateOrder c2 = ProximateOrder::constant(BigFloat(2L));
    CHECK_CLOSE_REL(oracle::closed_form_monomial_norm(c2, BigFloat(1L), 4),
                    exp(BigFloat(2L) * (const_ln2() - BigFloat(1L))), "1e-70");
    ProximateOrder ll = ProximateOrder::loglog(BigFloat(2L), BigFloat(-1L));
    CHECK_THROWS_AS((void)oracle::closed_form_monomial_norm(ll, BigFloat(1L), 4), domain_error);
}

TEST_CASE("locally summed Stirling references match the shared cache") {
    oracle::StirlingRefs r5 = oracle::stirling_refs(5);
    CHECK_CLOSE_REL(r5.ln_factorial, log(BigFloat(120L)), "1e-70");
    CHECK_CLOSE_REL(r5.ln_double_factorial_odd, log(BigFloat(945L)), "1e-70");

    for (unsigned long q : {1UL, 7UL, 64UL, 300UL}) {
        oracle::StirlingRefs r = oracle::stirling_refs(q);
        CHECK_CLOSE_ABS(r.ln_factorial, ln_factorial(q), "1e-65");
        CHECK_CLOSE_ABS(r.ln_double_factorial_odd, ln_double_factorial_odd(q), "1e-65");
        // (2q)! = (2q-1)!! * 2^q * q!
        CHECK_CLOSE_ABS(ln_factorial(2 * q),
                        r.ln_double_factorial_odd + BigFloat(q) * const_ln2() + r.ln_factorial,
                        "1e-65");
    }
    CHECK_THROWS_AS((void)oracle::stirling_refs(20000), domain_error);
}

TEST_CASE("digests are stable, distinct, and sensitive") {
    auto corpus = oracle::make_corpus(2);
    std::string d0 = oracle::digest_symbol(corpus[0].symbol);
    CHECK(d0 == oracle::digest_symbol(corpus[0].symbol));
    CHECK(d0.size() == 16);
    CHECK(d0 != oracle::digest_symbol(corpus[1].symbol));

    ExactSeries f(1, 2);
    f.set(MultiIndex{1u}, GaussRat(Rat(1, 2)));
    std::string before = oracle::digest_series(f);
    f.set(MultiIndex{1u}, GaussRat(Rat(1, 3)));
    CHECK(before != oracle::digest_series(f));
}

TEST_CASE("the full corpus reproduces the frozen manifest") {
    std::ifstream in(std::string(VALIRON_DATA_DIR) + "/corpus_manifest.json");
    REQUIRE_MESSAGE(in.good(), "data/corpus_manifest.json missing");
    std::stringstream buf;
    buf << in.rdbuf();
    ojson j = parse_json_text(buf.str(), "corpus_manifest.json");
    std::vector<oracle::CorpusRecord> frozen = corpus_manifest_from_json(j, "corpus_manifest.json");
    REQUIRE(frozen.size() == 100);

    auto corpus = oracle::make_corpus(100);
    REQUIRE(corpus.size() == frozen.size());
    for (size_t i = 0; i < corpus.size(); ++i) {
        oracle::CorpusRecord now = oracle::corpus_record(corpus[i]);
        CAPTURE(i);
        CHECK(now.roundtrip_ok);
        CHECK(now.apply_ok);
        CHECK(now.seed == frozen[i].seed);
        CHECK(now.n == frozen[i].n);
        CHECK(now.symbol_entries == frozen[i].symbol_entries);
        CHECK_MESSAGE(now.digest_symbol == frozen[i].digest_symbol, "symbol digest drifted at ", i);
        CHECK_MESSAGE(now.digest_hom == frozen[i].digest_hom, "hom digest drifted at ", i);
        CHECK_MESSAGE(now.digest_apply == frozen[i].digest_apply, "apply digest drifted at ", i);
    }
}
