#include "valiron/rational.hpp"

#include <cctype>
#include <cstdlib>

#include "valiron/errors.hpp"

namespace valiron {

Rat& Rat::operator/=(const Rat& o) {
    if (o.is_zero()) throw domain_error("rational division by zero");
    mpq_div(v_, v_, o.v_);
    return *this;
}

Rat Rat::factorial(unsigned long n) {
    Rat r(1);
    mpz_fac_ui(mpq_numref(r.raw()), n);
    return r;
}

Rat Rat::pow(const Rat& base, unsigned long e) {
    Rat r;
    mpz_pow_ui(mpq_numref(r.raw()), mpq_numref(base.raw()), e);
    mpz_pow_ui(mpq_denref(r.raw()), mpq_denref(base.raw()), e);
    mpq_canonicalize(r.raw());
    return r;
}

std::string Rat::str() const {
    char* s = mpq_get_str(nullptr, 10, v_);
    std::string out(s);
    std::free(s);
    return out;
}

namespace {
bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}
}  // namespace

Rat Rat::parse(const std::string& input) {
    if (input.empty()) throw domain_error("empty rational literal");

    auto slash = input.find('/');
    if (slash != std::string::npos) {
        Rat r;
        if (mpq_set_str(r.v_, input.c_str(), 10) != 0)
            throw domain_error("not a rational: '" + input + "'");
        if (mpz_sgn(mpq_denref(r.v_)) == 0)
            throw domain_error("zero denominator: '" + input + "'");
        mpq_canonicalize(r.v_);
        return r;
    }

    std::string s = input;
    bool neg = false;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        s.erase(0, 1);
    }

    // split off exponent
    long expo = 0;
    auto epos = s.find_first_of("eE");
    if (epos != std::string::npos) {
        std::string etail = s.substr(epos + 1);
        s.erase(epos);
        if (etail.empty()) throw domain_error("bad exponent in '" + input + "'");
        bool eneg = false;
        if (etail[0] == '+' || etail[0] == '-') {
            eneg = etail[0] == '-';
            etail.erase(0, 1);
        }
        if (!all_digits(etail) || etail.size() > 9)
            throw domain_error("bad exponent in '" + input + "'");
        expo = std::atol(etail.c_str());
        if (eneg) expo = -expo;
    }

    auto dot = s.find('.');
    std::string digits = s;
    if (dot != std::string::npos) {
        digits = s.substr(0, dot) + s.substr(dot + 1);
        expo -= static_cast<long>(s.size() - dot - 1);
    }
    if (!all_digits(digits)) throw domain_error("not a number: '" + input + "'");

    Rat r;
    if (mpz_set_str(mpq_numref(r.v_), digits.c_str(), 10) != 0)
        throw domain_error("not a number: '" + input + "'");
    mpz_t p10;
    mpz_init(p10);
    mpz_ui_pow_ui(p10, 10, static_cast<unsigned long>(expo < 0 ? -expo : expo));
    if (expo >= 0)
        mpz_mul(mpq_numref(r.v_), mpq_numref(r.v_), p10);
    else
        mpz_set(mpq_denref(r.v_), p10);
    mpz_clear(p10);
    mpq_canonicalize(r.v_);
    return neg ? -r : r;
}

GaussRat GaussRat::i_pow(unsigned long k) {
    switch (k % 4) {
        case 0: return GaussRat(Rat(1));
        case 1: return GaussRat(Rat(0), Rat(1));
        case 2: return GaussRat(Rat(-1));
        default: return GaussRat(Rat(0), Rat(-1));
    }
}

}  // namespace valiron
