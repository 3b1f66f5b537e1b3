#include "valiron/bigfloat.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <mutex>

#include "valiron/errors.hpp"

namespace valiron {

namespace {
unsigned g_prec = 256;
}

void BigFloat::set_working_precision(unsigned bits) {
    if (bits < 64) throw domain_error("working precision must be at least 64 bits");
    g_prec = bits;
}

unsigned BigFloat::working_precision() { return g_prec; }

BigFloat BigFloat::nan() { BigFloat r; mpfr_set_nan(r.v_); return r; }
BigFloat BigFloat::pos_inf() { BigFloat r; mpfr_set_inf(r.v_, 1); return r; }
BigFloat BigFloat::neg_inf() { BigFloat r; mpfr_set_inf(r.v_, -1); return r; }

std::string BigFloat::str() const {
    if (mpfr_nan_p(v_)) return "nan";
    if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
    if (mpfr_zero_p(v_)) return "0";

    // Digits needed for exact binary round-trip: prec*log10(2) + 2.
    size_t ndig = static_cast<size_t>(mpfr_get_prec(v_) * 0.30103) + 3;
    mpfr_exp_t e;
    char* raw = mpfr_get_str(nullptr, &e, 10, ndig, v_, MPFR_RNDN);
    std::string digits(raw);
    mpfr_free_str(raw);

    bool neg = false;
    if (!digits.empty() && digits[0] == '-') { neg = true; digits.erase(0, 1); }
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();

    // value = 0.digits * 10^e
    std::string out;
    long ee = static_cast<long>(e);
    long len = static_cast<long>(digits.size());
    if (ee >= 1 && ee <= 60) {
        if (ee >= len) {
            out = digits + std::string(static_cast<size_t>(ee - len), '0');
        } else {
            out = digits.substr(0, static_cast<size_t>(ee)) + "." + digits.substr(static_cast<size_t>(ee));
        }
    } else if (ee <= 0 && ee > -40) {
        out = "0." + std::string(static_cast<size_t>(-ee), '0') + digits;
    } else {
        out = digits.substr(0, 1);
        if (digits.size() > 1) out += "." + digits.substr(1);
        out += "e" + std::to_string(ee - 1);
    }
    return neg ? "-" + out : out;
}

BigFloat BigFloat::parse(const std::string& s) {
    if (s == "nan") return nan();
    if (s == "inf" || s == "+inf") return pos_inf();
    if (s == "-inf") return neg_inf();
    BigFloat r;
    if (s.empty() || mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0)
        throw domain_error("not a decimal number: '" + s + "'");
    return r;
}

#define VALIRON_UNARY(name, fn)                        \
    BigFloat name(const BigFloat& x) {                 \
        BigFloat r;                                    \
        fn(r.raw(), x.raw(), MPFR_RNDN);               \
        return r;                                      \
    }

VALIRON_UNARY(exp, mpfr_exp)
VALIRON_UNARY(log, mpfr_log)
VALIRON_UNARY(sqrt, mpfr_sqrt)
VALIRON_UNARY(abs, mpfr_abs)
VALIRON_UNARY(cos, mpfr_cos)
VALIRON_UNARY(sin, mpfr_sin)
#undef VALIRON_UNARY

BigFloat floor(const BigFloat& x) {
    BigFloat r;
    mpfr_rint(r.raw(), x.raw(), MPFR_RNDD);
    return r;
}

BigFloat ceil(const BigFloat& x) {
    BigFloat r;
    mpfr_rint(r.raw(), x.raw(), MPFR_RNDU);
    return r;
}

BigFloat pow(const BigFloat& x, const BigFloat& y) {
    BigFloat r;
    mpfr_pow(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
    return r;
}

BigFloat hypot(const BigFloat& x, const BigFloat& y) {
    BigFloat r;
    mpfr_hypot(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
    return r;
}

BigFloat atan2(const BigFloat& y, const BigFloat& x) {
    BigFloat r;
    mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
    return r;
}

BigFloat max(const BigFloat& a, const BigFloat& b) { return a >= b ? a : b; }
BigFloat min(const BigFloat& a, const BigFloat& b) { return a <= b ? a : b; }

BigFloat const_pi() { BigFloat r; mpfr_const_pi(r.raw(), MPFR_RNDN); return r; }
BigFloat const_ln2() { BigFloat r; mpfr_const_log2(r.raw(), MPFR_RNDN); return r; }
BigFloat const_e() { return exp(BigFloat(1L)); }

BigFloat log_add_exp(const BigFloat& a, const BigFloat& b) {
    if (a.is_nan() || b.is_nan()) return BigFloat::nan();
    const BigFloat* hi = &a;
    const BigFloat* lo = &b;
    if (*hi < *lo) std::swap(hi, lo);
    if (hi->is_inf()) return *hi;                       // +inf dominates; both -inf handled next
    if (lo->is_inf() && lo->sign() < 0) return *hi;     // e^-inf = 0
    BigFloat d = *lo - *hi;                              // <= 0
    BigFloat one(1L);
    return *hi + log(one + exp(d));
}

namespace {
std::mutex g_fact_mu;
// deque, not vector: callers hold references across later push_backs
std::deque<BigFloat> g_ln_fact{BigFloat(0L)};         // g_ln_fact[n] = ln n!
std::deque<BigFloat> g_ln_dfact{BigFloat(0L)};        // g_ln_dfact[j] = ln (2j-1)!!
}  // namespace

const BigFloat& ln_factorial(unsigned long n) {
    if (n > 10000000UL) throw domain_error("ln_factorial: n too large for summation table");
    std::lock_guard<std::mutex> lk(g_fact_mu);
    while (g_ln_fact.size() <= n) {
        unsigned long m = g_ln_fact.size();
        g_ln_fact.push_back(g_ln_fact.back() + log(BigFloat(static_cast<unsigned long>(m))));
    }
    return g_ln_fact[n];
}

const BigFloat& ln_double_factorial_odd(unsigned long j) {
    if (j > 10000000UL) throw domain_error("ln_double_factorial_odd: j too large");
    std::lock_guard<std::mutex> lk(g_fact_mu);
    while (g_ln_dfact.size() <= j) {
        unsigned long m = g_ln_dfact.size();  // appending ln (2m-1)!!
        g_ln_dfact.push_back(g_ln_dfact.back() + log(BigFloat(2 * m - 1)));
    }
    return g_ln_dfact[j];
}

BigFloat ls_slope(const std::vector<BigFloat>& x, const std::vector<BigFloat>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw domain_error("ls_slope: need two equal-length samples of size >= 2");
    BigFloat n(static_cast<unsigned long>(x.size()));
    BigFloat sx(0L), sy(0L), sxx(0L), sxy(0L);
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    BigFloat den = n * sxx - sx * sx;
    if (den.is_zero()) return BigFloat(0L);
    return (n * sxy - sx * sy) / den;
}

}  // namespace valiron
