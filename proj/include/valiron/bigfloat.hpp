#ifndef VALIRON_BIGFLOAT_HPP
#define VALIRON_BIGFLOAT_HPP

#include <mpfr.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace valiron {

// Radix-2 big float at a process-wide working precision (default 256 bits,
// configurable once at startup via set_working_precision / PO_PREC_BITS).
// All results are rounded to nearest at the working precision, so a fixed
// input always produces the same bits regardless of evaluation order within
// an expression tree written here.
class BigFloat {
public:
    BigFloat() { mpfr_init2(v_, working_precision()); mpfr_set_zero(v_, 1); }
    BigFloat(const BigFloat& o) { mpfr_init2(v_, working_precision()); mpfr_set(v_, o.v_, MPFR_RNDN); }
    BigFloat(BigFloat&& o) noexcept {
        mpfr_init2(v_, working_precision());
        mpfr_swap(v_, o.v_);
    }
    BigFloat(long x) { mpfr_init2(v_, working_precision()); mpfr_set_si(v_, x, MPFR_RNDN); }
    BigFloat(int x) : BigFloat(static_cast<long>(x)) {}
    BigFloat(unsigned long x) { mpfr_init2(v_, working_precision()); mpfr_set_ui(v_, x, MPFR_RNDN); }
    // doubles are accepted for exact dyadic constants (0.5, 2.0, ...); decimal
    // data should come in as strings.
    BigFloat(double x) { mpfr_init2(v_, working_precision()); mpfr_set_d(v_, x, MPFR_RNDN); }

    ~BigFloat() { mpfr_clear(v_); }

    BigFloat& operator=(const BigFloat& o) {
        if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept {
        if (this != &o) mpfr_swap(v_, o.v_);
        return *this;
    }

    static void set_working_precision(unsigned bits);
    static unsigned working_precision();

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_inf() const { return mpfr_inf_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }

    // Deterministic decimal form with enough digits to round-trip the binary
    // value; trailing zeros trimmed. "0", "-1", "363.739...", "2.75e-5" style:
    // fixed notation while the exponent is moderate, scientific otherwise.
    std::string str() const;
    static BigFloat parse(const std::string& s);  // throws domain_error

    static BigFloat nan();
    static BigFloat pos_inf();
    static BigFloat neg_inf();

    BigFloat operator-() const { BigFloat r; mpfr_neg(r.v_, v_, MPFR_RNDN); return r; }

    BigFloat& operator+=(const BigFloat& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
    BigFloat& operator-=(const BigFloat& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
    BigFloat& operator*=(const BigFloat& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
    BigFloat& operator/=(const BigFloat& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

    friend BigFloat operator+(BigFloat a, const BigFloat& b) { a += b; return a; }
    friend BigFloat operator-(BigFloat a, const BigFloat& b) { a -= b; return a; }
    friend BigFloat operator*(BigFloat a, const BigFloat& b) { a *= b; return a; }
    friend BigFloat operator/(BigFloat a, const BigFloat& b) { a /= b; return a; }

    friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
    friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
    friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
    friend bool operator>=(const BigFloat& a, const BigFloat& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }
    friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
    friend bool operator!=(const BigFloat& a, const BigFloat& b) { return !(a == b); }

private:
    mpfr_t v_;
};

BigFloat exp(const BigFloat& x);
BigFloat log(const BigFloat& x);   // log(0) = -inf, log(negative) = nan
BigFloat sqrt(const BigFloat& x);
BigFloat abs(const BigFloat& x);
BigFloat pow(const BigFloat& x, const BigFloat& y);
BigFloat floor(const BigFloat& x);
BigFloat ceil(const BigFloat& x);
BigFloat hypot(const BigFloat& x, const BigFloat& y);
BigFloat cos(const BigFloat& x);
BigFloat sin(const BigFloat& x);
BigFloat atan2(const BigFloat& y, const BigFloat& x);
BigFloat max(const BigFloat& a, const BigFloat& b);
BigFloat min(const BigFloat& a, const BigFloat& b);

BigFloat const_pi();
BigFloat const_ln2();
BigFloat const_e();

// log(e^a + e^b) without overflow; handles -inf identities.
BigFloat log_add_exp(const BigFloat& a, const BigFloat& b);

// ln(n!) by exact summation of logs (cached), n <= 10^7 guarded.
const BigFloat& ln_factorial(unsigned long n);
// ln((2j-1)!!) by summation, ln of 1*3*5*...*(2j-1); j = 0 gives 0.
const BigFloat& ln_double_factorial_odd(unsigned long j);

// Least-squares slope of y against x (sizes equal, >= 2).
BigFloat ls_slope(const std::vector<BigFloat>& x, const std::vector<BigFloat>& y);

}  // namespace valiron

#endif
