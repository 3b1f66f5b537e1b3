#ifndef VALIRON_RATIONAL_HPP
#define VALIRON_RATIONAL_HPP

#include <gmp.h>

#include <string>
#include <utility>

#include "valiron/bigfloat.hpp"

namespace valiron {

// Exact rational (GMP mpq), always canonicalized.
class Rat {
public:
    Rat() { mpq_init(v_); }
    Rat(long num) { mpq_init(v_); mpq_set_si(v_, num, 1); }
    Rat(int num) : Rat(static_cast<long>(num)) {}
    Rat(long num, unsigned long den) {
        mpq_init(v_);
        mpq_set_si(v_, num, den);
        mpq_canonicalize(v_);
    }
    Rat(const Rat& o) { mpq_init(v_); mpq_set(v_, o.v_); }
    Rat(Rat&& o) noexcept { mpq_init(v_); mpq_swap(v_, o.v_); }
    ~Rat() { mpq_clear(v_); }

    Rat& operator=(const Rat& o) { if (this != &o) mpq_set(v_, o.v_); return *this; }
    Rat& operator=(Rat&& o) noexcept { if (this != &o) mpq_swap(v_, o.v_); return *this; }

    mpq_ptr raw() { return v_; }
    mpq_srcptr raw() const { return v_; }

    bool is_zero() const { return mpq_sgn(v_) == 0; }
    int sign() const { return mpq_sgn(v_); }

    // n! as an exact Rat; factorial_inv gives 1/n!.
    static Rat factorial(unsigned long n);
    static Rat pow(const Rat& base, unsigned long e);

    BigFloat to_bigfloat() const {
        BigFloat r;
        mpfr_set_q(r.raw(), v_, MPFR_RNDN);
        return r;
    }

    // "p/q" canonical (plain "p" when q = 1).
    std::string str() const;
    // Accepts "p/q", integers, and exact decimals with optional exponent
    // ("-2.5e-3" -> -1/400). Throws domain_error otherwise.
    static Rat parse(const std::string& s);

    Rat operator-() const { Rat r; mpq_neg(r.v_, v_); return r; }
    Rat& operator+=(const Rat& o) { mpq_add(v_, v_, o.v_); return *this; }
    Rat& operator-=(const Rat& o) { mpq_sub(v_, v_, o.v_); return *this; }
    Rat& operator*=(const Rat& o) { mpq_mul(v_, v_, o.v_); return *this; }
    Rat& operator/=(const Rat& o);

    friend Rat operator+(Rat a, const Rat& b) { a += b; return a; }
    friend Rat operator-(Rat a, const Rat& b) { a -= b; return a; }
    friend Rat operator*(Rat a, const Rat& b) { a *= b; return a; }
    friend Rat operator/(Rat a, const Rat& b) { a /= b; return a; }
    friend bool operator==(const Rat& a, const Rat& b) { return mpq_equal(a.v_, b.v_) != 0; }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) { return mpq_cmp(a.v_, b.v_) < 0; }

private:
    mpq_t v_;
};

// Gaussian rational re + i*im; exact arithmetic for the complex-coefficient
// symbols (the worked example needs powers of i at rational scale).
struct GaussRat {
    Rat re, im;

    GaussRat() = default;
    GaussRat(Rat r) : re(std::move(r)) {}
    GaussRat(long r) : re(r) {}
    GaussRat(int r) : re(static_cast<long>(r)) {}
    GaussRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    bool is_real() const { return im.is_zero(); }

    static GaussRat i() { return GaussRat(Rat(0), Rat(1)); }
    static GaussRat i_pow(unsigned long k);   // i^k

    GaussRat operator-() const { return GaussRat(-re, -im); }
    GaussRat& operator+=(const GaussRat& o) { re += o.re; im += o.im; return *this; }
    GaussRat& operator-=(const GaussRat& o) { re -= o.re; im -= o.im; return *this; }
    GaussRat& operator*=(const GaussRat& o) {
        Rat r = re * o.re - im * o.im;
        Rat i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }

    friend GaussRat operator+(GaussRat a, const GaussRat& b) { a += b; return a; }
    friend GaussRat operator-(GaussRat a, const GaussRat& b) { a -= b; return a; }
    friend GaussRat operator*(GaussRat a, const GaussRat& b) { a *= b; return a; }
    friend bool operator==(const GaussRat& a, const GaussRat& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }
};

// Complex big float for the numeric analysis paths.
struct BigComplex {
    BigFloat re, im;

    BigComplex() : re(0L), im(0L) {}
    BigComplex(BigFloat r) : re(std::move(r)), im(0L) {}
    BigComplex(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}
    explicit BigComplex(const GaussRat& q) : re(q.re.to_bigfloat()), im(q.im.to_bigfloat()) {}

    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    BigFloat modulus() const { return hypot(re, im); }

    BigComplex operator-() const { return BigComplex(-re, -im); }
    BigComplex& operator+=(const BigComplex& o) { re += o.re; im += o.im; return *this; }
    BigComplex& operator-=(const BigComplex& o) { re -= o.re; im -= o.im; return *this; }
    BigComplex& operator*=(const BigComplex& o) {
        BigFloat r = re * o.re - im * o.im;
        BigFloat i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }

    friend BigComplex operator+(BigComplex a, const BigComplex& b) { a += b; return a; }
    friend BigComplex operator-(BigComplex a, const BigComplex& b) { a -= b; return a; }
    friend BigComplex operator*(BigComplex a, const BigComplex& b) { a *= b; return a; }
};

}  // namespace valiron

#endif
