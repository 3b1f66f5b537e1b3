#ifndef VALIRON_PROXORDER_HPP
#define VALIRON_PROXORDER_HPP

#include <string>
#include <utility>
#include <vector>

#include "valiron/bigfloat.hpp"

namespace valiron {

enum class Family { Constant, LogLog, LogLogLog };

std::string family_name(Family f);
Family family_from_name(const std::string& s);

// Proximate order varrho(r) from one of three closed-form families, extended
// below r_cut so the function is defined and C^1 on all r > 0:
//   Constant:   varrho(r) = rho everywhere (no extension needed)
//   LogLog:     varrho(r) = rho + k ln ln r / ln r      for r >= r_cut
//   LogLogLog:  varrho(r) = rho + k ln ln ln r / ln r   for r >= r_cut
// In x = ln r the family value F(x) is continued by a parabola on
// [x_cut - ln 2, x_cut] matching F and F' at x_cut, and is constant to the
// left of that, so the family formula holds exactly on r >= r_cut and the
// derivative vanishes for r <= r_cut/2.
//
// log_scale w adds the term w/x (i.e. ln c / ln r with w = ln c) for
// x >= ln(max(r_cut, 2)), held constant below; rescale_dst_order sets it.
// The weight is then exactly c * r^varrho(r) from max(r_cut, 2) upward.
struct ProximateOrder {
    Family family = Family::Constant;
    BigFloat rho{1L};
    BigFloat k{0L};
    BigFloat r_cut{1L};
    BigFloat log_scale{0L};

    static ProximateOrder constant(const BigFloat& rho, const BigFloat& r_cut = BigFloat(1L));
    static ProximateOrder loglog(const BigFloat& rho, const BigFloat& k,
                                 const BigFloat& r_cut = BigFloat(16L));
    static ProximateOrder logloglog(const BigFloat& rho, const BigFloat& k,
                                    const BigFloat& r_cut = BigFloat(64L));
    static ProximateOrder make(Family f, const BigFloat& rho, const BigFloat& k,
                               const BigFloat& r_cut, const BigFloat& log_scale = BigFloat(0L));

    void validate() const;  // throws domain_error on bad parameters

    // x = ln r domain
    BigFloat varrho_x(const BigFloat& x) const;
    BigFloat dvarrho_dx(const BigFloat& x) const;
    BigFloat L_raw(const BigFloat& x) const { return varrho_x(x) * x; }
    BigFloat dL_dx_raw(const BigFloat& x) const { return varrho_x(x) + x * dvarrho_dx(x); }

    // r domain: (varrho(r), d varrho / dr)
    std::pair<BigFloat, BigFloat> eval(const BigFloat& r) const;
    BigFloat x_cut() const { return log(r_cut); }
};

// Multiplies the weight by c for large r by adding ln c / ln r to varrho
// (Remark 4.4 form). c > 0 required; c = 1 returns the order unchanged.
ProximateOrder rescale_dst_order(const ProximateOrder& order, const BigFloat& c);

// Monotone splice: Lhat(x) = L(x) for x >= x1, linear with matching value and
// slope below, so r -> r^varrhohat(r) is a strictly increasing bijection.
struct NormalizedOrder {
    ProximateOrder base;
    BigFloat x1{0L};         // ln r1
    BigFloat L1{0L};         // Lhat(x1)
    BigFloat slope{1L};      // dLhat/dx at and below x1 (> 0)
    BigFloat discrepancy{0L};
    BigFloat solver_tol{0L};

    BigFloat r1() const { return exp(x1); }

    BigFloat ln_weight_x(const BigFloat& x) const {
        if (x >= x1) return base.L_raw(x);
        return L1 + slope * (x - x1);
    }
    BigFloat dln_weight_dx(const BigFloat& x) const {
        if (x >= x1) return base.dL_dx_raw(x);
        return slope;
    }
    BigFloat ln_weight(const BigFloat& r) const;           // ln of the spliced weight at r
    BigFloat ln_weight_original(const BigFloat& r) const;  // varrho(r) ln r, unspliced

    // x solving Lhat(x) = w; exact linear inverse below the splice, bracketed
    // bisection + Newton above. Throws construction_error outside 2^+-1024.
    BigFloat ln_phi_lnt(const BigFloat& w) const;
    BigFloat phi(const BigFloat& t) const;                 // t > 0
};

NormalizedOrder normalize(const ProximateOrder& order,
                          const BigFloat& solver_tol = BigFloat::parse("1e-25"));

struct GrowthScale {
    NormalizedOrder order;
    unsigned long q_max = 0;
    std::vector<BigFloat> ln_G;  // [0..q_max], ln_G[0] = 0
};

GrowthScale growth_scale(const NormalizedOrder& order, unsigned long q_max);

struct LemmaReport {
    std::string lemma_id;
    std::vector<std::pair<std::string, BigFloat>> fitted;
    std::string grid;
    BigFloat max_violation{0L};
    bool passed = false;
};

// checks weight(r+s) <= kappa (weight(r) + weight(s)) + B. Requires
// kappa > 2^rho. Fits B on a log grid, re-verifies on a seeded random sample.
LemmaReport verify_subadditivity(const NormalizedOrder& order, const BigFloat& kappa,
                                 unsigned grid_size = 121);

// checks (1/rho - delta)/t < phi'/phi < (1/rho + delta)/t beyond some T_0.
LemmaReport verify_phi_derivative(const NormalizedOrder& order, const BigFloat& delta,
                                  unsigned grid_size = 200);

// checks y_sigma(u,t) + (1/rho) ln(e rho) <= -(1/rho) ln sigma' for
// u, t >= T_1, where y_sigma(u,t) = ln(phi(t)/phi(u)) - sigma t/u.
LemmaReport verify_y_bound(const NormalizedOrder& order, const BigFloat& sigma,
                           const BigFloat& sigma_prime, unsigned grid_size = 161);

}  // namespace valiron

#endif
