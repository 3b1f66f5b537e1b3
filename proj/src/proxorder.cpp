#include "valiron/proxorder.hpp"

#include "valiron/errors.hpp"
#include "valiron/rng.hpp"

namespace valiron {

std::string family_name(Family f) {
    switch (f) {
        case Family::Constant: return "constant";
        case Family::LogLog: return "loglog";
        default: return "logloglog";
    }
}

Family family_from_name(const std::string& s) {
    if (s == "constant") return Family::Constant;
    if (s == "loglog") return Family::LogLog;
    if (s == "logloglog") return Family::LogLogLog;
    throw domain_error("unknown proximate-order family: '" + s + "'");
}

ProximateOrder ProximateOrder::constant(const BigFloat& rho, const BigFloat& r_cut) {
    return make(Family::Constant, rho, BigFloat(0L), r_cut);
}
ProximateOrder ProximateOrder::loglog(const BigFloat& rho, const BigFloat& k, const BigFloat& r_cut) {
    return make(Family::LogLog, rho, k, r_cut);
}
ProximateOrder ProximateOrder::logloglog(const BigFloat& rho, const BigFloat& k, const BigFloat& r_cut) {
    return make(Family::LogLogLog, rho, k, r_cut);
}

ProximateOrder ProximateOrder::make(Family f, const BigFloat& rho, const BigFloat& k,
                                    const BigFloat& r_cut, const BigFloat& log_scale) {
    ProximateOrder o;
    o.family = f;
    o.rho = rho;
    o.k = k;
    o.r_cut = r_cut;
    o.log_scale = log_scale;
    o.validate();
    return o;
}

namespace {

// family value F(x) and derivative F'(x) for x >= x_cut (x = ln r)
BigFloat family_F(const ProximateOrder& o, const BigFloat& x) {
    switch (o.family) {
        case Family::Constant:
            return o.rho;
        case Family::LogLog:
            return o.rho + o.k * log(x) / x;
        default:
            return o.rho + o.k * log(log(x)) / x;
    }
}

BigFloat family_dF(const ProximateOrder& o, const BigFloat& x) {
    switch (o.family) {
        case Family::Constant:
            return BigFloat(0L);
        case Family::LogLog:
            return o.k * (BigFloat(1L) - log(x)) / (x * x);
        default: {
            BigFloat lx = log(x);
            return o.k * (BigFloat(1L) / lx - log(lx)) / (x * x);
        }
    }
}

struct Bridge {
    BigFloat x_c, x_b, v0, m_c;
};

Bridge bridge_of(const ProximateOrder& o) {
    Bridge b;
    b.x_c = o.x_cut();
    b.x_b = b.x_c - const_ln2();
    b.m_c = family_dF(o, b.x_c);
    BigFloat f_c = family_F(o, b.x_c);
    b.v0 = f_c - const_ln2() * b.m_c / BigFloat(2L);
    return b;
}

}  // namespace

void ProximateOrder::validate() const {
    if (!(rho > BigFloat(0L))) throw domain_error("proximate order needs rho > 0");
    if (!(r_cut > BigFloat(0L))) throw domain_error("proximate order needs r_cut > 0");
    if (family == Family::LogLog && !(r_cut > BigFloat(1L)))
        throw domain_error("loglog family needs r_cut > 1 (ln ln r must be defined at the cut)");
    if (family == Family::LogLogLog && !(r_cut > const_e()))
        throw domain_error("logloglog family needs r_cut > e");
    if (family != Family::Constant) {
        Bridge b = bridge_of(*this);
        if (!(b.v0 > BigFloat(0L)))
            throw domain_error("constant extension below r_cut would not stay positive; raise r_cut");
    }
}

BigFloat ProximateOrder::varrho_x(const BigFloat& x) const {
    BigFloat v;
    if (family == Family::Constant) {
        v = rho;
    } else {
        Bridge b = bridge_of(*this);
        if (x >= b.x_c) {
            v = family_F(*this, x);
        } else if (x >= b.x_b) {
            BigFloat d = x - b.x_b;
            v = b.v0 + b.m_c / (BigFloat(2L) * const_ln2()) * d * d;
        } else {
            v = b.v0;
        }
    }
    if (!log_scale.is_zero()) {
        BigFloat x_cb = max(x_cut(), const_ln2());
        v += log_scale / (x >= x_cb ? x : x_cb);
    }
    return v;
}

BigFloat ProximateOrder::dvarrho_dx(const BigFloat& x) const {
    BigFloat d(0L);
    if (family != Family::Constant) {
        Bridge b = bridge_of(*this);
        if (x >= b.x_c) {
            d = family_dF(*this, x);
        } else if (x >= b.x_b) {
            d = b.m_c / const_ln2() * (x - b.x_b);
        }
    }
    if (!log_scale.is_zero()) {
        BigFloat x_cb = max(x_cut(), const_ln2());
        if (x >= x_cb) d -= log_scale / (x * x);
    }
    return d;
}

std::pair<BigFloat, BigFloat> ProximateOrder::eval(const BigFloat& r) const {
    if (!(r > BigFloat(0L))) throw domain_error("eval_order needs r > 0");
    BigFloat x = log(r);
    return {varrho_x(x), dvarrho_dx(x) / r};
}

ProximateOrder rescale_dst_order(const ProximateOrder& order, const BigFloat& c) {
    if (!(c > BigFloat(0L))) throw domain_error("rescale needs c > 0");
    ProximateOrder out = order;
    out.log_scale += log(c);
    return out;
}

BigFloat NormalizedOrder::ln_weight(const BigFloat& r) const {
    if (!(r > BigFloat(0L))) throw domain_error("ln_weight needs r > 0");
    return ln_weight_x(log(r));
}

BigFloat NormalizedOrder::ln_weight_original(const BigFloat& r) const {
    if (!(r > BigFloat(0L))) throw domain_error("ln_weight needs r > 0");
    return base.L_raw(log(r));
}

BigFloat NormalizedOrder::ln_phi_lnt(const BigFloat& w) const {
    static const BigFloat x_limit = BigFloat(1024L) * const_ln2();
    if (w.is_nan()) throw domain_error("phi of nan");
    if (w <= L1) {
        BigFloat x = x1 + (w - L1) / slope;
        if (x < -x_limit) throw construction_error("phi argument below 2^-1024 range");
        return x;
    }
    // bracket above the splice by doubling the offset
    BigFloat lo = x1;
    BigFloat off(1L);
    BigFloat hi = x1 + off;
    while (base.L_raw(hi) < w) {
        off += off;
        hi = x1 + off;
        if (hi > x_limit) throw construction_error("phi argument beyond 2^1024 range");
    }
    for (int i = 0; i < 80; ++i) {
        BigFloat mid = (lo + hi) / BigFloat(2L);
        if (base.L_raw(mid) < w)
            lo = mid;
        else
            hi = mid;
    }
    BigFloat x = (lo + hi) / BigFloat(2L);
    BigFloat tol = solver_tol * max(BigFloat(1L), abs(w));
    for (int i = 0; i < 8; ++i) {
        BigFloat g = base.L_raw(x) - w;
        if (abs(g) <= tol) break;
        BigFloat dg = base.dL_dx_raw(x);
        if (!(dg > BigFloat(0L))) break;
        x -= g / dg;
        if (x < lo || x > hi) x = (lo + hi) / BigFloat(2L);
    }
    return x;
}

BigFloat NormalizedOrder::phi(const BigFloat& t) const {
    if (!(t > BigFloat(0L))) throw domain_error("phi needs t > 0");
    return exp(ln_phi_lnt(log(t)));
}

NormalizedOrder normalize(const ProximateOrder& order, const BigFloat& solver_tol) {
    order.validate();
    NormalizedOrder n;
    n.base = order;
    n.solver_tol = solver_tol;

    // search grid: quarter octaves upward from r_cut
    const int grid_n = 801;
    BigFloat step = const_ln2() / BigFloat(4L);
    BigFloat x_c = order.x_cut();
    std::vector<BigFloat> d(grid_n);
    for (int j = 0; j < grid_n; ++j) d[j] = order.dL_dx_raw(x_c + BigFloat(static_cast<long>(j)) * step);

    int j1 = -1;
    bool ok = true;
    for (int j = grid_n - 1; j >= 0; --j) {
        ok = ok && d[j] > BigFloat(0L);
        if (ok) j1 = j;
    }
    // r1 = smallest grid point >= r_cut beyond which dL/dx > 0 stays true
    if (j1 < 0 || !(d[j1] > BigFloat(0L)))
        throw construction_error("normalize: ln-weight never becomes increasing on the search grid");

    n.x1 = x_c + BigFloat(static_cast<long>(j1)) * step;
    n.L1 = order.L_raw(n.x1);
    n.slope = d[j1];

    if (order.family == Family::Constant && order.log_scale.is_zero()) {
        // splice line coincides with L(x) = rho x identically
        n.discrepancy = BigFloat(0L);
        return n;
    }

    const int m = 10000;
    BigFloat span = BigFloat(40L) * const_ln2();
    BigFloat best(0L);
    for (int j = 0; j < m; ++j) {
        BigFloat x = n.x1 - span * BigFloat(static_cast<long>(m - 1 - j)) / BigFloat(static_cast<long>(m - 1));
        BigFloat gap = abs(exp(n.ln_weight_x(x)) - exp(order.L_raw(x)));
        best = max(best, gap);
    }
    n.discrepancy = best;
    return n;
}

GrowthScale growth_scale(const NormalizedOrder& order, unsigned long q_max) {
    if (q_max < 1) throw domain_error("growth_scale needs q_max >= 1");
    GrowthScale s;
    s.order = order;
    s.q_max = q_max;
    s.ln_G.reserve(q_max + 1);
    s.ln_G.push_back(BigFloat(0L));
    BigFloat c = (BigFloat(1L) + log(order.base.rho)) / order.base.rho;
    for (unsigned long q = 1; q <= q_max; ++q) {
        BigFloat bq(static_cast<unsigned long>(q));
        s.ln_G.push_back(bq * order.ln_phi_lnt(log(bq)) - bq * c);
    }
    return s;
}

LemmaReport verify_subadditivity(const NormalizedOrder& order, const BigFloat& kappa,
                                 unsigned grid_size) {
    BigFloat two_pow_rho = exp(order.base.rho * const_ln2());
    if (!(kappa > two_pow_rho))
        throw domain_error("verify_subadditivity needs kappa > 2^rho");
    if (grid_size < 8) throw domain_error("grid too small");

    BigFloat x_lo = BigFloat(-10L) * const_ln2();
    BigFloat x_hi = BigFloat(50L) * const_ln2();
    BigFloat width = x_hi - x_lo;

    std::vector<BigFloat> xs(grid_size), V(grid_size);
    for (unsigned i = 0; i < grid_size; ++i) {
        xs[i] = x_lo + width * BigFloat(static_cast<long>(i)) / BigFloat(static_cast<long>(grid_size - 1));
        V[i] = exp(order.ln_weight_x(xs[i]));
    }

    BigFloat B(0L);
    for (unsigned i = 0; i < grid_size; ++i)
        for (unsigned j = i; j < grid_size; ++j) {
            BigFloat x_sum = log_add_exp(xs[i], xs[j]);  // ln(r_i + r_j)
            BigFloat gap = exp(order.ln_weight_x(x_sum)) - kappa * (V[i] + V[j]);
            B = max(B, gap);
        }

    SplitMix64 rng(0x5eedba5eu);
    BigFloat worst = BigFloat::neg_inf();
    for (int s = 0; s < 2000; ++s) {
        BigFloat xa = x_lo + width * BigFloat(rng.uniform01());
        BigFloat xb = x_lo + width * BigFloat(rng.uniform01());
        BigFloat gap = exp(order.ln_weight_x(log_add_exp(xa, xb)))
                     - kappa * (exp(order.ln_weight_x(xa)) + exp(order.ln_weight_x(xb)))
                     - B;
        worst = max(worst, gap);
    }

    LemmaReport rep;
    rep.lemma_id = "pseudo-subadditivity";
    rep.fitted = {{"kappa", kappa}, {"B", B}};
    rep.grid = "r,s in [2^-10, 2^50], " + std::to_string(grid_size) +
               " log points per axis; re-check on 2000 seeded random pairs";
    rep.max_violation = worst;
    rep.passed = worst <= BigFloat(0L);
    return rep;
}

LemmaReport verify_phi_derivative(const NormalizedOrder& order, const BigFloat& delta,
                                  unsigned grid_size) {
    BigFloat inv_rho = BigFloat(1L) / order.base.rho;
    if (!(delta > BigFloat(0L)) || !(delta < inv_rho))
        throw domain_error("verify_phi_derivative needs 0 < delta < 1/rho");
    if (grid_size < 8) throw domain_error("grid too small");

    BigFloat ln10 = log(BigFloat(10L));
    BigFloat h_rel = exp(BigFloat(-40L) * const_ln2());  // 2^-40
    BigFloat lo_band = inv_rho - delta, hi_band = inv_rho + delta;

    std::vector<BigFloat> t(grid_size), excess(grid_size);
    for (unsigned i = 0; i < grid_size; ++i) {
        // t from 10 to 1e8, log spaced
        BigFloat lt = ln10 * (BigFloat(1L) + BigFloat(7L) * BigFloat(static_cast<long>(i)) /
                                                 BigFloat(static_cast<long>(grid_size - 1)));
        t[i] = exp(lt);
        BigFloat h = t[i] * h_rel;
        BigFloat dphi = (order.phi(t[i] + h) - order.phi(t[i] - h)) / (BigFloat(2L) * h);
        BigFloat ratio = t[i] * dphi / order.phi(t[i]);
        excess[i] = max(lo_band - ratio, ratio - hi_band);  // <= 0 means inside the band
    }

    int idx = -1;
    bool ok = true;
    for (int i = static_cast<int>(grid_size) - 1; i >= 0; --i) {
        ok = ok && excess[i] < BigFloat(0L);
        if (ok) idx = i;
    }

    LemmaReport rep;
    rep.lemma_id = "phi-log-derivative";
    rep.grid = "t in [10, 1e8], " + std::to_string(grid_size) +
               " log points, central difference step t*2^-40";
    if (idx < 0) {
        rep.fitted = {{"T_0", BigFloat::nan()}};
        rep.max_violation = excess[grid_size - 1];
        rep.passed = false;
        return rep;
    }
    BigFloat worst = BigFloat::neg_inf();
    for (unsigned i = static_cast<unsigned>(idx); i < grid_size; ++i) worst = max(worst, excess[i]);
    rep.fitted = {{"T_0", t[idx]}, {"delta", delta}};
    rep.max_violation = worst;
    rep.passed = true;
    return rep;
}

LemmaReport verify_y_bound(const NormalizedOrder& order, const BigFloat& sigma,
                           const BigFloat& sigma_prime, unsigned grid_size) {
    if (!(sigma_prime > BigFloat(0L)) || !(sigma_prime < sigma))
        throw domain_error("verify_y_bound needs 0 < sigma' < sigma");
    if (grid_size < 8) throw domain_error("grid too small");

    BigFloat inv_rho = BigFloat(1L) / order.base.rho;
    BigFloat shift = inv_rho * (BigFloat(1L) + log(order.base.rho));  // (1/rho) ln(e rho)
    BigFloat rhs = -inv_rho * log(sigma_prime);

    BigFloat step = const_ln2() / BigFloat(4L);
    std::vector<BigFloat> w(grid_size), lphi(grid_size);
    for (unsigned i = 0; i < grid_size; ++i) {
        w[i] = step * BigFloat(static_cast<long>(i));  // ln t, t in [1, 2^(grid/4)]
        lphi[i] = order.ln_phi_lnt(w[i]);
    }

    // suffix maxima of LHS(u_i, t_j) over i,j >= m
    auto lhs = [&](unsigned i, unsigned j) {
        return lphi[j] - lphi[i] - sigma * exp(w[j] - w[i]) + shift;
    };
    std::vector<BigFloat> suf(grid_size, BigFloat::neg_inf());
    for (int m = static_cast<int>(grid_size) - 1; m >= 0; --m) {
        BigFloat cur = m + 1 < static_cast<int>(grid_size) ? suf[m + 1] : BigFloat::neg_inf();
        for (unsigned j = static_cast<unsigned>(m); j < grid_size; ++j) cur = max(cur, lhs(m, j));
        for (unsigned i = static_cast<unsigned>(m); i < grid_size; ++i) cur = max(cur, lhs(i, m));
        suf[m] = cur;
    }

    int idx = -1;
    for (unsigned m = 0; m < grid_size; ++m)
        if (suf[m] <= rhs) { idx = static_cast<int>(m); break; }

    LemmaReport rep;
    rep.lemma_id = "y-sigma-bound";
    rep.grid = "u,t on quarter-octave grid [1, 2^" + std::to_string(grid_size / 4) + "], " +
               std::to_string(grid_size) + " points per axis";
    if (idx < 0) {
        rep.fitted = {{"T_1", BigFloat::nan()}};
        rep.max_violation = suf[grid_size - 1] - rhs;
        rep.passed = false;
        return rep;
    }
    rep.fitted = {{"T_1", exp(w[idx])}, {"sigma", sigma}, {"sigma_prime", sigma_prime}};
    rep.max_violation = suf[idx] - rhs;
    rep.passed = true;
    return rep;
}

}  // namespace valiron
