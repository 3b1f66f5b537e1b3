#include "valiron/series.hpp"

#include <functional>
#include <optional>

#include "valiron/rng.hpp"

namespace valiron {

namespace {

unsigned long to_index(const BigFloat& x) {
    long v = mpfr_get_si(x.raw(), MPFR_RNDN);
    return v < 0 ? 0UL : static_cast<unsigned long>(v);
}

BigFloat ln_weight_kind(const NormalizedOrder& order, WeightKind kind, const BigFloat& x) {
    return kind == WeightKind::original ? order.base.L_raw(x) : order.ln_weight_x(x);
}

// Golden-section maximization on [a, b]; returns the best (x, value) seen.
std::pair<BigFloat, BigFloat> golden_max(const std::function<BigFloat(const BigFloat&)>& g,
                                         BigFloat a, BigFloat b, int iters) {
    const BigFloat ratio = (sqrt(BigFloat(5L)) - BigFloat(1L)) / BigFloat(2L);
    BigFloat c = b - ratio * (b - a);
    BigFloat d = a + ratio * (b - a);
    BigFloat gc = g(c), gd = g(d);
    BigFloat best_x = gc > gd ? c : d;
    BigFloat best_v = gc > gd ? gc : gd;
    for (int i = 0; i < iters; ++i) {
        if (gc > gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d);
        }
        if (gc > best_v) { best_v = gc; best_x = c; }
        if (gd > best_v) { best_v = gd; best_x = d; }
    }
    return {best_x, best_v};
}

// Coarse scan followed by golden refinement; widens the bracket when the
// coarse maximum lands on an endpoint.
std::pair<BigFloat, BigFloat> scan_max(const std::function<BigFloat(const BigFloat&)>& g,
                                       BigFloat lo, BigFloat hi, unsigned pts) {
    if (pts < 8) pts = 8;
    for (int widen = 0; widen < 8; ++widen) {
        BigFloat step = (hi - lo) / BigFloat(static_cast<unsigned long>(pts - 1));
        BigFloat best_v = BigFloat::neg_inf();
        unsigned best_j = 0;
        for (unsigned j = 0; j < pts; ++j) {
            BigFloat v = g(lo + step * BigFloat(static_cast<unsigned long>(j)));
            if (v > best_v) { best_v = v; best_j = j; }
        }
        if (best_j == 0) { lo -= BigFloat(10L); continue; }
        if (best_j == pts - 1) { hi += BigFloat(10L); continue; }
        BigFloat a = lo + step * BigFloat(static_cast<unsigned long>(best_j - 1));
        BigFloat b = lo + step * BigFloat(static_cast<unsigned long>(best_j + 1));
        auto [x, v] = golden_max(g, a, b, 140);
        if (!(v > best_v)) return {lo + step * BigFloat(static_cast<unsigned long>(best_j)), best_v};
        return {x, v};
    }
    auto [x, v] = golden_max(g, lo, hi, 200);
    return {x, v};
}

using LevelTerms = std::vector<std::pair<const MultiIndex*, const BigComplex*>>;

BigComplex eval_terms(const LevelTerms& terms, const std::vector<BigComplex>& z) {
    BigComplex acc;
    for (const auto& [a, v] : terms) {
        BigComplex t = *v;
        for (size_t i = 0; i < a->e.size(); ++i)
            for (uint32_t j = 0; j < a->e[i]; ++j) t *= z[i];
        acc += t;
    }
    return acc;
}

// Coordinate-wise phase sweeps: rotate one coordinate at a time through a
// fixed fan of angles and keep every improvement. The result is the value at
// an actual point of the sphere, so it stays a valid lower bound.
BigFloat align_phases(const LevelTerms& terms, std::vector<BigComplex> z) {
    const int angles = 16;
    BigFloat best = eval_terms(terms, z).modulus();
    BigFloat two_pi = BigFloat(2L) * const_pi();
    for (int sweep = 0; sweep < 2; ++sweep) {
        for (size_t i = 0; i < z.size(); ++i) {
            BigComplex kept = z[i];
            for (int k = 1; k < angles; ++k) {
                BigFloat th = two_pi * BigFloat(static_cast<long>(k)) / BigFloat(static_cast<long>(angles));
                z[i] = kept * BigComplex(cos(th), sin(th));
                BigFloat v = eval_terms(terms, z).modulus();
                if (v > best) { best = v; }
            }
            z[i] = kept;
        }
    }
    return best;
}

BigFloat normal01(SplitMix64& rng) {
    double u1 = rng.uniform01();
    double u2 = rng.uniform01();
    if (u1 <= 0.0) u1 = 1.0 / 9007199254740992.0;
    BigFloat r = sqrt(BigFloat(-2L) * log(BigFloat(u1)));
    return r * cos(BigFloat(2L) * const_pi() * BigFloat(u2));
}

}  // namespace

NumSeries to_numeric(const ExactSeries& f) {
    NumSeries r(f.n, f.q_max);
    for (const auto& [a, v] : f.coeffs) {
        BigComplex c(v);
        if (!c.is_zero()) r.coeffs.emplace(a, std::move(c));
    }
    return r;
}

std::vector<BigFloat> level_ln_upper(const NumSeries& f) {
    std::vector<BigFloat> u(f.q_max + 1, BigFloat::neg_inf());
    for (const auto& [a, v] : f.coeffs) {
        size_t q = static_cast<size_t>(a.degree());
        u[q] = log_add_exp(u[q], log(v.modulus()));
    }
    return u;
}

std::vector<BigFloat> level_ln_max(const NumSeries& f) {
    std::vector<BigFloat> u(f.q_max + 1, BigFloat::neg_inf());
    for (const auto& [a, v] : f.coeffs) {
        size_t q = static_cast<size_t>(a.degree());
        BigFloat lv = log(v.modulus());
        if (lv > u[q]) u[q] = lv;
    }
    return u;
}

HomNormProfile hom_norm_profile(const NumSeries& f, unsigned samples) {
    if (samples < 1) throw domain_error("hom_norm_profile: samples must be >= 1");
    HomNormProfile p;
    p.q_max = f.q_max;
    p.ln_upper = level_ln_upper(f);
    if (f.n == 1) {
        p.ln_lower = p.ln_upper;
        return p;
    }
    p.ln_lower.assign(f.q_max + 1, BigFloat::neg_inf());

    std::vector<LevelTerms> lev(f.q_max + 1);
    for (const auto& [a, v] : f.coeffs)
        lev[static_cast<size_t>(a.degree())].push_back({&a, &v});

    BigFloat inv_sqrt_n = BigFloat(1L) / sqrt(BigFloat(f.n));
    for (unsigned long q = 0; q <= f.q_max; ++q) {
        if (lev[q].empty()) continue;
        std::vector<std::vector<BigComplex>> candidates;
        for (unsigned long i = 0; i < f.n; ++i) {
            std::vector<BigComplex> z(f.n);
            z[i] = BigComplex(BigFloat(1L));
            candidates.push_back(std::move(z));
        }
        candidates.emplace_back(f.n, BigComplex(inv_sqrt_n));
        SplitMix64 rng(0x5eedf00dULL ^ (q * 0x9e3779b97f4a7c15ULL));
        for (unsigned s = 0; s < samples; ++s) {
            std::vector<BigComplex> z(f.n);
            BigFloat nrm2(0L);
            for (unsigned long i = 0; i < f.n; ++i) {
                z[i] = BigComplex(normal01(rng), normal01(rng));
                nrm2 += z[i].re * z[i].re + z[i].im * z[i].im;
            }
            if (nrm2.is_zero()) continue;
            BigComplex inv(BigFloat(1L) / sqrt(nrm2));
            for (auto& zi : z) zi *= inv;
            candidates.push_back(std::move(z));
        }
        BigFloat best = BigFloat::neg_inf();
        for (const auto& z : candidates) {
            BigFloat v = align_phases(lev[q], z);
            BigFloat lv = log(v);
            if (lv > best) best = lv;
        }
        p.ln_lower[q] = best;
    }
    return p;
}

WeightedNorm weighted_norm(const NumSeries& f, const NormalizedOrder& order,
                           const BigFloat& sigma, unsigned radial_grid, WeightKind kind) {
    if (!(sigma > BigFloat(0L))) throw domain_error("weighted_norm: sigma must be positive");
    if (radial_grid < 16) radial_grid = 16;
    WeightedNorm out;
    std::vector<BigFloat> U = level_ln_upper(f);
    long q_eff = -1;
    for (long q = static_cast<long>(f.q_max); q >= 0; --q)
        if (U[static_cast<size_t>(q)].is_finite()) { q_eff = q; break; }
    if (q_eff < 0) {
        out.value = BigFloat(0L);
        out.ln_value = BigFloat::neg_inf();
        out.argmax_r = BigFloat(0L);
        return out;
    }
    if (q_eff == 0) {
        // weight(r) -> 0 as r -> 0, so the sup of a constant is itself.
        out.ln_value = U[0];
        out.value = exp(U[0]);
        out.argmax_r = BigFloat(0L);
        return out;
    }

    std::vector<std::pair<BigFloat, BigFloat>> terms;  // (q, ln U_q)
    for (unsigned long q = 0; q <= static_cast<unsigned long>(q_eff); ++q)
        if (U[q].is_finite()) terms.emplace_back(BigFloat(q), U[q]);

    auto g = [&](const BigFloat& x) {
        BigFloat acc = BigFloat::neg_inf();
        for (const auto& [qf, lnU] : terms) acc = log_add_exp(acc, lnU + qf * x);
        return acc - sigma * exp(ln_weight_kind(order, kind, x));
    };

    const BigFloat rho = order.base.rho;
    BigFloat r_star = order.phi(BigFloat(f.q_max) / (sigma * rho));
    BigFloat x_hi = log(r_star) + const_ln2();
    BigFloat x_lo = min(BigFloat(0L), order.x1) - BigFloat(35L) * const_ln2();
    if (!(x_lo < x_hi)) x_lo = x_hi - BigFloat(35L) * const_ln2();

    BigFloat step = (x_hi - x_lo) / BigFloat(static_cast<unsigned long>(radial_grid - 1));
    BigFloat best_v = BigFloat::neg_inf();
    unsigned best_j = 0;
    for (unsigned j = 0; j < radial_grid; ++j) {
        BigFloat v = g(x_lo + step * BigFloat(static_cast<unsigned long>(j)));
        if (v > best_v) { best_v = v; best_j = j; }
    }
    BigFloat a = x_lo + step * BigFloat(static_cast<unsigned long>(best_j > 0 ? best_j - 1 : 0));
    BigFloat b = x_lo + step * BigFloat(static_cast<unsigned long>(
                              best_j + 1 < radial_grid ? best_j + 1 : radial_grid - 1));
    auto [gx, gv] = golden_max(g, a, b, 140);
    BigFloat best_x = x_lo + step * BigFloat(static_cast<unsigned long>(best_j));
    if (gv > best_v) { best_v = gv; best_x = gx; }

    out.ln_value = best_v;
    out.argmax_r = exp(best_x);
    if (U[0].is_finite() && U[0] >= best_v) {
        // The r -> 0 limit dominates every interior candidate.
        out.ln_value = U[0];
        out.argmax_r = BigFloat(0L);
    }
    out.value = exp(out.ln_value);
    out.tail_suspect = out.argmax_r >= BigFloat::parse("0.99") * r_star;
    return out;
}

BigFloat ln_monomial_norm(const NormalizedOrder& order, const BigFloat& sigma,
                          unsigned long q, WeightKind kind) {
    if (!(sigma > BigFloat(0L))) throw domain_error("ln_monomial_norm: sigma must be positive");
    if (q == 0) return BigFloat(0L);
    const BigFloat rho = order.base.rho;
    BigFloat qf(q);
    auto h = [&](const BigFloat& x) {
        return qf * x - sigma * exp(ln_weight_kind(order, kind, x));
    };
    BigFloat xc = log(order.phi(qf / (sigma * rho)));
    auto [x, v] = scan_max(h, xc - BigFloat(10L), xc + BigFloat(4L), 257);
    (void)x;
    return v;
}

BigFloat ln_sphere_factor(const MultiIndex& a) {
    unsigned long q = static_cast<unsigned long>(a.degree());
    if (q == 0) return BigFloat(0L);
    BigFloat s(0L);
    for (auto ai : a.e)
        if (ai) {
            BigFloat af(static_cast<unsigned long>(ai));
            s += af * log(af);
        }
    BigFloat qf(q);
    return (s - qf * log(qf)) / BigFloat(2L);
}

TypeEstimate estimate_type(const NumSeries& f, const NormalizedOrder& order,
                           const BigFloat& window_frac) {
    if (!(window_frac > BigFloat(0L)) || !(window_frac <= BigFloat(1L)))
        throw domain_error("estimate_type: window_frac must be in (0, 1]");
    TypeEstimate t;
    std::vector<BigFloat> U = level_ln_upper(f);
    unsigned long lo = to_index(ceil((BigFloat(1L) - window_frac) * BigFloat(f.q_max)));
    if (lo < 1) lo = 1;
    t.q_lo = lo;
    t.q_hi = f.q_max;
    std::vector<BigFloat> qs, ss;
    BigFloat best = BigFloat::neg_inf();
    unsigned long best_q = 0;
    for (unsigned long q = lo; q <= f.q_max; ++q) {
        if (!U[q].is_finite()) continue;
        BigFloat qf(q);
        BigFloat s = U[q] / qf + order.ln_phi_lnt(log(qf));
        if (s > best) { best = s; best_q = q; }
        qs.push_back(qf);
        ss.push_back(s);
    }
    if (qs.empty()) {
        t.sigma_hat = BigFloat(0L);
        t.confidence_note = "zero tail window; sigma_hat = 0 is vacuous";
        return t;
    }
    const BigFloat rho = order.base.rho;
    t.sigma_hat = exp(rho * (best - BigFloat(1L) / rho - log(rho) / rho));
    t.trend_slope = ls_slope(qs, ss);
    t.confidence_note = "tail max at q = " + std::to_string(best_q) + " over " +
                        std::to_string(qs.size()) + " nonzero levels";
    return t;
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Member: return "Member";
        case Verdict::NotMember: return "NotMember";
        default: return "Inconclusive";
    }
}

namespace {

struct TailScan {
    bool empty = true;
    BigFloat max_v = BigFloat::neg_inf();
    unsigned long argmax_q = 0;
    BigFloat slope{0L};
    unsigned long q_lo = 0, q_hi = 0;
    size_t count = 0;
    bool max_at_start = false;
};

// t_q = (rho/q)(vals[q] + ln G_q) over the trailing quarter of the levels;
// ties go to the smallest q.
TailScan tail_scan(const std::vector<BigFloat>& vals, unsigned long q_max, const BigFloat& rho,
                   const std::vector<BigFloat>& lnG) {
    TailScan ts;
    unsigned long lo = to_index(ceil(BigFloat::parse("0.75") * BigFloat(q_max)));
    if (lo < 1) lo = 1;
    ts.q_lo = lo;
    ts.q_hi = q_max;
    std::vector<BigFloat> qs, tv;
    unsigned long first_q = 0;
    for (unsigned long q = lo; q <= q_max && q < vals.size(); ++q) {
        if (!vals[q].is_finite()) continue;
        BigFloat t = (rho / BigFloat(q)) * (vals[q] + lnG[q]);
        if (ts.empty) first_q = q;
        if (ts.empty || t > ts.max_v) {
            ts.max_v = t;
            ts.argmax_q = q;
            ts.empty = false;
        }
        qs.push_back(BigFloat(q));
        tv.push_back(t);
    }
    if (!ts.empty) {
        if (qs.size() >= 2) ts.slope = ls_slope(qs, tv);
        ts.count = qs.size();
        ts.max_at_start = ts.argmax_q == first_q;
    }
    return ts;
}

MembershipVerdict limsup_verdict(const std::vector<BigFloat>& vals, unsigned long q_max,
                                 const NormalizedOrder& order, const GrowthScale& scale,
                                 const BigFloat& ln_threshold, const std::string& label) {
    MembershipVerdict v;
    TailScan ts = tail_scan(vals, q_max, order.base.rho, scale.ln_G);
    if (ts.empty) {
        v.verdict = Verdict::Member;
        v.margin = BigFloat::pos_inf();
        v.fitted.emplace_back("tail_max", BigFloat::neg_inf());
        v.diagnostics = label + ": no nonzero level in the tail window, vacuous membership";
        return v;
    }
    v.fitted.emplace_back("tail_max", ts.max_v);
    v.fitted.emplace_back("trend_slope", ts.slope);
    v.fitted.emplace_back("argmax_q", BigFloat(ts.argmax_q));
    std::string win = " (window q = " + std::to_string(ts.q_lo) + ".." + std::to_string(ts.q_hi) +
                      ", " + std::to_string(ts.count) + " levels)";
    if (ln_threshold.is_finite()) {
        v.margin = ln_threshold - ts.max_v;
        v.verdict = v.margin > BigFloat(0L) ? Verdict::Member : Verdict::NotMember;
        BigFloat noise = BigFloat(10L) * abs(ts.slope);
        if (abs(v.margin) < noise) {
            v.verdict = Verdict::Inconclusive;
            v.diagnostics = label + ": margin " + v.margin.str() +
                            " is within 10x the trend slope, finite-truncation noise" + win;
        } else {
            v.diagnostics = label + ": margin " + v.margin.str() + " in log units" + win;
        }
    } else {
        // sigma = 0: membership needs t_q -> -inf, judged by the trend.
        v.margin = -ts.max_v;
        if (ts.slope < BigFloat(0L) && ts.max_at_start) {
            v.verdict = Verdict::Member;
            v.diagnostics = label + ": sigma = 0, tail decreasing from its start" + win;
        } else if (ts.slope >= BigFloat(0L)) {
            v.verdict = Verdict::NotMember;
            v.diagnostics = label + ": sigma = 0 but the tail stabilizes near exp(" +
                            ts.max_v.str() + ")" + win;
        } else {
            v.verdict = Verdict::Inconclusive;
            v.diagnostics = label + ": sigma = 0 and the tail trend is not one-sided" + win;
        }
    }
    return v;
}

}  // namespace

MembershipVerdict classify_minimal_type(const NumSeries& f, const NormalizedOrder& order,
                                        const BigFloat& sigma, const GrowthScale& scale) {
    if (sigma < BigFloat(0L)) throw domain_error("classify_minimal_type: sigma must be >= 0");
    if (scale.q_max < f.q_max)
        throw domain_error("classify_minimal_type: growth scale shorter than the series");
    BigFloat thr = sigma.is_zero() ? BigFloat::neg_inf() : log(sigma);
    MembershipVerdict v = limsup_verdict(level_ln_upper(f), f.q_max, order, scale, thr,
                                         "limsup (K_q G_q)^(rho/q) vs sigma");
    v.fitted.emplace_back("sigma", sigma);
    return v;
}

MembershipVerdict classify_coeff_bound(const NumSeries& f, const NormalizedOrder& order,
                                       const BigFloat& sigma, const GrowthScale& scale) {
    if (sigma < BigFloat(0L)) throw domain_error("classify_coeff_bound: sigma must be >= 0");
    if (scale.q_max < f.q_max)
        throw domain_error("classify_coeff_bound: growth scale shorter than the series");
    const BigFloat rho = order.base.rho;
    BigFloat factor = exp((rho / BigFloat(2L)) * log(BigFloat(f.n)));  // sqrt(n)^rho
    BigFloat threshold = factor * sigma;
    BigFloat thr = threshold.is_zero() ? BigFloat::neg_inf() : log(threshold);
    MembershipVerdict v = limsup_verdict(level_ln_max(f), f.q_max, order, scale, thr,
                                         "limsup (max|f_a| G_q)^(rho/q) vs sqrt(n)^rho sigma");
    v.fitted.emplace_back("sigma", sigma);
    v.fitted.emplace_back("threshold", threshold);
    v.diagnostics += "; converse membership lands at type sqrt(n)^rho (sigma + 0)";
    return v;
}

MembershipVerdict classify_normal_type(const NumSeries& f, const NormalizedOrder& order,
                                       const GrowthScale& scale) {
    if (scale.q_max < f.q_max)
        throw domain_error("classify_normal_type: growth scale shorter than the series");
    MembershipVerdict v;
    TailScan ts = tail_scan(level_ln_max(f), f.q_max, order.base.rho, scale.ln_G);
    if (ts.empty) {
        v.verdict = Verdict::Member;
        v.margin = BigFloat::pos_inf();
        v.fitted.emplace_back("fitted_bound", BigFloat(0L));
        v.diagnostics = "no nonzero level in the tail window; polynomials always qualify";
        return v;
    }
    // Boundedness of (max|f_a| G_q)^(rho/q) is judged by how much the tail
    // trend moves across the window: a genuinely divergent sequence keeps
    // climbing, a convergent one flattens out.
    BigFloat span = ts.slope * BigFloat(ts.q_hi - ts.q_lo);
    v.margin = BigFloat::parse("0.5") - span;
    v.fitted.emplace_back("tail_max", ts.max_v);
    v.fitted.emplace_back("fitted_bound", exp(ts.max_v));
    v.fitted.emplace_back("trend_slope", ts.slope);
    v.fitted.emplace_back("trend_span", span);
    std::string win = " (window q = " + std::to_string(ts.q_lo) + ".." + std::to_string(ts.q_hi) + ")";
    if (span > BigFloat::parse("0.5")) {
        v.verdict = Verdict::NotMember;
        v.diagnostics = "tail of (max|f_a| G_q)^(rho/q) climbs by " + span.str() +
                        " log units across the window, diverging" + win;
    } else if (span < BigFloat::parse("0.05")) {
        v.verdict = Verdict::Member;
        v.diagnostics = "tail of (max|f_a| G_q)^(rho/q) is flat (span " + span.str() +
                        "), bounded by " + exp(ts.max_v).str() + win;
    } else {
        v.verdict = Verdict::Inconclusive;
        v.diagnostics = "tail trend span " + span.str() + " is between the flat and divergent cutoffs" + win;
    }
    return v;
}

LemmaReport monomial_norm_check(const NormalizedOrder& order, const BigFloat& sigma,
                                const BigFloat& sigma_prime, const GrowthScale& scale,
                                unsigned long q_max) {
    if (!(sigma > BigFloat(0L))) throw domain_error("monomial_norm_check: sigma must be positive");
    if (!(sigma_prime > BigFloat(0L)) || !(sigma_prime < sigma))
        throw domain_error("monomial_norm_check: need 0 < sigma' < sigma");
    if (scale.q_max < q_max)
        throw domain_error("monomial_norm_check: growth scale shorter than q_max");
    const BigFloat rho = order.base.rho;
    BigFloat ln_sp = log(sigma_prime);
    LemmaReport rep;
    rep.lemma_id = "monomial-norm-bound";
    rep.grid = "q = 0.." + std::to_string(q_max) + ", C fitted on the lower half, re-checked on the upper";
    unsigned long q_split = q_max / 2;
    BigFloat fit_max = BigFloat::neg_inf(), held_max = BigFloat::neg_inf();
    BigFloat all_max = BigFloat::neg_inf();
    unsigned long argmax_q = 0;
    for (unsigned long q = 0; q <= q_max; ++q) {
        BigFloat lnr = ln_monomial_norm(order, sigma, q, WeightKind::normalized) +
                       (BigFloat(q) / rho) * ln_sp - scale.ln_G[q];
        if (lnr > all_max) { all_max = lnr; argmax_q = q; }
        if (q <= q_split) {
            if (lnr > fit_max) fit_max = lnr;
        } else {
            if (lnr > held_max) held_max = lnr;
        }
    }
    rep.fitted.emplace_back("C", exp(all_max));
    rep.fitted.emplace_back("ln_C_fit", fit_max);
    rep.fitted.emplace_back("argmax_q", BigFloat(argmax_q));
    BigFloat excess = held_max - fit_max;
    rep.max_violation = excess > BigFloat(0L) ? excess : BigFloat(0L);
    rep.passed = held_max <= fit_max + BigFloat::parse("1e-9");
    return rep;
}

LemmaReport derivative_norm_check(const NumSeries& f, const NormalizedOrder& order,
                                  const BigFloat& sigma, const BigFloat& kappa,
                                  const GrowthScale& scale, unsigned long q_max) {
    if (!(sigma > BigFloat(0L)))
        throw domain_error("derivative_norm_check: sigma must be positive");
    if (!(kappa > BigFloat(0L))) throw domain_error("derivative_norm_check: kappa must be positive");
    if (scale.q_max < q_max)
        throw domain_error("derivative_norm_check: growth scale shorter than q_max");
    const BigFloat rho = order.base.rho;
    LemmaReport rep;
    rep.lemma_id = "derivative-norm-bound";
    rep.grid = "|alpha| = 0.." + std::to_string(q_max) + ", spliced-weight norms at kappa sigma";
    WeightedNorm base = weighted_norm(f, order, sigma, 512, WeightKind::normalized);
    if (!base.ln_value.is_finite()) {
        rep.fitted.emplace_back("C", BigFloat(0L));
        rep.max_violation = BigFloat(0L);
        rep.passed = true;
        rep.grid += " (zero series, vacuous)";
        return rep;
    }
    BigFloat ln_rate = const_ln2() + log(kappa) + (rho / BigFloat(2L)) * log(BigFloat(f.n)) + log(sigma);
    BigFloat ksigma = kappa * sigma;
    std::vector<BigFloat> qs, cs;
    BigFloat all_max = BigFloat::neg_inf();
    for (unsigned long q = 0; q <= q_max; ++q) {
        BigFloat best = BigFloat::neg_inf();
        for (const MultiIndex& a : level_indices(f.n, q)) {
            NumSeries d = derivative(f, a);
            if (d.coeffs.empty()) continue;
            WeightedNorm wd = weighted_norm(d, order, ksigma, 512, WeightKind::normalized);
            if (!wd.ln_value.is_finite()) continue;
            BigFloat c = wd.ln_value - a.ln_factorial_bf() + scale.ln_G[q] -
                         (BigFloat(q) / rho) * ln_rate - base.ln_value;
            if (c > best) best = c;
        }
        if (!best.is_finite()) continue;
        if (best > all_max) all_max = best;
        qs.push_back(BigFloat(q));
        cs.push_back(best);
    }
    rep.fitted.emplace_back("C", exp(all_max));
    BigFloat slope(0L);
    size_t half = qs.size() / 2;
    if (qs.size() - half >= 3) {
        std::vector<BigFloat> tq(qs.begin() + half, qs.end());
        std::vector<BigFloat> tc(cs.begin() + half, cs.end());
        slope = ls_slope(tq, tc);
    }
    rep.fitted.emplace_back("tail_slope", slope);
    rep.max_violation = slope > BigFloat(0L) ? slope : BigFloat(0L);
    rep.passed = slope <= BigFloat::parse("0.01");
    return rep;
}

BigFloat partial_sum_residual(const NumSeries& f, const NormalizedOrder& order,
                              const BigFloat& sigma, const BigFloat& epsilon, unsigned long Q) {
    if (Q == 0 || Q > f.q_max) throw domain_error("partial_sum_residual: need 0 < Q <= q_max");
    if (!(epsilon > BigFloat(0L)))
        throw domain_error("partial_sum_residual: epsilon must be positive");
    if (sigma < BigFloat(0L)) throw domain_error("partial_sum_residual: sigma must be >= 0");
    const BigFloat rho = order.base.rho;
    BigFloat sigma_eff = exp((rho / BigFloat(2L)) * log(BigFloat(f.n))) * (sigma + epsilon);
    std::vector<std::optional<BigFloat>> lnR(f.q_max + 1);
    BigFloat acc(0L);
    for (const auto& [a, v] : f.coeffs) {
        unsigned long q = static_cast<unsigned long>(a.degree());
        if (q <= Q) continue;
        if (!lnR[q]) lnR[q] = ln_monomial_norm(order, sigma_eff, q, WeightKind::original);
        acc += exp(log(v.modulus()) + ln_sphere_factor(a) + *lnR[q]);
    }
    return acc;
}

}  // namespace valiron
