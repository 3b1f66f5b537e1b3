#include "valiron/diffop.hpp"

#include <algorithm>

namespace valiron {

namespace {

// Tail slope of y over the trailing half of the points (all of them when
// there are fewer than four); 0 when a fit is impossible.
BigFloat tail_slope(const std::vector<BigFloat>& x, const std::vector<BigFloat>& y) {
    if (x.size() < 2) return BigFloat(0L);
    size_t start = x.size() >= 4 ? x.size() / 2 : 0;
    std::vector<BigFloat> tx(x.begin() + start, x.end());
    std::vector<BigFloat> ty(y.begin() + start, y.end());
    return ls_slope(tx, ty);
}

// Checks r^varrho1 = O(r^varrho2) on a grid: the fitted climb of
// ln w1 - ln w2 across [x_start, x_start + 40 ln 2] must stay below 0.5.
void check_growth_comparability(const NormalizedOrder& src, const NormalizedOrder& dst) {
    BigFloat x0 = max(max(src.x1, dst.x1), const_ln2());
    BigFloat span = BigFloat(40L) * const_ln2();
    const unsigned m = 161;
    std::vector<BigFloat> xs, ds;
    for (unsigned j = 0; j < m; ++j) {
        BigFloat x = x0 + span * BigFloat(static_cast<unsigned long>(j)) /
                              BigFloat(static_cast<unsigned long>(m - 1));
        xs.push_back(x);
        ds.push_back(src.ln_weight_x(x) - dst.ln_weight_x(x));
    }
    BigFloat climb = ls_slope(xs, ds) * span;
    if (climb > BigFloat::parse("0.5"))
        throw domain_error("classify_symbol: r^varrho1 = O(r^varrho2) fails, the log-weight "
                           "gap climbs by " + climb.str() + " over the comparison grid");
}

struct LevelData {
    std::vector<unsigned long> q;           // nonzero levels, ascending
    std::vector<BigFloat> ln_coeff_norm;    // ln max ||a_alpha|| (per sigma, filled later)
    std::vector<BigFloat> ln_fact_norm;     // sigma-independent part cache
    std::vector<BigFloat> ln_witness;       // ln max |a_alpha(0)| alpha! (-inf allowed)
};

// Per-level ln(max_alpha ||a_alpha||_{rho2,sigma} alpha!) minus ln G_q.
std::vector<BigFloat> level_g(const NumSymbol& s, const std::vector<unsigned long>& levels,
                              const std::map<MultiIndex, BigFloat>& norm_cache,
                              const GrowthScale& scale) {
    std::vector<BigFloat> g;
    g.reserve(levels.size());
    for (unsigned long q : levels) {
        BigFloat best = BigFloat::neg_inf();
        for (const auto& [a, aa] : s.table) {
            if (a.degree() != q) continue;
            BigFloat v = norm_cache.at(a) + a.ln_factorial_bf();
            if (v > best) best = v;
        }
        g.push_back(best - scale.ln_G[q]);
    }
    return g;
}

// Consecutive per-q growth rates of g, at the right endpoint of each gap.
void rates_of(const std::vector<unsigned long>& q, const std::vector<BigFloat>& g,
              std::vector<BigFloat>& rq, std::vector<BigFloat>& rv) {
    rq.clear();
    rv.clear();
    for (size_t k = 0; k + 1 < q.size(); ++k) {
        BigFloat gap(static_cast<unsigned long>(q[k + 1] - q[k]));
        rq.push_back(BigFloat(q[k + 1]));
        rv.push_back((g[k + 1] - g[k]) / gap);
    }
}

}  // namespace

NumSymbol to_numeric(const ExactSymbol& s) {
    NumSymbol r(s.n, s.a_max);
    for (const auto& [a, aa] : s.table) {
        NumSeries na = to_numeric(aa);
        if (!na.coeffs.empty()) r.table.emplace(a, std::move(na));
    }
    return r;
}

namespace {

// Tail estimate for the |alpha| > a_max cut, shaped like the term-by-term
// product bound: the level contribution is nH_q * max(||a_alpha|| alpha!)/G_q
// * X^q * ||f||, with the symbol's own level profile continued geometrically
// past a_max.
BigFloat tail_bound_estimate(const NumSymbol& s, const NumSeries& f,
                             const NormalizedOrder& dst, const BigFloat& sigma_out) {
    if (!(sigma_out > BigFloat(0L)))
        throw domain_error("apply_operator: sigma_out must be positive");
    if (s.table.empty() || f.coeffs.empty()) return BigFloat(0L);
    const BigFloat rho = dst.base.rho;
    BigFloat kappa = exp(rho * const_ln2()) * BigFloat(17L) / BigFloat(16L);
    BigFloat tau = sigma_out / (BigFloat(2L) * kappa);
    BigFloat sigma_half = sigma_out / BigFloat(2L);
    BigFloat lnF = weighted_norm(f, dst, tau, 512, WeightKind::normalized).ln_value;
    if (!lnF.is_finite()) return BigFloat(0L);
    // 2 kappa tau = sigma_out, so X = (sqrt(n)^rho sigma_out)^(1/rho)
    BigFloat lnX = (log(sigma_out) + (rho / BigFloat(2L)) * log(BigFloat(f.n))) / rho;

    // a single-level table has no decay profile to continue; same answer the
    // levels.size() <= 1 branch below gives, reached before growth_scale's
    // q_max >= 1 precondition can object
    if (s.a_max == 0) return BigFloat(0L);
    GrowthScale scale = growth_scale(dst, s.a_max);
    std::vector<unsigned long> levels;
    std::vector<BigFloat> a_q;
    for (unsigned long q = 0; q <= s.a_max; ++q) {
        BigFloat best = BigFloat::neg_inf();
        for (const auto& [a, aa] : s.table) {
            if (a.degree() != q) continue;
            BigFloat v = weighted_norm(aa, dst, sigma_half, 512, WeightKind::normalized).ln_value +
                         a.ln_factorial_bf();
            if (v > best) best = v;
        }
        if (!best.is_finite()) continue;
        levels.push_back(q);
        a_q.push_back(best - scale.ln_G[q]);
    }
    if (levels.size() <= 1) return BigFloat(0L);  // nothing to extrapolate from

    // Per-step drift: the worst consecutive rate over the trailing half.
    size_t start = levels.size() >= 4 ? levels.size() / 2 : 0;
    BigFloat drift = BigFloat::neg_inf();
    for (size_t k = start; k + 1 < levels.size(); ++k) {
        BigFloat gap(static_cast<unsigned long>(levels[k + 1] - levels[k]));
        BigFloat r = (a_q[k + 1] - a_q[k]) / gap;
        if (r > drift) drift = r;
    }
    if (!((drift + lnX) < BigFloat(0L))) return BigFloat::pos_inf();

    unsigned long qb = levels.back();
    BigFloat base = a_q.back();
    BigFloat acc(0L);
    for (unsigned long q = s.a_max + 1; q <= s.a_max + 200000; ++q) {
        BigFloat term = exp(ln_multi_choose(f.n, q) + base +
                            BigFloat(q - qb) * drift + BigFloat(q) * lnX + lnF);
        acc += term;
        if (term < BigFloat::parse("1e-30") * acc) return acc;
    }
    return BigFloat::pos_inf();
}

}  // namespace

ExactApply apply_operator(const ExactSymbol& s, const ExactSeries& f,
                          const NormalizedOrder& dst, const BigFloat& sigma_out) {
    ExactApply out;
    out.result = apply_symbol_truncated(s, f);
    out.tail_bound = tail_bound_estimate(to_numeric(s), to_numeric(f), dst, sigma_out);
    return out;
}

NumApply apply_operator(const NumSymbol& s, const NumSeries& f,
                        const NormalizedOrder& dst, const BigFloat& sigma_out) {
    NumApply out;
    out.result = apply_symbol_truncated(s, f);
    out.tail_bound = tail_bound_estimate(s, f, dst, sigma_out);
    return out;
}

std::string symbol_mode_name(SymbolMode m) {
    return m == SymbolMode::NormalType ? "NormalType" : "MinimalType";
}

std::vector<BigFloat> default_probe_ladder() {
    std::vector<BigFloat> v;
    BigFloat p = BigFloat(1L) / BigFloat(64L);
    for (int k = -6; k <= 6; ++k) {
        v.push_back(p);
        p *= BigFloat(2L);
    }
    return v;
}

namespace {

constexpr double kSlopeTol = 0.01;       // stability cutoffs, in ln units x q_end
const char* kWitnessBar = "100000000";   // 1e8: divergence bar for the witness

struct ClassifyContext {
    const NumSymbol* s;
    const NormalizedOrder* dst;
    const GrowthScale* src_scale;
    std::vector<unsigned long> levels;      // nonzero levels ascending
    std::vector<BigFloat> ln_fact;          // ln max(alpha!) piece is per-alpha; kept per level below
    std::vector<BigFloat> ln_witness_raw;   // ln max |a_alpha(0)| alpha!, per level
    unsigned long q_end = 0;
    // Norm cache: sigma decimal string -> per-level ln max(||a_alpha|| alpha!).
    std::map<std::string, std::vector<BigFloat>> norm_memo;

    const std::vector<BigFloat>& level_norms(const BigFloat& sigma) {
        std::string key = sigma.str();
        auto it = norm_memo.find(key);
        if (it != norm_memo.end()) return it->second;
        std::vector<BigFloat> out;
        out.reserve(levels.size());
        for (unsigned long q : levels) {
            BigFloat best = BigFloat::neg_inf();
            for (const auto& [a, aa] : s->table) {
                if (a.degree() != q) continue;
                BigFloat v = weighted_norm(aa, *dst, sigma, 512, WeightKind::original).ln_value +
                             a.ln_factorial_bf();
                if (v > best) best = v;
            }
            out.push_back(best);
        }
        return norm_memo.emplace(key, std::move(out)).first->second;
    }

    std::vector<BigFloat> g_of(const BigFloat& sigma) {
        const std::vector<BigFloat>& nm = level_norms(sigma);
        std::vector<BigFloat> g;
        g.reserve(levels.size());
        for (size_t k = 0; k < levels.size(); ++k) g.push_back(nm[k] - src_scale->ln_G[levels[k]]);
        return g;
    }
};

// ok(i): y_q = ln g_q - q ln lambda has a non-climbing tail.
bool stable_under(const ClassifyContext& cx, const std::vector<BigFloat>& g,
                  const BigFloat& ln_lambda, BigFloat& slope_span, BigFloat& ln_C) {
    std::vector<BigFloat> qs, ys;
    ln_C = BigFloat::neg_inf();
    for (size_t k = 0; k < cx.levels.size(); ++k) {
        BigFloat y = g[k] - BigFloat(cx.levels[k]) * ln_lambda;
        if (y > ln_C) ln_C = y;
        qs.push_back(BigFloat(cx.levels[k]));
        ys.push_back(y);
    }
    slope_span = tail_slope(qs, ys) * BigFloat(cx.q_end);
    return slope_span <= BigFloat::parse("0.01");
}

// ok(ii): the per-q growth rate of g is itself falling, so for every lambda
// the bound eventually holds past the truncation (extrapolation, flagged).
bool rate_decays(const ClassifyContext& cx, const std::vector<BigFloat>& g, BigFloat& slope_span) {
    std::vector<BigFloat> rq, rv;
    rates_of(cx.levels, g, rq, rv);
    if (rv.size() < 2) { slope_span = BigFloat(0L); return false; }
    slope_span = tail_slope(rq, rv) * BigFloat(cx.q_end);
    return slope_span < BigFloat::parse("-0.01");
}

// Diverging lower-bound witness at this lambda: |a_alpha(0)| alone already
// forces C beyond 1e8 inside the window and its growth rate is not falling.
void witness_check(const ClassifyContext& cx, const BigFloat& ln_lambda, ProbeResult& pr) {
    std::vector<unsigned long> wq;
    std::vector<BigFloat> wv;
    for (size_t k = 0; k < cx.levels.size(); ++k) {
        if (!cx.ln_witness_raw[k].is_finite()) continue;
        wq.push_back(cx.levels[k]);
        wv.push_back(cx.ln_witness_raw[k] - cx.src_scale->ln_G[cx.levels[k]] -
                     BigFloat(cx.levels[k]) * ln_lambda);
    }
    if (wq.empty()) return;
    BigFloat bar = log(BigFloat::parse(kWitnessBar));
    for (size_t k = 0; k < wq.size(); ++k)
        if (wv[k] > bar) { pr.witness_cross_q = wq[k]; break; }
    size_t start = wq.size() >= 4 ? wq.size() / 2 : 0;
    BigFloat wmax = BigFloat::neg_inf();
    for (size_t k = start; k < wq.size(); ++k)
        if (wv[k] > wmax) wmax = wv[k];
    pr.ln_witness_max = wmax;
    std::vector<BigFloat> rq, rv;
    rates_of(wq, wv, rq, rv);
    BigFloat wslope(0L);
    if (rv.size() >= 2) wslope = tail_slope(rq, rv) * BigFloat(cx.q_end);
    if (wmax > bar && wslope >= BigFloat::parse("-0.01")) {
        pr.definitive_fail = true;
        pr.ok = false;
        pr.note += (pr.note.empty() ? "" : "; ");
        pr.note += "witness exceeds 1e8 at q = " + std::to_string(pr.witness_cross_q) +
                   " with non-falling rate (slope x span " + wslope.str().substr(0, 12) + ")";
    }
}

}  // namespace

SymbolClassVerdict classify_symbol(const NumSymbol& s, const NormalizedOrder& src,
                                   const GrowthScale& src_scale, const NormalizedOrder& dst,
                                   SymbolMode mode, std::vector<BigFloat> probes) {
    if (src_scale.q_max < s.a_max)
        throw domain_error("classify_symbol: src growth scale shorter than a_max");
    check_growth_comparability(src, dst);

    SymbolClassVerdict out;
    out.mode = mode;
    if (probes.empty()) probes = default_probe_ladder();

    ClassifyContext cx;
    cx.s = &s;
    cx.dst = &dst;
    cx.src_scale = &src_scale;
    for (const auto& [a, aa] : s.table) {
        unsigned long q = static_cast<unsigned long>(a.degree());
        if (cx.levels.empty() || cx.levels.back() != q) {
            cx.levels.push_back(q);
            cx.ln_witness_raw.push_back(BigFloat::neg_inf());
        }
        const BigComplex* c0 = aa.find(MultiIndex(s.n));
        if (c0) {
            BigFloat w = log(c0->modulus()) + a.ln_factorial_bf();
            if (w > cx.ln_witness_raw.back()) cx.ln_witness_raw.back() = w;
        }
    }
    if (cx.levels.empty()) {
        out.verdict = Verdict::Member;
        out.diagnostics = "zero symbol, member of every class with C = 0";
        return out;
    }
    cx.q_end = cx.levels.back();

    std::vector<BigFloat> sigma_ladder = default_probe_ladder();
    bool all_ok = true, any_fail = false;

    for (const BigFloat& probe : probes) {
        if (!(probe > BigFloat(0L))) throw domain_error("classify_symbol: probes must be positive");
        ProbeResult pr;
        pr.probe = probe;
        if (mode == SymbolMode::NormalType) {
            BigFloat ln_lambda = log(probe);
            for (const BigFloat& sg : sigma_ladder) {
                std::vector<BigFloat> g = cx.g_of(sg);
                BigFloat span, lnC;
                if (stable_under(cx, g, ln_lambda, span, lnC)) {
                    pr.ok = true;
                    pr.partner = sg;
                    pr.C = exp(lnC);
                    pr.y_slope_span = span;
                    break;
                }
                if (&sg == &sigma_ladder.back()) pr.y_slope_span = span;
            }
            if (!pr.ok) {
                std::vector<BigFloat> g = cx.g_of(sigma_ladder.back());
                BigFloat rspan;
                if (rate_decays(cx, g, rspan)) {
                    pr.ok = true;
                    pr.via_rate_extrapolation = true;
                    pr.partner = sigma_ladder.back();
                    BigFloat span, lnC;
                    stable_under(cx, g, ln_lambda, span, lnC);
                    pr.C = exp(lnC);
                    pr.note = "in-window ratio still climbing, but its growth rate falls";
                }
                pr.rate_slope_span = rspan;
            }
            witness_check(cx, ln_lambda, pr);
        } else {
            std::vector<BigFloat> g = cx.g_of(probe);
            std::vector<BigFloat> qs;
            for (unsigned long q : cx.levels) qs.push_back(BigFloat(q));
            BigFloat lam_fit = exp(tail_slope(qs, g));
            BigFloat lam = lam_fit;
            for (int esc = 0; esc <= 12; ++esc) {
                BigFloat span, lnC;
                if (stable_under(cx, g, log(lam), span, lnC)) {
                    pr.ok = true;
                    pr.partner = lam;
                    pr.C = exp(lnC);
                    pr.y_slope_span = span;
                    break;
                }
                if (esc == 12) pr.y_slope_span = span;
                lam *= BigFloat(2L);
            }
            if (!pr.ok) {
                BigFloat rspan;
                if (rate_decays(cx, g, rspan)) {
                    pr.ok = true;
                    pr.via_rate_extrapolation = true;
                    pr.partner = lam_fit;
                    BigFloat span, lnC;
                    stable_under(cx, g, log(lam_fit), span, lnC);
                    pr.C = exp(lnC);
                    pr.note = "rate of the level profile falls; some lambda works past the window";
                }
                pr.rate_slope_span = rspan;
            }
            witness_check(cx, log(pr.ok ? pr.partner : lam_fit), pr);
        }
        if (pr.via_rate_extrapolation && pr.ok) out.extrapolated = true;
        if (pr.definitive_fail) any_fail = true;
        if (!pr.ok) all_ok = false;
        out.probes.push_back(std::move(pr));
    }

    if (any_fail) {
        out.verdict = Verdict::NotMember;
        out.diagnostics = "at least one probe has a diverging lower-bound witness";
    } else if (all_ok) {
        out.verdict = Verdict::Member;
        out.diagnostics = out.extrapolated
                              ? "every probe admits a stable constant (some via rate extrapolation)"
                              : "every probe admits a stable constant inside the window";
    } else {
        out.verdict = Verdict::Inconclusive;
        out.diagnostics = "some probes fail in-window but no diverging witness certifies the failure";
    }
    (void)kSlopeTol;
    return out;
}

SymbolClassVerdict classify_symbol(const ExactSymbol& s, const NormalizedOrder& src,
                                   const GrowthScale& src_scale, const NormalizedOrder& dst,
                                   SymbolMode mode, std::vector<BigFloat> probes) {
    return classify_symbol(to_numeric(s), src, src_scale, dst, mode, std::move(probes));
}

ExactSymbol schrodinger_symbol(const Rat& t, unsigned long j_max, bool include_shift_factor,
                               bool include_prefactor) {
    if (j_max < 1) throw domain_error("schrodinger_symbol: j_max must be >= 1");
    unsigned long a_max = 2 * j_max;
    Rat half_t = t / Rat(2);

    // d^2-part coefficients c_{2j} = (i t/2)^j / j!.
    std::map<unsigned long, GaussRat> part;
    GaussRat cur(Rat(1));
    for (unsigned long j = 0; j <= j_max; ++j) {
        if (!(cur.re.is_zero() && cur.im.is_zero())) part[2 * j] = cur;
        cur = cur * GaussRat(Rat(0), half_t);  // * i t/2
        cur = GaussRat(cur.re / Rat(static_cast<long>(j) + 1), cur.im / Rat(static_cast<long>(j) + 1));
    }

    std::map<unsigned long, GaussRat> conv;
    if (include_shift_factor) {
        // exp((t^2/2) d): b_k = (t^2/2)^k / k!, convolved into the d-orders.
        Rat ht2 = t * t / Rat(2);
        std::vector<Rat> b(a_max + 1, Rat(0));
        Rat bk(1);
        for (unsigned long k = 0; k <= a_max; ++k) {
            b[k] = bk;
            bk = bk * ht2 / Rat(static_cast<long>(k) + 1);
            if (ht2.is_zero()) break;  // all further b_k vanish
        }
        for (const auto& [q, c] : part)
            for (unsigned long k = 0; q + k <= a_max; ++k) {
                if (b[k].is_zero()) continue;
                GaussRat add = c * GaussRat(b[k]);
                auto it = conv.find(q + k);
                if (it == conv.end())
                    conv.emplace(q + k, add);
                else
                    it->second += add;
            }
    } else {
        conv = std::move(part);
    }

    // Optional outer factor e^(-itz), truncated at degree a_max.
    ExactSeries prefactor(1, a_max);
    if (include_prefactor) {
        GaussRat pk(Rat(1));
        for (unsigned long m = 0; m <= a_max; ++m) {
            prefactor.set(MultiIndex{static_cast<uint32_t>(m)}, pk);
            pk = pk * GaussRat(Rat(0), -t);
            pk = GaussRat(pk.re / Rat(static_cast<long>(m) + 1), pk.im / Rat(static_cast<long>(m) + 1));
            if (t.is_zero()) break;
        }
    }

    ExactSymbol s(1, a_max);
    for (const auto& [q, c] : conv) {
        if (c.re.is_zero() && c.im.is_zero()) continue;
        ExactSeries coeff(1, include_prefactor ? a_max : 0);
        if (include_prefactor) {
            coeff = scale(c, prefactor);
        } else {
            coeff.set(MultiIndex{0u}, c);
        }
        if (!coeff.coeffs.empty())
            s.table.emplace(MultiIndex{static_cast<uint32_t>(q)}, std::move(coeff));
    }
    return s;
}

ExampleRatio example_ratio(const NormalizedOrder& order, const BigFloat& t,
                           const BigFloat& eps, unsigned long j_max) {
    if (order.base.rho != BigFloat(2L))
        throw domain_error("example_ratio: the order must have rho = 2");
    if (!(eps > BigFloat(0L))) throw domain_error("example_ratio: eps must be positive");
    if (j_max < 1) throw domain_error("example_ratio: j_max must be >= 1");
    ExampleRatio out;
    out.ln_R.reserve(j_max);
    BigFloat ln_2e_t = log(BigFloat(2L) * const_e() * abs(t));  // -inf at t = 0
    BigFloat ln_eps = log(eps);
    for (unsigned long j = 1; j <= j_max; ++j) {
        BigFloat tw(2 * j);
        BigFloat ln_tw = log(tw);
        BigFloat ln_phi = order.ln_phi_lnt(ln_tw);
        BigFloat jf(j);
        out.ln_R.push_back(jf * (ln_tw - BigFloat(2L) * ln_phi + ln_2e_t - BigFloat(2L) * ln_eps) +
                           ln_double_factorial_odd(j) - jf * ln_tw);
    }
    BigFloat bar = log(BigFloat::parse("1e-8"));
    unsigned long first = 0;
    for (unsigned long j = j_max; j >= 1; --j) {
        if (!(out.ln_R[j - 1] < bar)) break;
        first = j;
        if (j == 1) break;
    }
    out.first_small = first;
    BigFloat tk(10L);
    for (int k = 1; k <= 8; ++k) {
        BigFloat phi = order.phi(tk);
        out.limit_check.emplace_back(tk, tk / (phi * phi));
        tk *= BigFloat(10L);
    }
    return out;
}

bool series_equal(const ExactSeries& a, const ExactSeries& b) {
    if (a.n != b.n) return false;
    if (a.coeffs.size() != b.coeffs.size()) return false;
    auto ia = a.coeffs.begin();
    auto ib = b.coeffs.begin();
    for (; ia != a.coeffs.end(); ++ia, ++ib)
        if (ia->first != ib->first || ia->second != ib->second) return false;
    return true;
}

bool symbol_equal(const ExactSymbol& a, const ExactSymbol& b) {
    if (a.n != b.n) return false;
    if (a.table.size() != b.table.size()) return false;
    auto ia = a.table.begin();
    auto ib = b.table.begin();
    for (; ia != a.table.end(); ++ia, ++ib)
        if (ia->first != ib->first || !series_equal(ia->second, ib->second)) return false;
    return true;
}

}  // namespace valiron
