#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "valiron/json_io.hpp"

using namespace valiron;

namespace {

// prec_bits >= 64 (PO_PREC_BITS overrides the default, the flag overrides
// both); tol is echoed into reports that quote a tolerance; computation is
// serial and deterministic, so threads is accepted but has nothing to tune.
struct RunConfig {
    unsigned long prec_bits = 256;
    std::string tol = "1e-12";
    unsigned long threads = 0;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw domain_error("cannot open file: " + path, path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ojson json_arg(const std::string& inline_text, const std::string& file, const std::string& flag) {
    if (!inline_text.empty() && !file.empty())
        throw domain_error("give " + flag + " either inline or as a file, not both", flag);
    if (inline_text.empty() && file.empty())
        throw domain_error("missing required input " + flag, flag);
    std::string text = inline_text.empty() ? slurp(file) : inline_text;
    return parse_json_text(text, flag);
}

void emit(const ojson& j) { std::cout << j.dump(2) << "\n"; }

BigFloat bf_flag(const std::string& s, const std::string& flag) {
    try {
        return BigFloat::parse(s);
    } catch (const std::exception& e) {
        throw domain_error(std::string("bad number for ") + flag + ": " + e.what(), flag);
    }
}

Rat rat_flag(const std::string& s, const std::string& flag) { return rat_from_string(s, flag); }

std::vector<BigFloat> probes_flag(const std::string& s) {
    std::vector<BigFloat> out;
    if (s.empty()) return out;
    size_t pos = 0;
    while (pos <= s.size()) {
        size_t comma = s.find(',', pos);
        std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (tok.empty()) throw domain_error("empty probe in --probes", "--probes");
        out.push_back(bf_flag(tok, "--probes"));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

// ---- per-subcommand argument bags ----

struct Args {
    std::string order, order_file;
    std::string src_order, src_order_file;
    std::string dst_order, dst_order_file;
    std::string series, series_file;
    std::string symbol, symbol_file;
    std::string hom, hom_file;
    std::string r = "1";
    std::string solver_tol = "1e-25";
    std::string window_frac = "0.25";
    std::string sigma;
    std::string sigma_prime = "0.9";
    std::string sigma_out = "1";
    std::string kappa = "4.1";
    std::string kappa_deriv = "2.5";
    std::string delta = "0.05";
    std::string test = "minimal";
    std::string mode = "normal";
    std::string probes;
    std::string t = "1", k = "-1", eps = "1";
    unsigned long q_max = 64;
    unsigned long j_max = 400;
    unsigned long j_sym = 300;
    std::string r_cut = "16";
    std::string manifest = "data/corpus_manifest.json";
    bool emit_manifest = false;
    unsigned long count = 100;
    uint64_t master_seed = 0x5eedc0deULL;
};

ProximateOrder order_arg(const std::string& inline_text, const std::string& file,
                         const std::string& flag) {
    return order_from_json(json_arg(inline_text, file, flag), flag);
}

int cmd_eval_order(const Args& a) {
    ProximateOrder o = order_arg(a.order, a.order_file, "--order");
    BigFloat r = bf_flag(a.r, "--r");
    auto [v, dv] = o.eval(r);
    ojson j;
    j["r"] = r.str();
    j["varrho"] = v.str();
    j["dvarrho_dr"] = dv.str();
    emit(j);
    return 0;
}

int cmd_normalize(const Args& a) {
    ProximateOrder o = order_arg(a.order, a.order_file, "--order");
    NormalizedOrder no = normalize(o, bf_flag(a.solver_tol, "--solver-tol"));
    ojson j;
    j["order"] = order_to_json(o);
    j["x1"] = no.x1.str();
    j["r1"] = no.r1().str();
    j["L1"] = no.L1.str();
    j["slope"] = no.slope.str();
    j["discrepancy"] = no.discrepancy.str();
    j["solver_tol"] = no.solver_tol.str();
    emit(j);
    return 0;
}

int cmd_growth_scale(const Args& a) {
    ProximateOrder o = order_arg(a.order, a.order_file, "--order");
    GrowthScale g = growth_scale(normalize(o), a.q_max);
    emit(growth_scale_to_json(g));
    return 0;
}

int cmd_estimate_type(const Args& a) {
    ProximateOrder o = order_arg(a.order, a.order_file, "--order");
    ExactSeries f = exact_series_from_json(json_arg(a.series, a.series_file, "--series"),
                                           "--series");
    TypeEstimate t = estimate_type(to_numeric(f), normalize(o), bf_flag(a.window_frac, "--window-frac"));
    emit(type_estimate_to_json(t));
    std::cerr << "sigma_hat = " << t.sigma_hat.str().substr(0, 24) << " over q in [" << t.q_lo
              << ", " << t.q_hi << "]\n";
    return 0;
}

int cmd_classify_series(const Args& a) {
    ProximateOrder o = order_arg(a.order, a.order_file, "--order");
    ExactSeries f = exact_series_from_json(json_arg(a.series, a.series_file, "--series"),
                                           "--series");
    NormalizedOrder no = normalize(o);
    GrowthScale scale = growth_scale(no, f.q_max);
    NumSeries fn = to_numeric(f);
    MembershipVerdict v;
    if (a.test == "minimal" || a.test == "coeff") {
        if (a.sigma.empty())
            throw domain_error("--sigma is required for --test " + a.test, "--sigma");
        BigFloat sigma = bf_flag(a.sigma, "--sigma");
        v = a.test == "minimal" ? classify_minimal_type(fn, no, sigma, scale)
                                : classify_coeff_bound(fn, no, sigma, scale);
    } else if (a.test == "normal") {
        v = classify_normal_type(fn, no, scale);
    } else {
        throw domain_error("--test must be minimal, coeff, or normal", "--test");
    }
    emit(membership_to_json(v));
    std::cerr << "verdict " << verdict_name(v.verdict) << " (margin "
              << v.margin.str().substr(0, 16) << ")\n";
    return 0;
}

int cmd_classify_op(const Args& a) {
    ExactSymbol s = exact_symbol_from_json(json_arg(a.symbol, a.symbol_file, "--symbol"),
                                           "--symbol");
    NormalizedOrder src = normalize(order_arg(a.src_order, a.src_order_file, "--src-order"));
    NormalizedOrder dst = normalize(order_arg(a.dst_order, a.dst_order_file, "--dst-order"));
    SymbolMode mode;
    if (a.mode == "normal")
        mode = SymbolMode::NormalType;
    else if (a.mode == "minimal")
        mode = SymbolMode::MinimalType;
    else
        throw domain_error("--mode must be normal or minimal", "--mode");
    GrowthScale scale = growth_scale(src, s.a_max);
    SymbolClassVerdict v = classify_symbol(s, src, scale, dst, mode, probes_flag(a.probes));
    emit(symbol_verdict_to_json(v));
    std::cerr << symbol_mode_name(mode) << " verdict " << verdict_name(v.verdict) << " over "
              << v.probes.size() << " probes\n";
    return 0;
}

int cmd_hom_to_op(const Args& a) {
    ExactHomImages h = hom_from_json(json_arg(a.hom, a.hom_file, "--hom"), "--hom");
    emit(symbol_to_json(hom_to_symbol(h)));
    return 0;
}

int cmd_op_to_hom(const Args& a) {
    ExactSymbol s = exact_symbol_from_json(json_arg(a.symbol, a.symbol_file, "--symbol"),
                                           "--symbol");
    emit(hom_to_json(symbol_to_hom(s)));
    return 0;
}

int cmd_op_apply(const Args& a) {
    ExactSymbol s = exact_symbol_from_json(json_arg(a.symbol, a.symbol_file, "--symbol"),
                                           "--symbol");
    ExactSeries f = exact_series_from_json(json_arg(a.series, a.series_file, "--series"),
                                           "--series");
    NormalizedOrder dst = normalize(order_arg(a.dst_order, a.dst_order_file, "--dst-order"));
    ExactApply out = apply_operator(s, f, dst, bf_flag(a.sigma_out, "--sigma-out"));
    ojson j;
    j["result"] = series_to_json(out.result);
    j["tail_bound"] = out.tail_bound.str();
    emit(j);
    return 0;
}

int cmd_verify_lemmas(const Args& a) {
    ProximateOrder o = order_arg(a.order, a.order_file, "--order");
    NormalizedOrder no = normalize(o);
    BigFloat sigma = a.sigma.empty() ? BigFloat(1L) : bf_flag(a.sigma, "--sigma");
    BigFloat sigma_prime = bf_flag(a.sigma_prime, "--sigma-prime");
    GrowthScale scale = growth_scale(no, a.q_max);

    std::vector<LemmaReport> reports;
    reports.push_back(verify_subadditivity(no, bf_flag(a.kappa, "--kappa")));
    reports.push_back(verify_phi_derivative(no, bf_flag(a.delta, "--delta")));
    reports.push_back(verify_y_bound(no, sigma, sigma_prime));
    reports.push_back(monomial_norm_check(no, sigma, sigma_prime, scale, a.q_max));
    {
        ExactSeries ez(1, a.q_max);
        Rat fact(1);
        for (unsigned long q = 0; q <= a.q_max; ++q) {
            if (q > 0) fact = fact * Rat(static_cast<long>(q));
            ez.set(MultiIndex{static_cast<uint32_t>(q)}, GaussRat(Rat(1) / fact));
        }
        reports.push_back(derivative_norm_check(to_numeric(ez), no, sigma,
                                                bf_flag(a.kappa_deriv, "--kappa-deriv"), scale,
                                                a.q_max));
    }

    bool all = true;
    ojson rj = ojson::array();
    for (const LemmaReport& r : reports) {
        all = all && r.passed;
        rj.push_back(lemma_report_to_json(r));
        std::cerr << (r.passed ? "PASS  " : "FAIL  ") << r.lemma_id << "  max_violation "
                  << r.max_violation.str().substr(0, 16) << "\n";
    }
    ojson j;
    j["passed"] = all;
    j["reports"] = std::move(rj);
    emit(j);
    return all ? 0 : 1;
}

int cmd_example_schrodinger(const Args& a) {
    Rat t = rat_flag(a.t, "--t");
    BigFloat k = bf_flag(a.k, "--k");
    BigFloat eps = bf_flag(a.eps, "--eps");
    NormalizedOrder ll = normalize(ProximateOrder::loglog(BigFloat(2L), k, bf_flag(a.r_cut, "--rcut")));
    NormalizedOrder c2 = normalize(ProximateOrder::constant(BigFloat(2L)));

    ExampleRatio er = example_ratio(ll, t.to_bigfloat(), eps, a.j_max);
    ExactSymbol sym = schrodinger_symbol(t, a.j_sym);
    GrowthScale ll_scale = growth_scale(ll, sym.a_max);
    GrowthScale c2_scale = growth_scale(c2, sym.a_max);

    SymbolClassVerdict in_ll = classify_symbol(sym, ll, ll_scale, ll, SymbolMode::NormalType);
    SymbolClassVerdict in_c2 = classify_symbol(sym, c2, c2_scale, c2, SymbolMode::NormalType);
    SymbolClassVerdict in_c2_min = classify_symbol(sym, c2, c2_scale, c2, SymbolMode::MinimalType);

    bool ratio_small = er.first_small != 0;
    ojson j;
    j["in_D_varrho"] = (in_ll.verdict == Verdict::Member) && ratio_small;
    j["in_D_2"] = in_c2.verdict == Verdict::Member;
    j["in_D_2_minimal"] = in_c2_min.verdict == Verdict::Member;
    emit(j);

    std::cerr << "R_j < 1e-8 from j = " << er.first_small << " (j_max " << a.j_max << ")\n";
    std::cerr << "D_varrho (loglog, normal type): " << verdict_name(in_ll.verdict)
              << (in_ll.extrapolated ? " via rate extrapolation" : "") << "\n";
    unsigned long cross = 0;
    for (const auto& p : in_c2.probes)
        if (p.definitive_fail && (cross == 0 || p.witness_cross_q < cross))
            cross = p.witness_cross_q;
    std::cerr << "D_2 (constant 2, normal type): " << verdict_name(in_c2.verdict)
              << ", witness crosses 1e8 at q = " << cross << "\n";
    BigFloat lam = BigFloat::neg_inf();
    for (const auto& p : in_c2_min.probes)
        if (p.partner > lam) lam = p.partner;
    std::cerr << "D_2 minimal type: " << verdict_name(in_c2_min.verdict)
              << ", largest fitted lambda " << lam.str().substr(0, 12) << "\n";
    return 0;
}

int cmd_oracle_suite(const Args& a) {
    auto corpus = oracle::make_corpus(a.count, a.master_seed);
    std::vector<oracle::CorpusRecord> records;
    records.reserve(corpus.size());
    size_t rt_fail = 0, ap_fail = 0;
    for (const auto& item : corpus) {
        records.push_back(oracle::corpus_record(item));
        if (!records.back().roundtrip_ok) ++rt_fail;
        if (!records.back().apply_ok) ++ap_fail;
    }
    if (a.emit_manifest) {
        emit(corpus_manifest_json(records, a.master_seed));
        return (rt_fail + ap_fail) ? 1 : 0;
    }
    auto expected = corpus_manifest_from_json(parse_json_text(slurp(a.manifest), a.manifest),
                                              a.manifest);
    size_t digest_mismatch = 0;
    if (expected.size() != records.size()) {
        digest_mismatch = records.size();
    } else {
        for (size_t i = 0; i < records.size(); ++i) {
            const auto& e = expected[i];
            const auto& r = records[i];
            if (e.seed != r.seed || e.n != r.n || e.symbol_entries != r.symbol_entries ||
                e.digest_symbol != r.digest_symbol || e.digest_hom != r.digest_hom ||
                e.digest_apply != r.digest_apply)
                ++digest_mismatch;
        }
    }
    bool passed = rt_fail == 0 && ap_fail == 0 && digest_mismatch == 0;
    ojson j;
    j["count"] = records.size();
    j["roundtrip_failures"] = rt_fail;
    j["apply_failures"] = ap_fail;
    j["digest_mismatches"] = digest_mismatch;
    j["passed"] = passed;
    emit(j);
    std::cerr << (passed ? "oracle suite: all checks passed\n" : "oracle suite: FAILURES\n");
    return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    if (const char* env = std::getenv("PO_PREC_BITS")) {
        char* end = nullptr;
        unsigned long bits = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && bits > 0) cfg.prec_bits = bits;
    }

    CLI::App app{"growth toolkit for entire functions under proximate orders"};
    app.require_subcommand(1);
    app.add_option("--prec-bits", cfg.prec_bits,
                   "working precision in bits (>= 64; PO_PREC_BITS overrides the default)");
    app.add_option("--tol", cfg.tol, "generic tolerance echoed to reports");
    app.add_option("--threads", cfg.threads, "accepted for compatibility; execution is serial");

    Args a;
    auto add_order = [&](CLI::App* c) {
        c->add_option("--order", a.order, "proximate order JSON");
        c->add_option("--order-file", a.order_file, "path to proximate order JSON");
    };
    auto add_series = [&](CLI::App* c) {
        c->add_option("--series", a.series, "series JSON");
        c->add_option("--series-file", a.series_file, "path to series JSON");
    };
    auto add_symbol = [&](CLI::App* c) {
        c->add_option("--symbol", a.symbol, "operator symbol JSON");
        c->add_option("--symbol-file", a.symbol_file, "path to symbol JSON");
    };

    auto* c_eval = app.add_subcommand("eval-order", "evaluate varrho(r) and its derivative");
    add_order(c_eval);
    c_eval->add_option("--r", a.r, "radius (decimal string)");

    auto* c_norm = app.add_subcommand("normalize", "monotone splice of the weight");
    add_order(c_norm);
    c_norm->add_option("--solver-tol", a.solver_tol, "inversion tolerance");

    auto* c_gs = app.add_subcommand("growth-scale", "ln G_q table");
    add_order(c_gs);
    c_gs->add_option("--qmax", a.q_max, "largest level")->required();

    auto* c_type = app.add_subcommand("estimate-type", "type estimate from the coefficient tail");
    add_order(c_type);
    add_series(c_type);
    c_type->add_option("--window-frac", a.window_frac, "tail window fraction (0,1]");

    auto* c_cs = app.add_subcommand("classify-series", "membership tests for one series");
    add_order(c_cs);
    add_series(c_cs);
    c_cs->add_option("--test", a.test, "minimal | coeff | normal");
    c_cs->add_option("--sigma", a.sigma, "type parameter (minimal/coeff tests)");

    auto* c_co = app.add_subcommand("classify-op", "operator symbol class membership");
    add_symbol(c_co);
    c_co->add_option("--src-order", a.src_order, "source order JSON");
    c_co->add_option("--src-order-file", a.src_order_file, "path to source order JSON");
    c_co->add_option("--dst-order", a.dst_order, "destination order JSON");
    c_co->add_option("--dst-order-file", a.dst_order_file, "path to destination order JSON");
    c_co->add_option("--mode", a.mode, "normal | minimal");
    c_co->add_option("--probes", a.probes, "comma-separated probe values (default 2^-6..2^6)");

    auto* c_h2o = app.add_subcommand("hom-to-op", "reconstruct a symbol from monomial images");
    c_h2o->add_option("--hom", a.hom, "homomorphism image table JSON");
    c_h2o->add_option("--hom-file", a.hom_file, "path to image table JSON");

    auto* c_o2h = app.add_subcommand("op-to-hom", "monomial images of a symbol");
    add_symbol(c_o2h);

    auto* c_ap = app.add_subcommand("op-apply", "apply a symbol to a series (exact path)");
    add_symbol(c_ap);
    add_series(c_ap);
    c_ap->add_option("--dst-order", a.dst_order, "destination order JSON");
    c_ap->add_option("--dst-order-file", a.dst_order_file, "path to destination order JSON");
    c_ap->add_option("--sigma-out", a.sigma_out, "output type parameter for the tail bound");

    auto* c_vl = app.add_subcommand("verify-lemmas", "lemma verifier suite for one order");
    add_order(c_vl);
    c_vl->add_option("--kappa", a.kappa, "subadditivity constant (> 2^rho)");
    c_vl->add_option("--delta", a.delta, "phi log-derivative slack");
    c_vl->add_option("--sigma", a.sigma, "type parameter (default 1)");
    c_vl->add_option("--sigma-prime", a.sigma_prime, "smaller type parameter");
    c_vl->add_option("--kappa-deriv", a.kappa_deriv, "derivative-norm kappa (> 2)");
    c_vl->add_option("--qmax", a.q_max, "level cap for the norm checks");

    auto* c_ex = app.add_subcommand("example-schrodinger",
                                    "final-example verdicts for exp(i t d^2/2)");
    c_ex->add_option("--t", a.t, "time parameter (rational)");
    c_ex->add_option("--k", a.k, "loglog slope k");
    c_ex->add_option("--eps", a.eps, "ratio epsilon");
    c_ex->add_option("--jmax", a.j_max, "largest j for the ratio table");
    c_ex->add_option("--jsym", a.j_sym, "symbol truncation j (a_max = 2j)");
    c_ex->add_option("--rcut", a.r_cut, "loglog r_cut");

    auto* c_os = app.add_subcommand("oracle-suite", "seeded corpus against the frozen manifest");
    c_os->add_option("--manifest", a.manifest, "manifest path");
    c_os->add_flag("--emit-manifest", a.emit_manifest, "print a fresh manifest instead of checking");
    c_os->add_option("--count", a.count, "corpus size");
    c_os->add_option("--master-seed", a.master_seed, "corpus master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        ojson err;
        err["error"]["message"] = e.what();
        err["error"]["where"] = "argv";
        emit(err);
        return 2;
    }

    try {
        if (cfg.prec_bits < 64)
            throw domain_error("prec_bits must be >= 64", "--prec-bits");
        BigFloat::set_working_precision(static_cast<unsigned>(cfg.prec_bits));

        if (c_eval->parsed()) return cmd_eval_order(a);
        if (c_norm->parsed()) return cmd_normalize(a);
        if (c_gs->parsed()) return cmd_growth_scale(a);
        if (c_type->parsed()) return cmd_estimate_type(a);
        if (c_cs->parsed()) return cmd_classify_series(a);
        if (c_co->parsed()) return cmd_classify_op(a);
        if (c_h2o->parsed()) return cmd_hom_to_op(a);
        if (c_o2h->parsed()) return cmd_op_to_hom(a);
        if (c_ap->parsed()) return cmd_op_apply(a);
        if (c_vl->parsed()) return cmd_verify_lemmas(a);
        if (c_ex->parsed()) return cmd_example_schrodinger(a);
        if (c_os->parsed()) return cmd_oracle_suite(a);
        throw domain_error("no subcommand", "argv");
    } catch (const domain_error& e) {
        ojson err;
        err["error"]["message"] = e.what();
        if (!e.where.empty()) err["error"]["where"] = e.where;
        emit(err);
        return 2;
    } catch (const std::exception& e) {
        ojson err;
        err["error"]["message"] = e.what();
        err["error"]["internal"] = true;
        emit(err);
        return 1;
    }
}
